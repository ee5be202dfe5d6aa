"""Haar sampling, family realizations, and the Monte Carlo sweep."""
import numpy as np
import pytest

from monotensor.haar import (
    CornerFamily,
    DiagPatternFamily,
    HaarWordSpec,
    McReport,
    McRow,
    mc_estimate,
    parse_word,
    rate_check,
    sample_haar_unitary,
    target_value,
    word_value,
)
from monotensor.sampling import stream

A_FAM = CornerFamily((0.5, 0.25, 0.125))
B_BAL = DiagPatternFamily((1.0, -1.0), (0.5, 0.5))


def _spec(**kw):
    base = dict(
        word=parse_word("ABAB"),
        a_families=(A_FAM,),
        b_families=(B_BAL,),
        n_list=(8, 16),
        trials=10,
        seed=7,
    )
    base.update(kw)
    return HaarWordSpec(**base)


def test_sample_haar_unitary_is_unitary():
    u = sample_haar_unitary(12, stream(3, 12, 0))
    assert np.max(np.abs(u.conj().T @ u - np.eye(12))) <= 1e-12


def test_sample_haar_unitary_streams():
    u1 = sample_haar_unitary(6, stream(3, 6, 0))
    u2 = sample_haar_unitary(6, stream(3, 6, 0))
    u3 = sample_haar_unitary(6, stream(3, 6, 1))
    assert np.array_equal(u1, u2)
    assert not np.array_equal(u1, u3)


def test_corner_family_padding():
    m = A_FAM.realize(5)
    assert m.shape == (5, 5)
    assert np.array_equal(np.diag(m).real, [0.5, 0.25, 0.125, 0.0, 0.0])
    with pytest.raises(ValueError):
        A_FAM.realize(2)


def test_diag_pattern_counts():
    m = B_BAL.realize(6)
    diag = np.diag(m).real
    assert np.sum(diag == 1.0) == 3 and np.sum(diag == -1.0) == 3
    assert B_BAL.normalized_trace(6) == 0.0
    # Odd n still fills every slot and matches its own trace report.
    m5 = B_BAL.realize(5)
    assert np.trace(m5) / 5 == B_BAL.normalized_trace(5)
    with pytest.raises(ValueError):
        DiagPatternFamily((1.0,), (0.7,))


def test_parse_word():
    assert parse_word("ABAB") == (("A", 1), ("B", 1), ("A", 1), ("B", 1))
    assert parse_word("B2 A1 B1") == (("B", 2), ("A", 1), ("B", 1))
    assert parse_word("a2b1") == (("A", 2), ("B", 1))
    with pytest.raises(ValueError):
        parse_word("AXB")
    with pytest.raises(ValueError):
        parse_word("")


def test_word_shape_validation():
    _spec(word=parse_word("BABAB"))  # leading b is fine
    with pytest.raises(ValueError):
        _spec(word=parse_word("BABA"))  # ends on an a-letter
    with pytest.raises(ValueError):
        _spec(word=parse_word("ABBA"))  # not alternating
    with pytest.raises(ValueError):
        _spec(word=parse_word("A2B"))  # no second a-family
    with pytest.raises(ValueError):
        _spec(trials=1)


def test_resolve_l_rules():
    spec = _spec(l_rule="half")
    assert spec.resolve_l(16) == 8
    assert _spec(l_rule=3).resolve_l(16) == 3
    with pytest.raises(ValueError):
        _spec(l_rule=20).resolve_l(16)


def test_target_value_balanced_b_vanishes():
    assert target_value(_spec(), 8, 8) == 0.0


def test_target_value_tracks_traces():
    b_pos = DiagPatternFamily((1.0, 0.0), (0.5, 0.5))
    spec = _spec(word=parse_word("AB"), b_families=(b_pos,))
    # eta_n(A) * tr(B) = (7/8) * (1/2).
    got = target_value(spec, 8, 8)
    assert abs(got - 0.875 * 0.5) <= 1e-12


def test_leading_trace_flag():
    b_pos = DiagPatternFamily((1.0, 0.0), (0.5, 0.5))
    with_lead = _spec(word=parse_word("BAB"), b_families=(b_pos,))
    without = _spec(
        word=parse_word("BAB"), b_families=(b_pos,), include_leading_trace=False
    )
    v1 = target_value(with_lead, 8, 8)
    v2 = target_value(without, 8, 8)
    assert abs(v1 - 0.875 * 0.25) <= 1e-12  # both b-traces
    assert abs(v2 - 0.875 * 0.5) <= 1e-12   # leading trace dropped


def test_word_value_identity_unitary():
    # With u = I the word is just the alternating matrix product.
    spec = _spec(word=parse_word("AB"))
    n = 8
    a = A_FAM.realize(n)
    bm = B_BAL.realize(n)
    direct = np.trace(a @ bm)
    got = word_value(spec, n, n, np.eye(n, dtype=np.complex128), [a], [bm])
    assert abs(got - direct) <= 1e-12


def test_mc_estimate_reproducible():
    r1 = mc_estimate(_spec())
    r2 = mc_estimate(_spec())
    for a_row, b_row in zip(r1.rows, r2.rows):
        assert np.array_equal(a_row.values, b_row.values)
        assert a_row.target == b_row.target


def test_mc_estimate_force_identity_collapses_spread():
    rep = mc_estimate(_spec(force_identity=True))
    for row in rep.rows:
        assert row.stderr == 0.0
        assert np.all(row.values == row.values[0])


def test_mc_row_statistics():
    row = McRow(n=4, l=4, values=np.array([1.0 + 0j, 3.0 + 0j]), target=1.0 + 0j)
    assert row.mean == 2.0
    # spread = |1-2|^2 + |3-2|^2 = 2; stderr = sqrt(2 / (2*1)) = 1.
    assert row.stderr == 1.0
    assert row.abs_err == 1.0
    # mad = mean(|1-1|, |3-1|) = 1.
    assert row.mad == 1.0


def test_bound_failures():
    row_ok = McRow(n=2, l=2, values=np.array([1.0, 1.0]), target=1.0)
    row_bad = McRow(n=4, l=4, values=np.array([2.0, 2.0]), target=1.0)
    report = McReport(spec=_spec(), rows=[row_ok, row_bad])
    assert report.bound_failures(100.0) == []
    assert report.bound_failures(0.0) == [4]


def test_calibrate_c_rate_uses_smallest_n():
    rep = mc_estimate(_spec())
    row = min(rep.rows, key=lambda r: r.n)
    assert rep.calibrate_c_rate() == row.n * (row.abs_err + 3.0 * row.stderr)


def test_rate_check_recovers_synthetic_slope():
    # Deviations exactly c/n give slope -1 regardless of resampling.
    rows = [
        McRow(n=n, l=n, values=np.full(4, 1.0 + 2.0 / n), target=1.0 + 0j)
        for n in (8, 16, 32)
    ]
    fit = rate_check(McReport(spec=_spec(n_list=(8, 16, 32)), rows=rows), resamples=20)
    assert not fit.degenerate
    assert abs(fit.slope + 1.0) <= 1e-9
    assert fit.slope_in(-1.6, -0.7)


def test_rate_check_degenerate_on_exact_values():
    rows = [
        McRow(n=n, l=n, values=np.full(4, 1.0 + 0j), target=1.0 + 0j)
        for n in (8, 16)
    ]
    fit = rate_check(McReport(spec=_spec(), rows=rows), resamples=5)
    assert fit.degenerate
    assert not fit.slope_in(-1.6, -0.7)
    with pytest.raises(ValueError):
        rate_check(McReport(spec=_spec(), rows=rows[:1]))


def test_moment_bound_guard():
    spec = _spec(moment_bound=0.1)
    with pytest.raises(ValueError):
        mc_estimate(spec)


def test_mc_decay_small_scale():
    rep = mc_estimate(_spec(n_list=(8, 16, 32), trials=60))
    errs = [row.abs_err for row in sorted(rep.rows, key=lambda r: r.n)]
    assert errs[0] > errs[1] > errs[2]
    assert rep.bound_failures(rep.calibrate_c_rate()) == []


def test_haar_dimension_one_is_pure_phase():
    u = sample_haar_unitary(1, stream(7, 1, 0))
    assert abs(abs(u[0, 0]) - 1.0) <= 1e-12


def test_haar_first_moments():
    # E[U] = 0 and E[U_ab conj(U_cd)] = delta_ac delta_bd / n; with 10^4
    # samples both hold entrywise to five standard errors.
    n, count = 4, 10_000
    rng = stream(11, n)
    us = np.empty((count, n, n), dtype=np.complex128)
    for t in range(count):
        us[t] = sample_haar_unitary(n, rng)

    mean = us.mean(axis=0)
    serr = us.std(axis=0, ddof=1) / np.sqrt(count)
    assert np.all(np.abs(mean) <= 5.0 * serr)

    prods = us[:, :, :, None, None] * us.conj()[:, None, None, :, :]
    second = prods.mean(axis=0)
    serr2 = prods.std(axis=0, ddof=1) / np.sqrt(count)
    eye = np.eye(n)
    target = np.einsum("ac,bd->abcd", eye, eye) / n
    assert np.all(np.abs(second - target) <= 5.0 * serr2)


def test_word_value_identity_b_reduces_to_a_trace():
    spec = _spec(
        word=parse_word("AB"),
        b_families=(DiagPatternFamily((1.0,), (1.0,)),),
    )
    u = sample_haar_unitary(8, stream(5, 8, 0))
    # Conjugating the identity does nothing, so the value is Tr(A).
    assert abs(word_value(spec, 8, 8, u) - 0.875) <= 1e-12


def test_mc_first_moment_is_exact():
    # E[U B U*] = tr(B) I exactly, so the mean error for a single-B word
    # is pure sampling noise at every dimension.
    spec = _spec(
        word=parse_word("AB"),
        b_families=(DiagPatternFamily((1.0, 0.0), (0.5, 0.5)),),
        n_list=(6, 12),
        trials=300,
    )
    rep = mc_estimate(spec)
    for row in rep.rows:
        assert row.abs_err <= 3.0 * row.stderr


def test_rate_check_identity_unitary_negative_control():
    # Forcing U = I freezes the word value at a nonzero constant, so the
    # deviation from the factorized target does not decay; the slope
    # sits near zero and the rate window check fails as it should.
    spec = _spec(n_list=(8, 16, 32), trials=5, force_identity=True)
    fit = rate_check(mc_estimate(spec), resamples=20)
    assert not fit.degenerate
    assert abs(fit.slope) <= 0.05
    assert not fit.slope_in(-1.6, -0.7)
