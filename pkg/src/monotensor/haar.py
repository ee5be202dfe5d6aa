"""Monte Carlo checks of the asymptotic factorization under conjugation.

A word alternates fixed deterministic matrices A_i with B_j conjugated
by one Haar unitary per trial.  As the dimension grows, the truncated
diagonal sum of the word concentrates on the product of the A-word's
truncated sum with the normalized traces of the B-letters; the
deviation decays like 1/n.  ``mc_estimate`` runs the seeded experiment
over a dimension sweep and ``rate_check`` fits the decay slope with a
trial-resampling confidence band.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from . import linalg
from .sampling import complex_gaussians, stream


def sample_haar_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary: QR of a complex Gaussian matrix.

    The phase convention in :func:`monotensor.linalg.qr_unitary`
    (positive real diagonal of R) is what makes the QR output
    Haar-distributed rather than merely unitary.
    """
    if n < 1:
        raise ValueError("dimension must be at least 1")
    return linalg.qr_unitary(complex_gaussians(rng, (n, n)))


@dataclass(frozen=True)
class CornerFamily:
    """Fixed finite-rank Hermitian block, zero-padded into dimension n."""

    eigenvalues: tuple

    def realize(self, n: int) -> np.ndarray:
        block = np.diag([float(x) for x in self.eigenvalues])
        if block.shape[0] > n:
            raise ValueError(f"block of rank {block.shape[0]} does not fit in n={n}")
        return linalg.embed_top_corner(block, n)


@dataclass(frozen=True)
class DiagPatternFamily:
    """Diagonal matrices with prescribed values in fixed proportions.

    ``realize(n)`` repeats each value round(weight * n) times using
    largest-remainder rounding, so normalized traces converge (and for
    exact proportions like a balanced +-1 pattern are exact at every
    even n).
    """

    values: tuple
    weights: tuple

    def __post_init__(self):
        if len(self.values) != len(self.weights) or not self.values:
            raise ValueError("values and weights must be equal-length and non-empty")
        total = float(sum(self.weights))
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"weights must sum to 1, got {total}")

    def realize(self, n: int) -> np.ndarray:
        raw = [w * n for w in self.weights]
        counts = [int(np.floor(x)) for x in raw]
        remainder = n - sum(counts)
        order = sorted(
            range(len(raw)), key=lambda i: (raw[i] - counts[i], -i), reverse=True
        )
        for i in order[:remainder]:
            counts[i] += 1
        diag = []
        for v, c in zip(self.values, counts):
            diag.extend([float(v)] * c)
        return np.diag(diag).astype(np.complex128)

    def normalized_trace(self, n: int) -> complex:
        m = self.realize(n)
        return complex(np.trace(m)) / n


@dataclass(frozen=True)
class HaarWordSpec:
    """A conjugation word plus the families and sweep parameters.

    ``word`` is a tuple of ("A", i) / ("B", j) pairs: an optional
    leading B followed by strictly alternating A-B pairs ending in B.
    ``include_leading_trace`` keeps the leading B's normalized trace in
    the limit target (the asymptotics produce it); switch it off to
    compare against the bare A-times-inner-B target instead.
    """

    word: tuple
    a_families: tuple
    b_families: tuple
    n_list: tuple
    l_rule: object = "full"  # "full", "half", or an explicit int
    trials: int = 400
    seed: int = 7
    include_leading_trace: bool = True
    moment_bound: float = 100.0
    force_identity: bool = False

    def __post_init__(self):
        word = tuple((str(t).upper(), int(i)) for t, i in self.word)
        object.__setattr__(self, "word", word)
        _validate_word(word)
        for tag, idx in word:
            fams = self.a_families if tag == "A" else self.b_families
            if not 1 <= idx <= len(fams):
                raise ValueError(f"word letter {tag}{idx} has no family")
        if self.trials < 2:
            raise ValueError("need at least two trials for a standard error")
        if not self.n_list:
            raise ValueError("need at least one dimension")

    def resolve_l(self, n: int) -> int:
        if self.l_rule == "full":
            return n
        if self.l_rule == "half":
            return max(1, n // 2)
        l = int(self.l_rule)
        if not 1 <= l <= n:
            raise ValueError(f"l={l} out of range for n={n}")
        return l


def _validate_word(word) -> None:
    if not word:
        raise ValueError("empty word")
    body = word[1:] if word[0][0] == "B" else word
    if not body or len(body) % 2 != 0:
        raise ValueError("word must be (optional B) followed by A-B pairs")
    for pos, (tag, _) in enumerate(body):
        expect = "A" if pos % 2 == 0 else "B"
        if tag != expect:
            raise ValueError("word must alternate A and B after the optional lead")


def parse_word(text: str) -> tuple:
    """Parse 'ABAB' or 'B2 A1 B1' style patterns (default index 1)."""
    compact = text.replace(" ", "")
    if not re.fullmatch(r"(?:[ABab]\d*)+", compact):
        raise ValueError(f"cannot parse word pattern {text!r}")
    return tuple(
        (m.group(1).upper(), int(m.group(2)) if m.group(2) else 1)
        for m in re.finditer(r"([ABab])(\d*)", compact)
    )


def realize_families(spec: HaarWordSpec, n: int):
    a_mats = [fam.realize(n) for fam in spec.a_families]
    b_mats = [fam.realize(n) for fam in spec.b_families]
    _check_moment_bounds(spec, n, a_mats, b_mats)
    return a_mats, b_mats


def _check_moment_bounds(spec: HaarWordSpec, n: int, a_mats, b_mats) -> None:
    c = spec.moment_bound
    a_word = [idx for tag, idx in spec.word if tag == "A"]
    if a_word:
        prod = a_mats[a_word[0] - 1]
        for i in a_word[1:]:
            prod = prod @ a_mats[i - 1]
        if abs(np.trace(prod)) > c:
            raise ValueError(
                f"A-word trace {abs(np.trace(prod)):.3g} exceeds the bound {c}"
            )
    for j, m in enumerate(b_mats, start=1):
        power = np.eye(n, dtype=np.complex128)
        for _ in range(len(spec.word)):
            power = power @ m
            if abs(np.trace(power)) / n > c:
                raise ValueError(f"normalized trace of a b{j}-power exceeds {c}")


def word_value(spec: HaarWordSpec, n: int, l: int, u: np.ndarray,
               a_mats=None, b_mats=None) -> complex:
    """Truncated diagonal sum of the realized word at one unitary."""
    if a_mats is None or b_mats is None:
        a_mats, b_mats = realize_families(spec, n)
    uh = u.conj().T
    acc = np.eye(n, dtype=np.complex128)
    for tag, idx in spec.word:
        if tag == "A":
            acc = acc @ a_mats[idx - 1]
        else:
            acc = acc @ (u @ b_mats[idx - 1] @ uh)
    return linalg.partial_trace(acc, l)


def target_value(spec: HaarWordSpec, n: int, l: int, a_mats=None, b_mats=None) -> complex:
    """The limit target: truncated A-word sum times b normalized traces."""
    if a_mats is None or b_mats is None:
        a_mats, b_mats = realize_families(spec, n)
    prod = np.eye(n, dtype=np.complex128)
    for tag, idx in spec.word:
        if tag == "A":
            prod = prod @ a_mats[idx - 1]
    value = linalg.partial_trace(prod, l)
    leading = spec.word[0][0] == "B"
    for pos, (tag, idx) in enumerate(spec.word):
        if tag != "B":
            continue
        if pos == 0 and leading and not spec.include_leading_trace:
            continue
        value *= complex(np.trace(b_mats[idx - 1])) / n
    return value


@dataclass
class McRow:
    n: int
    l: int
    values: np.ndarray
    target: complex

    @property
    def mean(self) -> complex:
        return complex(self.values.mean())

    @property
    def stderr(self) -> float:
        t = self.values.size
        spread = (np.abs(self.values - self.values.mean()) ** 2).sum()
        return float(np.sqrt(spread / (t * (t - 1))))

    @property
    def abs_err(self) -> float:
        return abs(self.mean - self.target)

    @property
    def mad(self) -> float:
        """Mean absolute deviation of single trials from the target."""
        return float(np.abs(self.values - self.target).mean())


@dataclass
class McReport:
    spec: HaarWordSpec
    rows: list

    def calibrate_c_rate(self) -> float:
        """Freeze the 1/n constant from the smallest dimension's row."""
        row = min(self.rows, key=lambda r: r.n)
        return row.n * (row.abs_err + 3.0 * row.stderr)

    def bound_failures(self, c_rate: float) -> list:
        return [
            r.n
            for r in self.rows
            if r.abs_err > 3.0 * r.stderr + c_rate / r.n
        ]


def mc_estimate(spec: HaarWordSpec) -> McReport:
    """Run the seeded sweep; per-trial unitaries come from streams keyed
    by (seed, n, trial), so the experiment is reproducible bit for bit."""
    rows = []
    for n in spec.n_list:
        n = int(n)
        l = spec.resolve_l(n)
        a_mats, b_mats = realize_families(spec, n)
        target = target_value(spec, n, l, a_mats, b_mats)
        values = np.empty(spec.trials, dtype=np.complex128)
        for t in range(spec.trials):
            if spec.force_identity:
                u = np.eye(n, dtype=np.complex128)
            else:
                u = sample_haar_unitary(n, stream(spec.seed, n, t))
            values[t] = word_value(spec, n, l, u, a_mats, b_mats)
        rows.append(McRow(n=n, l=l, values=values, target=target))
    return McReport(spec=spec, rows=rows)


@dataclass
class RateFit:
    n_list: list
    mads: list
    slope: float
    intercept: float
    band: tuple
    degenerate: bool

    def slope_in(self, lo: float, hi: float) -> bool:
        return (not self.degenerate) and lo <= self.slope <= hi


def rate_check(report: McReport, resamples: int = 200) -> RateFit:
    """Least-squares decay slope of the trial deviations against n.

    Fits log(mean |value - target|) on log(n); the confidence band
    resamples trials with replacement per dimension.  All-zero
    deviations are flagged degenerate instead of fitted.
    """
    rows = sorted(report.rows, key=lambda r: r.n)
    if len(rows) < 2:
        raise ValueError("rate fit needs at least two dimensions")
    n_arr = np.array([r.n for r in rows], dtype=float)
    mads = np.array([r.mad for r in rows])
    scale = max(abs(r.target) for r in rows)
    if np.all(mads <= 1e-14 * (1.0 + scale)):
        return RateFit(
            n_list=[int(x) for x in n_arr],
            mads=list(map(float, mads)),
            slope=float("nan"),
            intercept=float("nan"),
            band=(float("nan"), float("nan")),
            degenerate=True,
        )
    slope, intercept = np.polyfit(np.log(n_arr), np.log(mads), 1)
    boot = np.empty(resamples)
    for r in range(resamples):
        resampled = []
        for row_idx, row in enumerate(rows):
            rng = stream(report.spec.seed, 0xB00075, row_idx, r)
            idx = rng.integers(0, row.values.size, row.values.size)
            resampled.append(np.abs(row.values[idx] - row.target).mean())
        resampled = np.maximum(resampled, 1e-300)
        boot[r] = np.polyfit(np.log(n_arr), np.log(resampled), 1)[0]
    band = (float(np.quantile(boot, 0.025)), float(np.quantile(boot, 0.975)))
    return RateFit(
        n_list=[int(x) for x in n_arr],
        mads=list(map(float, mads)),
        slope=float(slope),
        intercept=float(intercept),
        band=band,
        degenerate=False,
    )
