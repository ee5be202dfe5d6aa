"""Finite-dimensional matrix models for the two moment functionals.

A model places the a-matrices in the corner block of an n*2^q space:
``a`` maps to ``corner (x) a_padded`` and ``b_j`` maps to ``B_j (x) I_n``,
where ``corner`` is the rank-one unit at label 0 of the 2^q tensor space
and ``B_j`` puts a flip in tensor slot j.  Matrices are flattened with
the tensor label as the outer (slow) index, so the corner block occupies
the FIRST n diagonal positions: the full trace of a polynomial power
recovers the cyclic moment, the sum of the first n diagonal entries
recovers the monotone moment, and truncated diagonal sums interpolate
between the two iterated limits.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np

from . import linalg
from .moments import (
    AFamilyMoments,
    BMomentTable,
    MomentData,
    cyclic_moment,
    monotone_moment,
)
from .words import CenteredRun, Letter, NCPolynomial

#: Largest model dimension n * 2^q a spec may request by default.
DIM_CAP = 4096

#: Largest polynomial power evaluate_state accepts.
POWER_CAP = 32

#: 2x2 flip (the off-diagonal permutation); its square is the identity.
FLIP = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=np.complex128)


def flip_factor(q: int, j: int) -> np.ndarray:
    """The 2^q tensor-space matrix with a flip in slot j (j = 0: identity)."""
    if not 0 <= j <= q:
        raise ValueError(f"slot index {j} out of range 0..{q}")
    if j == 0:
        return np.eye(2**q, dtype=np.complex128)
    return linalg.kron(
        np.eye(2 ** (j - 1)), linalg.kron(FLIP, np.eye(2 ** (q - j)))
    )


def corner_unit(q: int) -> np.ndarray:
    """Rank-one unit at tensor label 0 (the product of per-slot units)."""
    out = np.zeros((2**q, 2**q), dtype=np.complex128)
    out[0, 0] = 1.0
    return out


@dataclass(frozen=True)
class ModelSpec:
    """Input data for a model: sizes, a-matrices, and the polynomial."""

    n: int
    q: int
    a_matrices: tuple
    poly: NCPolynomial
    dim_cap: int = DIM_CAP

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be at least 1")
        if self.q < 0:
            raise ValueError("q must be non-negative")
        mats = tuple(linalg.as_matrix(m) for m in self.a_matrices)
        object.__setattr__(self, "a_matrices", mats)
        if not mats:
            raise ValueError("a model needs at least one a-matrix")
        base = mats[0].shape[0]
        for m in mats:
            if m.shape != (base, base):
                raise ValueError("a-matrices must share a common square shape")
            if not linalg.is_hermitian(m):
                raise ValueError("a-matrices must be Hermitian")
        if base > self.n:
            raise ValueError(
                f"a-matrices of dimension {base} do not fit in n={self.n}"
            )
        if self.n * 2**self.q > self.dim_cap:
            raise ValueError(
                f"model dimension {self.n * 2 ** self.q} exceeds cap {self.dim_cap}"
            )
        if self.poly.max_letter_index("A") > len(mats):
            raise ValueError("polynomial uses an a-index with no matrix")
        if self.poly.max_letter_index("B") > self.q:
            raise ValueError(f"polynomial uses a b-index above q={self.q}")
        if not self.poly.in_a_ideal():
            raise ValueError(
                "polynomial must lie in the ideal generated by the a-letters"
            )

    @property
    def dim(self) -> int:
        return self.n * 2**self.q

    def with_n(self, n: int) -> "ModelSpec":
        return dataclasses.replace(self, n=n)

    def moment_data(self, max_len: int = 4) -> MomentData:
        """The matching symbolic data: same a-matrices, orthonormal b-table."""
        return MomentData(
            AFamilyMoments(self.a_matrices),
            BMomentTable.orthonormal(self.q, max_len=max_len),
        )


@dataclass
class TensorModel:
    n: int
    q: int
    dim: int
    a_reps: list
    b_reps: list
    poly_matrix: np.ndarray


def build_model(spec: ModelSpec) -> TensorModel:
    """Realize the spec's polynomial as a dim x dim matrix."""
    corner = corner_unit(spec.q)
    eye_n = np.eye(spec.n, dtype=np.complex128)
    a_reps = [
        linalg.kron(corner, linalg.embed_top_corner(m, spec.n))
        for m in spec.a_matrices
    ]
    b_reps = [
        linalg.kron(flip_factor(spec.q, j), eye_n) for j in range(1, spec.q + 1)
    ]
    dim = spec.dim
    acc = np.zeros((dim, dim), dtype=np.complex128)
    eye = np.eye(dim, dtype=np.complex128)
    for word, coeff in spec.poly.terms.items():
        m = eye
        for atom in word:
            m = m @ _atom_matrix(atom, a_reps, b_reps, dim)
        acc = acc + coeff * m
    return TensorModel(
        n=spec.n, q=spec.q, dim=dim, a_reps=a_reps, b_reps=b_reps, poly_matrix=acc
    )


def _atom_matrix(atom, a_reps, b_reps, dim: int) -> np.ndarray:
    if isinstance(atom, CenteredRun):
        m = b_reps[atom.indices[0] - 1]
        for j in atom.indices[1:]:
            m = m @ b_reps[j - 1]
        return m - (np.trace(m) / dim) * np.eye(dim, dtype=np.complex128)
    if not isinstance(atom, Letter):
        raise TypeError(f"not a word atom: {atom!r}")
    if atom.algebra == "A":
        return a_reps[atom.index - 1]
    # A centered b-letter maps to the same matrix: the generators of the
    # model are trace-free, so centering subtracts zero.
    return b_reps[atom.index - 1]


def matrix_power(m: np.ndarray, k: int) -> np.ndarray:
    if not isinstance(k, int) or not 1 <= k <= POWER_CAP:
        raise ValueError(f"power k must be an integer in 1..{POWER_CAP}, got {k}")
    acc = m
    for _ in range(k - 1):
        acc = acc @ m
    return acc


def evaluate_state(model: TensorModel, k: int, state) -> complex:
    """Evaluate a diagonal state on the k-th power of the model matrix.

    ``state`` is ``"full"`` (trace), ``"monotone"`` (sum of the first n
    diagonal entries, i.e. the corner block), or ``("partial", l)``.
    """
    mp = matrix_power(model.poly_matrix, k)
    if state == "full":
        return linalg.trace(mp)
    if state == "monotone":
        return linalg.partial_trace(mp, model.n)
    if isinstance(state, tuple) and len(state) == 2 and state[0] == "partial":
        return linalg.partial_trace(mp, int(state[1]))
    raise ValueError(f"unknown state {state!r}")


# -- verification against the symbolic evaluators -------------------------


@dataclass
class VerifyRow:
    k: int
    symbolic: complex
    matrix: complex
    residual: float
    passed: bool


@dataclass
class VerifyReport:
    kind: str
    rows: list
    rtol: float

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows)

    @property
    def max_residual(self) -> float:
        return max((r.residual for r in self.rows), default=0.0)


def _verify(spec: ModelSpec, data: MomentData | None, k_max: int, rtol: float,
            kind: str) -> VerifyReport:
    if data is None:
        data = spec.moment_data()
    model = build_model(spec)
    symbolic_eval = cyclic_moment if kind == "cyclic" else monotone_moment
    state = "full" if kind == "cyclic" else "monotone"
    rows = []
    pk = NCPolynomial.one()
    mk = np.eye(model.dim, dtype=np.complex128)
    for k in range(1, k_max + 1):
        pk = pk * spec.poly
        mk = mk @ model.poly_matrix
        sym = symbolic_eval(pk, data)
        mat = linalg.trace(mk) if state == "full" else linalg.partial_trace(mk, model.n)
        residual = abs(sym - mat)
        rows.append(
            VerifyRow(
                k=k,
                symbolic=sym,
                matrix=mat,
                residual=residual,
                passed=residual <= rtol * (1.0 + abs(sym)),
            )
        )
    return VerifyReport(kind=kind, rows=rows, rtol=rtol)


def verify_cyclic(spec: ModelSpec, data: MomentData | None = None, k_max: int = 5,
                  rtol: float = 1e-10) -> VerifyReport:
    """Full trace of every power against the cyclic moment."""
    return _verify(spec, data, k_max, rtol, "cyclic")


def verify_monotone(spec: ModelSpec, data: MomentData | None = None, k_max: int = 5,
                    rtol: float = 1e-10) -> VerifyReport:
    """Corner-block trace of every power against the monotone moment."""
    return _verify(spec, data, k_max, rtol, "monotone")


# -- the two iterated limits ----------------------------------------------


@dataclass
class LimitSweepReport:
    k: int
    rows: list  # (n, l, value)
    values: dict  # (n, l) -> value, including the full-dimension cut
    cyclic_value: complex
    monotone_value: complex
    cyclic_consistent: bool
    corner_consistent: bool
    monotone_limit_ok: bool

    @property
    def ok(self) -> bool:
        return self.cyclic_consistent and self.corner_consistent and self.monotone_limit_ok


def limit_sweep(spec: ModelSpec, k: int, n_list, l_list,
                tol: float = 1e-12) -> LimitSweepReport:
    """Tabulate truncated diagonal sums over a grid of n and l.

    Checks the finite-rank stabilization pattern: for each n the l-run
    ends exactly at the full trace (one iterated limit, the cyclic
    value), for each common l <= min(n) the value is independent of n
    and the stabilized column reaches the corner-block value (the other
    iterated limit, the monotone value).
    """
    n_list = sorted(set(int(n) for n in n_list))
    l_list = sorted(set(int(l) for l in l_list))
    if not n_list or not l_list:
        raise ValueError("need at least one n and one l")
    rows = []
    traces = {}
    corners = {}
    values = {}
    for n in n_list:
        model = build_model(spec.with_n(n))
        mp = matrix_power(model.poly_matrix, k)
        traces[n] = linalg.trace(mp)
        corners[n] = linalg.partial_trace(mp, n)
        for l in l_list:
            if l <= model.dim:
                values[(n, l)] = linalg.partial_trace(mp, l)
                rows.append((n, l, values[(n, l)]))
        values[(n, model.dim)] = linalg.partial_trace(mp, model.dim)

    n0 = n_list[0]
    n_top = n_list[-1]
    cyclic_consistent = all(
        abs(traces[n] - traces[n0]) <= tol
        and abs(values[(n, n * 2**spec.q)] - traces[n]) <= tol
        for n in n_list
    )
    corner_consistent = all(
        abs(values[(n, l)] - values[(n0, l)]) <= tol
        for l in l_list
        if l <= n0
        for n in n_list
    )
    monotone_limit_ok = all(abs(corners[n] - corners[n0]) <= tol for n in n_list)
    if n0 in l_list:
        # The deepest common column must already sit at the corner value.
        monotone_limit_ok = (
            monotone_limit_ok and abs(values[(n_top, n0)] - corners[n_top]) <= tol
        )
    return LimitSweepReport(
        k=k,
        rows=rows,
        values=values,
        cyclic_value=traces[n0],
        monotone_value=corners[n0],
        cyclic_consistent=cyclic_consistent,
        corner_consistent=corner_consistent,
        monotone_limit_ok=monotone_limit_ok,
    )


# -- the rank-3 worked example ---------------------------------------------


@dataclass
class ExamplePair:
    x_spec: ModelSpec
    y_spec: ModelSpec
    x_matrix: np.ndarray
    y_matrix: np.ndarray
    x_eigenvalues: np.ndarray
    y_eigenvalues: np.ndarray
    x_expected: np.ndarray
    y_expected: np.ndarray

    @property
    def ok(self) -> bool:
        return bool(
            np.max(np.abs(self.x_eigenvalues - self.x_expected)) <= 1e-12
            and np.max(np.abs(self.y_eigenvalues - self.y_expected)) <= 1e-12
        )


def build_example_pair(eigenvalues=(0.5, 0.25, 0.125)) -> ExamplePair:
    """The commutation/anticommutation pair over a diagonal a.

    X = a + b a b has each a-eigenvalue twice; Y = a b + b a has the
    a-eigenvalues with both signs.  Expected spectra are derived from
    the input eigenvalues, so variant inputs are checked against the
    same rule.
    """
    eigs = np.asarray([float(x) for x in eigenvalues])
    if eigs.size < 1:
        raise ValueError("need at least one eigenvalue")
    n = eigs.size
    diag = np.diag(eigs)
    x_spec = ModelSpec(
        n=n, q=1, a_matrices=(diag,), poly=NCPolynomial.parse("a1 + b1 a1 b1")
    )
    y_spec = ModelSpec(
        n=n, q=1, a_matrices=(diag,), poly=NCPolynomial.parse("a1 b1 + b1 a1")
    )
    x_matrix = build_model(x_spec).poly_matrix
    y_matrix = build_model(y_spec).poly_matrix
    x_expected = np.sort(np.concatenate([eigs, eigs]))[::-1]
    y_expected = np.sort(np.concatenate([eigs, -eigs]))[::-1]
    return ExamplePair(
        x_spec=x_spec,
        y_spec=y_spec,
        x_matrix=x_matrix,
        y_matrix=y_matrix,
        x_eigenvalues=linalg.hermitian_eigenvalues(x_matrix),
        y_eigenvalues=linalg.hermitian_eigenvalues(y_matrix),
        x_expected=x_expected,
        y_expected=y_expected,
    )


def example_eigenvalues(eigenvalues=(0.5, 0.25, 0.125)):
    """Sorted spectra of the worked-example pair (X, Y)."""
    pair = build_example_pair(eigenvalues)
    return pair.x_eigenvalues, pair.y_eigenvalues


# -- JSON loading -----------------------------------------------------------


def model_spec_from_json_obj(obj: dict) -> ModelSpec:
    """Load a model spec from its JSON form.

    Expected keys: ``n``, ``q``, ``poly`` (text or term list), and ``a``
    (list of {"eigenvalues": [...]} or {"matrix": {...}} entries).
    """
    if "n" not in obj or "q" not in obj or "poly" not in obj or "a" not in obj:
        raise ValueError("model spec needs keys n, q, poly, a")
    poly = obj["poly"]
    if isinstance(poly, str):
        poly = NCPolynomial.parse(poly)
    else:
        poly = NCPolynomial.from_json_obj(poly)
    mats = []
    for entry in obj["a"]:
        if "eigenvalues" in entry:
            mats.append(np.diag([float(x) for x in entry["eigenvalues"]]))
        elif "matrix" in entry:
            mats.append(linalg.matrix_from_json(entry["matrix"]))
        else:
            raise ValueError("each a-entry needs 'eigenvalues' or 'matrix'")
    base = max(m.shape[0] for m in mats)
    mats = [linalg.embed_top_corner(m, base) for m in mats]
    return ModelSpec(
        n=int(obj["n"]),
        q=int(obj["q"]),
        a_matrices=tuple(mats),
        poly=poly,
        dim_cap=int(obj.get("dim_cap", DIM_CAP)),
    )
