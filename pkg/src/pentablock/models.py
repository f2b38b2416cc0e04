"""Truncated Hardy-space models, the normal Fejer-Riesz factorization and a
numerical Wold-type decomposition.

Vector-valued polynomials of degree ``< n`` with coefficients in ``C^d`` are
stored degree-major: block ``k`` of a vector holds the coefficient of
``z^k``.  Multiplication by an analytic symbol of degree ``m`` then becomes a
block lower-triangular banded matrix that agrees with the true operator on
degrees ``0 .. n-1-m`` (its exact window).  Every identity a model is meant to
satisfy is checked on that window only.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .classify import (
    OperatorTriple,
    isometric_window,
    p_isometry_check,
    p_unitary_check,
    quasi_p_unitary_check,
)
from .errors import (
    DecompositionInconsistent,
    InvalidInput,
    InvalidModelData,
    NotCommuting,
    NotContraction,
    NotNormal,
    NotNumericalContraction,
    NotTruncatedIsometry,
    ShapeError,
)
from .linalg_kernel import (
    DEFAULT_TOL,
    ToleranceProfile,
    as_square,
    matrix_from_json,
    matrix_to_json,
    normality_residual,
    numerical_radius,
    opnorm,
    sqrt_psd,
)
from .verdict import Verdict

__all__ = [
    "TruncatedHardyOp",
    "HardyModel",
    "FejerRieszPair",
    "WoldResult",
    "WoldSplit",
    "truncated_shift",
    "multiplication_operator",
    "build_shift_tensor",
    "build_pure_gamma_isometry",
    "fejer_riesz_normal",
    "verify_five_equations",
    "build_pure_p_isometry",
    "symmetrization_model",
    "verify_model",
    "model_from_json",
    "wold_decompose",
    "wold_triple_decompose",
]


@dataclass(frozen=True)
class TruncatedHardyOp:
    """Compression of an operator on ``H^2 (x) C^d`` to degrees ``< trunc``."""

    trunc: int
    fiber_dim: int
    mat: np.ndarray
    exact_window: int

    def __post_init__(self):
        size = self.trunc * self.fiber_dim
        if self.mat.shape != (size, size):
            raise ShapeError(f"expected a {size}x{size} matrix, got {self.mat.shape}")
        if not 0 <= self.exact_window <= self.trunc:
            raise InvalidModelData("exact window must lie in [0, trunc]")


def truncated_shift(n: int) -> np.ndarray:
    """Multiplication by ``z`` on polynomials of degree ``< n``."""
    return np.eye(n, k=-1, dtype=complex)


def multiplication_operator(coeffs: dict, n: int) -> TruncatedHardyOp:
    """Truncated ``M_phi`` for an analytic symbol ``phi = sum_k z^k C_k``."""
    if n < 1:
        raise InvalidModelData("truncation order must be positive")
    coeffs = {int(k): as_square(C) for k, C in coeffs.items()}
    if any(k < 0 for k in coeffs):
        raise InvalidModelData("symbol must be analytic")
    d = next(iter(coeffs.values())).shape[0]
    mat = np.zeros((n * d, n * d), dtype=complex)
    for k, C in coeffs.items():
        if C.shape != (d, d):
            raise ShapeError("symbol coefficients differ in size")
        if k < n:
            mat += np.kron(np.eye(n, k=-k), C)
    deg = max(coeffs, default=0)
    return TruncatedHardyOp(n, d, mat, max(n - deg, 0))


def _degree_window(n: int, d: int, w: int) -> np.ndarray:
    return np.arange(w * d)


@dataclass(frozen=True)
class HardyModel:
    """A truncated model triple together with its exactness window."""

    kind: str
    n: int
    ops: tuple[TruncatedHardyOp, ...]
    window: np.ndarray
    F: np.ndarray | None = None

    @property
    def triple(self) -> OperatorTriple:
        return OperatorTriple(*(op.mat for op in self.ops), window=self.window)

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "n": int(self.n),
            "F": None if self.F is None else matrix_to_json(self.F),
            "triple": self.triple.to_json(),
        }


def model_from_json(obj) -> tuple[str, int, np.ndarray | None, OperatorTriple]:
    """Parse a model descriptor into ``(kind, n, F, triple)``."""
    try:
        kind, n = str(obj["kind"]), int(obj["n"])
        F = None if obj.get("F") is None else matrix_from_json(obj["F"])
        t = OperatorTriple.from_json(obj["triple"])
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, InvalidInput):
            raise
        raise InvalidInput(f"malformed model descriptor: {exc}") from None
    return kind, n, F, t


def build_shift_tensor(n: int, N1, N2, N3, tol: ToleranceProfile = DEFAULT_TOL) -> HardyModel:
    """``(M_z (x) N1, I (x) N2, I (x) N3)`` truncated to degrees ``< n``.

    A quasi pentablock-unitary whenever ``(N1, N2, N3)`` is a
    pentablock-unitary; exact on degrees ``0 .. n-2``.

    Raises
    ------
    InvalidModelData
        If ``(N1, N2, N3)`` is not a pentablock-unitary, or ``n < 2``.
    """
    if n < 2:
        raise InvalidModelData("need n >= 2 for a non-empty window")
    try:
        base = OperatorTriple(N1, N2, N3)
        ok = p_unitary_check(base, "algebraic", tol).is_member
    except (ShapeError, InvalidInput) as exc:
        raise InvalidModelData(str(exc)) from None
    except NotCommuting:
        ok = False
    if not ok:
        raise InvalidModelData("(N1, N2, N3) is not a pentablock-unitary")
    d = base.n
    S = truncated_shift(n)
    ops = (
        TruncatedHardyOp(n, d, np.kron(S, base.T1), n - 1),
        TruncatedHardyOp(n, d, np.kron(np.eye(n), base.T2), n),
        TruncatedHardyOp(n, d, np.kron(np.eye(n), base.T3), n),
    )
    return HardyModel("shift-tensor", n, ops, _degree_window(n, d, n - 1))


def build_pure_gamma_isometry(F, n: int, tol: ToleranceProfile = DEFAULT_TOL):
    """Truncations of ``(M_{F + z F^*}, M_z)``; exact on degrees ``0 .. n-2``.

    Raises
    ------
    NotNumericalContraction
        If the numerical radius of ``F`` exceeds ``1 + atol_spectral``.
    """
    F = as_square(F)
    w = numerical_radius(F)
    if w > 1.0 + tol.atol_spectral:
        raise NotNumericalContraction(f"numerical radius {w:.6g} > 1")
    d = F.shape[0]
    S = multiplication_operator({0: F, 1: F.conj().T}, n)
    P = multiplication_operator({1: np.eye(d)}, n)
    return S, P


@dataclass(frozen=True)
class FejerRieszPair:
    """``A0 = (I + D_F)/2`` and ``A1 = -(I + D_F)^{-1} F^{*2} / 2``."""

    A0: np.ndarray
    A1: np.ndarray
    DF: np.ndarray

    def to_json(self) -> dict:
        return {"A0": matrix_to_json(self.A0), "A1": matrix_to_json(self.A1), "DF": matrix_to_json(self.DF)}


def fejer_riesz_normal(F, tol: ToleranceProfile = DEFAULT_TOL) -> FejerRieszPair:
    """Closed-form factor ``A0 + z A1`` for a normal contraction ``F``.

    ``(I + D_F)`` has spectrum in ``[1, 2]``, so its inverse through the
    Hermitian eigendecomposition is always well conditioned.

    Raises
    ------
    NotNormal, NotContraction
    """
    F = as_square(F)
    scale = opnorm(F)
    res = normality_residual(F)
    if res > tol.identity(scale):
        raise NotNormal(f"F is not normal (residual {res:.3e})")
    if scale > 1.0 + tol.atol_spectral:
        raise NotContraction(f"||F|| = {scale:.6g} > 1")
    d = F.shape[0]
    Fa = F.conj().T
    # sqrt is not Lipschitz at 0: taking it in the Schur basis of F keeps D_F a
    # function of F even when several eigenvalues sit on the unit circle
    T, Z = scipy.linalg.schur(F, output="complex")
    defect = 1.0 - np.abs(np.diag(T)) ** 2
    # unimodular eigenvalues carry roundoff that sqrt would amplify to ~1e-8
    defect[np.abs(defect) <= 16 * np.finfo(float).eps] = 0.0
    DF = Z @ sqrt_psd(np.diag(defect), tol) @ Z.conj().T
    DF = 0.5 * (DF + DF.conj().T)
    w, X = np.linalg.eigh(np.eye(d) + DF)
    inv = (X / w) @ X.conj().T
    A0 = 0.5 * (np.eye(d) + DF)
    A1 = -0.5 * inv @ Fa @ Fa
    return FejerRieszPair(A0, A1, DF)


def verify_five_equations(F, pair: FejerRieszPair, tol: ToleranceProfile = DEFAULT_TOL) -> Verdict:
    """Residuals of the five operator equations a factor ``A0 + z A1`` must satisfy.

    ``A0^*A0 + A1^*A1 = I - (F^*F + FF^*)/4``, ``A0^*A1 = -F^{*2}/4``,
    ``F A0 = A0 F``, ``F A1 + F^* A0 = A0 F^* + A1 F`` and ``F^* A1 = A1 F^*``.
    """
    F = as_square(F)
    A0, A1 = as_square(pair.A0), as_square(pair.A1)
    if not (F.shape == A0.shape == A1.shape):
        raise ShapeError("F, A0 and A1 differ in size")
    Fa = F.conj().T
    eye = np.eye(F.shape[0])
    res = {
        "eq1_norm_split": opnorm(A0.conj().T @ A0 + A1.conj().T @ A1 - eye + 0.25 * (Fa @ F + F @ Fa)),
        "eq2_cross_term": opnorm(A0.conj().T @ A1 + 0.25 * Fa @ Fa),
        "eq3_F_A0": opnorm(F @ A0 - A0 @ F),
        "eq4_mixed": opnorm(F @ A1 + Fa @ A0 - A0 @ Fa - A1 @ F),
        "eq5_Fadj_A1": opnorm(Fa @ A1 - A1 @ Fa),
    }
    return Verdict.from_checks(
        {k: (v, tol.atol_identity, tol.boundary_band) for k, v in res.items()}, "fejer-riesz five equations"
    )


def build_pure_p_isometry(F, n: int, tol: ToleranceProfile = DEFAULT_TOL) -> HardyModel:
    """Truncations of ``(M_{A0 + z A1}, M_{F + z F^*}, M_z)`` for a normal contraction ``F``."""
    if n < 2:
        raise InvalidModelData("need n >= 2 for a non-empty window")
    F = as_square(F)
    pair = fejer_riesz_normal(F, tol)
    d = F.shape[0]
    ops = (
        multiplication_operator({0: pair.A0, 1: pair.A1}, n),
        multiplication_operator({0: F, 1: F.conj().T}, n),
        multiplication_operator({1: np.eye(d)}, n),
    )
    return HardyModel("pure-p-isometry", n, ops, _degree_window(n, d, n - 1), F)


def symmetrization_model(n: int) -> HardyModel:
    """``((M1 - M2)/2, M1 + M2, M1 M2)`` on two-variable polynomials of bidegree ``< (n, n)``.

    Ordered lexicographically in ``(deg1, deg2)``; the window is the span of
    monomials with both degrees ``<= n-2``.
    """
    if n < 2:
        raise InvalidModelData("need n >= 2")
    S, eye = truncated_shift(n), np.eye(n)
    M1, M2 = np.kron(S, eye), np.kron(eye, S)
    ops = tuple(TruncatedHardyOp(n, n, M, n - 1) for M in (0.5 * (M1 - M2), M1 + M2, M1 @ M2))
    i, j = np.divmod(np.arange(n * n), n)
    return HardyModel("symmetrization", n, ops, np.flatnonzero((i <= n - 2) & (j <= n - 2)))


_VERIFIERS = {
    "shift-tensor": quasi_p_unitary_check,
    "pure-p-isometry": p_isometry_check,
    "symmetrization": p_isometry_check,
}


def verify_model(kind: str, triple: OperatorTriple, tol: ToleranceProfile = DEFAULT_TOL) -> Verdict:
    """Windowed check of the identities a model of the given kind satisfies."""
    try:
        fn = _VERIFIERS[kind]
    except KeyError:
        raise InvalidInput(f"unknown model kind {kind!r}") from None
    return fn(triple, tol=tol)


@dataclass
class WoldResult:
    """Split of a truncated isometry into a recovered unitary part and the rest."""

    unitary_dim: int
    basis_unitary: np.ndarray
    basis_pure: np.ndarray
    certified: bool
    range_dims: list[int] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "unitary_dim": int(self.unitary_dim),
            "basis_unitary": matrix_to_json(self.basis_unitary),
            "basis_pure": matrix_to_json(self.basis_pure),
            "certified": bool(self.certified),
            "range_dims": [int(k) for k in self.range_dims],
        }


def _range_basis(A: np.ndarray, thr: float) -> np.ndarray:
    if A.shape[1] == 0:
        return A
    U, sv, _ = np.linalg.svd(A, full_matrices=False)
    return U[:, sv > thr]


def _complement(B: np.ndarray, m: int) -> np.ndarray:
    if B.shape[1] == 0:
        return np.eye(m, dtype=complex)
    if B.shape[1] == m:
        return np.zeros((m, 0), dtype=complex)
    return scipy.linalg.null_space(B.conj().T)


def wold_decompose(
    V,
    window: int,
    steps: int,
    tol: ToleranceProfile = DEFAULT_TOL,
    bandwidth: int = 1,
) -> WoldResult:
    """Recover the unitary part of a truncated isometry.

    The unitary part is ``range(V^steps)``, built one step at a time as
    ``orth(V B)`` with singular-value threshold ``atol_spectral``.  A
    truncated shift of order ``n`` is nilpotent, so ``steps >= n`` strips it
    entirely.

    Parameters
    ----------
    V : (M, M) array_like
        A contraction whose isometric defect ``I - V^* V`` has rank at most
        ``M // window``: one defect direction per shift chain of length
        ``window``.
    window : int
        Truncation order of the shift chains.
    steps : int
        Number of range steps.
    bandwidth : int
        Degree of ``V`` as a symbol (1 for a shift).

    Returns
    -------
    WoldResult
        ``certified`` holds when ``steps * bandwidth <= window``, one further
        step leaves the range dimension unchanged and ``V`` is unitary on the
        recovered subspace, which it reduces.

    Raises
    ------
    NotTruncatedIsometry
    """
    V = as_square(V)
    m = V.shape[0]
    if window < 1 or steps < 1:
        raise InvalidInput("window and steps must be positive")
    norm = opnorm(V)
    if norm > 1.0 + tol.atol_identity:
        raise NotTruncatedIsometry(f"||V|| = {norm:.6g} > 1")
    defect = np.linalg.eigvalsh(np.eye(m) - V.conj().T @ V)
    rank = int(np.sum(defect > tol.atol_spectral))
    if rank > m // window:
        raise NotTruncatedIsometry(f"isometric defect has rank {rank} > {m // window}")
    thr = tol.atol_spectral
    B = np.eye(m, dtype=complex)
    dims = [m]
    for _ in range(steps):
        B = _range_basis(V @ B, thr)
        dims.append(B.shape[1])
    k = B.shape[1]
    # one probe step beyond the budget confirms the range has stopped shrinking
    stable = _range_basis(V @ B, thr).shape[1] == k
    if k:
        C = B.conj().T @ V @ B
        leak = opnorm(V @ B - B @ C)
        unit = opnorm(C.conj().T @ C - np.eye(k))
        reducing = max(leak, unit, opnorm(V.conj().T @ B - B @ C.conj().T)) <= tol.identity(1.0) * 10
    else:
        reducing = True
    certified = steps * bandwidth <= window and stable and reducing
    return WoldResult(k, B, _complement(B, m), bool(certified), dims)


class WoldSplit(tuple):
    """``(quasi, pure)`` pair that also carries the underlying :class:`WoldResult`."""

    def __new__(cls, quasi: OperatorTriple, pure: OperatorTriple, wold: WoldResult, off_diagonal: float):
        self = super().__new__(cls, (quasi, pure))
        self.wold = wold
        self.off_diagonal = off_diagonal
        return self

    @property
    def quasi(self) -> OperatorTriple:
        return self[0]

    @property
    def pure(self) -> OperatorTriple:
        return self[1]


def _window_in(E: np.ndarray, B: np.ndarray, Bc: np.ndarray, thr: float) -> np.ndarray:
    """Coordinates, relative to ``B``, of ``range(E)`` intersected with ``range(B)``."""
    if E.shape[1] == 0 or B.shape[1] == 0:
        return np.zeros((B.shape[1], 0), dtype=complex)
    if Bc.shape[1] == 0:
        C = E
    else:
        _, sv, Vh = np.linalg.svd(Bc.conj().T @ E)
        sv = np.concatenate([sv, np.zeros(Vh.shape[0] - sv.size)])
        C = E @ Vh[sv <= thr].conj().T
    return _range_basis(B.conj().T @ C, thr)


def wold_triple_decompose(
    t: OperatorTriple,
    window: int,
    steps: int,
    tol: ToleranceProfile = DEFAULT_TOL,
) -> WoldSplit:
    """Split a truncated pentablock-isometry into a quasi-unitary and a pure part.

    Runs :func:`wold_decompose` on ``T3`` and compresses all three operators
    to the recovered unitary subspace and its complement.  The window of
    ``t`` (or, if absent, the isometric subspace of ``T3``) is intersected
    with each part.

    Raises
    ------
    InvalidModelData
        If ``t`` fails the windowed pentablock-isometry check.
    NotTruncatedIsometry
        Propagated from :func:`wold_decompose`.
    DecompositionInconsistent
        If the compressions between the two parts do not vanish.
    """
    E = t.window if t.window is not None else isometric_window(t.T3, tol)
    pre = p_isometry_check(t.with_window(E), tol)
    if not pre.is_member:
        raise InvalidModelData(f"not a pentablock-isometry on its window (worst {pre.worst_residual:.3e})")
    w = wold_decompose(t.T3, window, steps, tol)
    Bu, Bp = w.basis_unitary, w.basis_pure
    thr = tol.spectral(1.0)
    Eu = _window_in(E, Bu, Bp, thr)
    Ep = _window_in(E, Bp, Bu, thr)
    off = 0.0
    for T in t.ops:
        off = max(off, opnorm(Bp.conj().T @ T @ Bu @ Eu), opnorm(Bu.conj().T @ T @ Bp @ Ep))
    if off > tol.identity(t.scale):
        raise DecompositionInconsistent(f"off-diagonal compressions do not vanish ({off:.3e})")
    quasi = OperatorTriple(*(Bu.conj().T @ T @ Bu for T in t.ops), window=None if Eu.shape[1] == Bu.shape[1] else Eu)
    pure = OperatorTriple(*(Bp.conj().T @ T @ Bp for T in t.ops), window=Ep)
    return WoldSplit(quasi, pure, w, off)
