"""Dense complex linear-algebra primitives.

Every operator in the package is a plain two-dimensional ``numpy`` array of
dtype ``complex128``.  This module supplies the handful of factorizations the
rest of the package relies on (norms, radii, polar decomposition, PSD square
roots, simultaneous diagonalization of commuting normal families) together
with the JSON encoding used for matrices on every external interface.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    InvalidInput,
    NotPSD,
    NotSimultaneouslyDiagonalizable,
    ShapeError,
)

__all__ = [
    "ToleranceProfile",
    "DEFAULT_TOL",
    "as_matrix",
    "as_square",
    "adjoint",
    "opnorm",
    "operator_norm",
    "spectral_radius",
    "numerical_radius",
    "polar_decompose",
    "sqrt_psd",
    "joint_diagonalize",
    "commutator",
    "normality_residual",
    "complete_basis",
    "orth",
    "random_unitary",
    "matrix_to_json",
    "matrix_from_json",
]


@dataclass(frozen=True)
class ToleranceProfile:
    """Absolute tolerances, applied relative to ``1 + ||input||``.

    Attributes
    ----------
    atol_identity : float
        Residual bound for operator identities.
    atol_spectral : float
        Eigenvalue / singular value clustering tolerance.
    boundary_band : float
        Half-width of the inconclusive band around decision thresholds.
    """

    atol_identity: float = 1e-9
    atol_spectral: float = 1e-8
    boundary_band: float = 1e-7

    def __post_init__(self):
        for name in ("atol_identity", "atol_spectral", "boundary_band"):
            value = getattr(self, name)
            if not (value >= 0 and math.isfinite(value)):
                raise InvalidInput(f"{name} must be a finite number >= 0, got {value!r}")

    def identity(self, scale: float = 0.0) -> float:
        return self.atol_identity * (1.0 + scale)

    def spectral(self, scale: float = 0.0) -> float:
        return self.atol_spectral * (1.0 + scale)

    def band(self, scale: float = 0.0) -> float:
        return self.boundary_band * (1.0 + scale)


DEFAULT_TOL = ToleranceProfile()


def as_matrix(A) -> np.ndarray:
    """Coerce to a finite 2-D complex array, raising on anything else."""
    M = np.asarray(A, dtype=complex)
    if M.ndim == 0:
        M = M.reshape(1, 1)
    if M.ndim != 2:
        raise ShapeError(f"expected a matrix, got array of shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise InvalidInput("matrix has non-finite entries")
    return M


def as_square(A) -> np.ndarray:
    M = as_matrix(A)
    if M.shape[0] != M.shape[1]:
        raise ShapeError(f"expected a square matrix, got shape {M.shape}")
    return M


def adjoint(A: np.ndarray) -> np.ndarray:
    return A.conj().T


def opnorm(A: np.ndarray) -> float:
    """Spectral norm that tolerates empty matrices (norm 0)."""
    if A.size == 0:
        return 0.0
    return float(np.linalg.norm(A, 2))


def operator_norm(A) -> float:
    """Largest singular value of ``A``."""
    return opnorm(as_matrix(A))


def spectral_radius(A) -> float:
    """Largest eigenvalue modulus of a square matrix."""
    M = as_square(A)
    if M.size == 0:
        return 0.0
    return float(np.max(np.abs(np.linalg.eigvals(M))))


def _lambda_max_re(A: np.ndarray, theta: np.ndarray) -> np.ndarray:
    """``lambda_max(Re(exp(i theta) A))`` for a vector of angles."""
    phase = np.exp(1j * np.asarray(theta, dtype=float))[:, None, None]
    H = 0.5 * (phase * A + np.conj(phase) * A.conj().T)
    return np.linalg.eigvalsh(H)[:, -1]


def numerical_radius(A, n_theta: int = 720, tol: float = 1e-13) -> float:
    """Numerical radius ``w(A) = max_theta lambda_max(Re(e^{i theta} A))``.

    A uniform grid of ``n_theta`` angles locates the best bracket, which is
    then refined by golden-section search.
    """
    M = as_square(A)
    if M.size == 0:
        return 0.0
    if n_theta < 720:
        raise InvalidInput("n_theta must be at least 720")
    grid = 2 * np.pi * np.arange(n_theta) / n_theta
    values = _lambda_max_re(M, grid)
    k = int(np.argmax(values))
    best = float(values[k])

    def f(t):
        return float(_lambda_max_re(M, np.array([t]))[0])

    h = 2 * np.pi / n_theta
    lo, hi = grid[k] - h, grid[k] + h
    invphi = (math.sqrt(5) - 1) / 2
    x1 = hi - invphi * (hi - lo)
    x2 = lo + invphi * (hi - lo)
    f1, f2 = f(x1), f(x2)
    while hi - lo > tol:
        if f1 < f2:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + invphi * (hi - lo)
            f2 = f(x2)
        else:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - invphi * (hi - lo)
            f1 = f(x1)
    return max(best, f1, f2)


def complete_basis(B: np.ndarray, n: int) -> np.ndarray:
    """Orthonormal completion of the columns of ``B`` to a basis of C^n.

    Standard basis vectors are Gram-Schmidt orthogonalized (twice) against
    ``B`` and the vectors already accepted, in index order, so the result is
    deterministic given ``B``'s span.
    """
    have = B.shape[1] if B.size else 0
    cols = [B[:, j] for j in range(have)]
    out = []
    for j in range(n):
        if have + len(out) == n:
            break
        v = np.zeros(n, dtype=complex)
        v[j] = 1.0
        for _ in range(2):
            for c in cols + out:
                v = v - c * np.vdot(c, v)
        nv = np.linalg.norm(v)
        if nv > 1e-3:
            out.append(v / nv)
    if not out:
        return np.zeros((n, 0), dtype=complex)
    return np.column_stack(out)


def orth(A: np.ndarray, rtol: float) -> np.ndarray:
    """Orthonormal basis for the range of ``A`` (singular values above ``rtol``)."""
    if A.size == 0:
        return np.zeros((A.shape[0], 0), dtype=complex)
    U, sv, _ = np.linalg.svd(A, full_matrices=False)
    r = int(np.sum(sv > rtol))
    return U[:, :r]


def polar_decompose(R, tol: ToleranceProfile = DEFAULT_TOL):
    """Polar decomposition ``R = V P`` with ``P = (R^* R)^{1/2}``.

    On ``ker(R)`` the factor ``V`` maps a Gram-Schmidt completion of
    ``ker(R)^perp`` onto a Gram-Schmidt completion of ``range(R)``, so ``V``
    is always unitary and is a deterministic function of ``R``.

    Returns
    -------
    V, P : ndarray
    """
    M = as_square(R)
    n = M.shape[0]
    if n == 0:
        return M.copy(), M.copy()
    W, sv, Vh = np.linalg.svd(M)
    r = int(np.sum(sv > tol.spectral(sv[0])))
    P = (Vh.conj().T * sv) @ Vh
    P = 0.5 * (P + P.conj().T)
    Wr = W[:, :r]
    Vr = Vh[:r].conj().T
    V = Wr @ Vr.conj().T
    if r < n:
        V = V + complete_basis(Wr, n) @ complete_basis(Vr, n).conj().T
    return V, P


def sqrt_psd(H, tol: ToleranceProfile = DEFAULT_TOL) -> np.ndarray:
    """Positive semidefinite square root of a Hermitian matrix.

    Eigenvalues in ``[-atol_spectral, 0)`` (relative) are clamped to zero.
    """
    M = as_square(H)
    if M.size == 0:
        return M.copy()
    scale = opnorm(M)
    if opnorm(M - M.conj().T) > tol.identity(scale):
        raise InvalidInput("matrix is not Hermitian")
    offdiag = M - np.diag(np.diag(M))
    if not np.any(offdiag):
        d = np.diag(M).real
        if np.any(d < -tol.spectral(scale)):
            raise NotPSD(f"smallest eigenvalue {d.min():.3e} is negative")
        return np.diag(np.sqrt(np.clip(d, 0.0, None))).astype(complex)
    w, X = np.linalg.eigh(0.5 * (M + M.conj().T))
    if w[0] < -tol.spectral(scale):
        raise NotPSD(f"smallest eigenvalue {w[0]:.3e} is negative")
    S = (X * np.sqrt(np.clip(w, 0.0, None))) @ X.conj().T
    return 0.5 * (S + S.conj().T)


def commutator(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    return A @ B - B @ A


def normality_residual(A: np.ndarray) -> float:
    return opnorm(A @ A.conj().T - A.conj().T @ A)


def _clusters(w: np.ndarray, thr: float):
    """Split sorted values into runs whose consecutive gaps are <= thr."""
    groups = [[0]]
    for i in range(1, len(w)):
        if w[i] - w[i - 1] <= thr:
            groups[-1].append(i)
        else:
            groups.append([i])
    return groups


def _refine(mats, basis, rng, thr, depth):
    k = basis.shape[1]
    if k <= 1:
        return basis
    restricted = [basis.conj().T @ A @ basis for A in mats]
    if all(opnorm(B - np.trace(B) / k * np.eye(k)) <= thr for B in restricted):
        return basis
    if depth > 64:
        raise NotSimultaneouslyDiagonalizable("degenerate block refinement did not terminate")
    c = rng.standard_normal(len(mats))
    d = rng.standard_normal(len(mats))
    H = sum(
        ci * 0.5 * (B + B.conj().T) + di * (B - B.conj().T) / 2j
        for ci, di, B in zip(c, d, restricted)
    )
    w, X = np.linalg.eigh(0.5 * (H + H.conj().T))
    blocks = []
    for idx in _clusters(w, thr):
        sub = basis @ X[:, idx]
        blocks.append(_refine(mats, sub, rng, thr, depth + 1) if len(idx) > 1 else sub)
    return np.hstack(blocks)


def joint_diagonalize(family: Sequence, tol: ToleranceProfile = DEFAULT_TOL, seed: int = 0):
    """Simultaneously diagonalize a commuting family of normal matrices.

    Parameters
    ----------
    family : sequence of square arrays, all the same size
    tol : ToleranceProfile
    seed : int
        Seed for the random real coefficients of the Hermitian combinations.

    Returns
    -------
    Q : ndarray
        Unitary whose columns are joint eigenvectors.
    eigentuples : list of tuple of complex
        ``eigentuples[j][i]`` is the eigenvalue of ``family[i]`` on ``Q[:, j]``.
    """
    mats = [as_square(A) for A in family]
    if not mats:
        raise InvalidInput("empty family")
    n = mats[0].shape[0]
    if any(A.shape != (n, n) for A in mats):
        raise ShapeError("family members differ in size")
    if n == 0:
        return np.zeros((0, 0), dtype=complex), []
    scale = max(opnorm(A) for A in mats)
    for i, A in enumerate(mats):
        res = normality_residual(A)
        if res > tol.identity(scale):
            raise NotSimultaneouslyDiagonalizable(f"member {i} is not normal (residual {res:.3e})")
        for j in range(i):
            res = opnorm(commutator(A, mats[j]))
            if res > tol.identity(scale):
                raise NotSimultaneouslyDiagonalizable(
                    f"members {j} and {i} do not commute (residual {res:.3e})"
                )
    rng = np.random.default_rng(seed)
    Q = _refine(mats, np.eye(n, dtype=complex), rng, tol.spectral(scale), 0)
    diags = []
    for A in mats:
        D = Q.conj().T @ A @ Q
        off = opnorm(D - np.diag(np.diag(D)))
        if off > tol.spectral(scale):
            raise NotSimultaneouslyDiagonalizable(f"off-diagonal residual {off:.3e}")
        diags.append(np.diag(D))
    tuples = [tuple(complex(d[j]) for d in diags) for j in range(n)]
    return Q, tuples


def random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary via QR of a complex Ginibre matrix."""
    Z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / math.sqrt(2)
    Qm, Rm = np.linalg.qr(Z)
    ph = np.diag(Rm) / np.abs(np.diag(Rm))
    return Qm * ph


def matrix_to_json(A) -> dict:
    """Encode as ``{"rows", "cols", "data": [[re, im], ...]}`` (row-major)."""
    M = np.asarray(A, dtype=complex)
    if M.ndim != 2:
        raise ShapeError("only matrices can be encoded")
    return {
        "rows": int(M.shape[0]),
        "cols": int(M.shape[1]),
        "data": [[float(z.real), float(z.imag)] for z in M.ravel()],
    }


def matrix_from_json(obj) -> np.ndarray:
    try:
        rows, cols, data = int(obj["rows"]), int(obj["cols"]), obj["data"]
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidInput(f"malformed matrix object: {exc}") from None
    if rows < 0 or cols < 0 or len(data) != rows * cols:
        raise InvalidInput("matrix data length does not match rows*cols")
    try:
        vals = np.array([complex(float(re), float(im)) for re, im in data], dtype=complex)
    except (TypeError, ValueError) as exc:
        raise InvalidInput(f"malformed matrix entry: {exc}") from None
    return as_matrix(vals.reshape(rows, cols))
