"""Matrix-valued polynomials on the unit circle and multiplier checks.

A :class:`TrigMatrixPoly` stores finitely many coefficients ``C_k`` of
``f(z) = sum_k z^k C_k``.  Analytic polynomials (no negative degrees) are
the multiplier symbols of operators on vector-valued Hardy space; the
Beurling-Lax-Halmos checks below work at symbol level, on a grid of roots of
unity large enough that no degree in play aliases.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import GridTooCoarse, InvalidFactor, InvalidInput, NotAnalytic, NotInvariant, ShapeError
from .linalg_kernel import DEFAULT_TOL, ToleranceProfile, as_matrix, matrix_from_json, matrix_to_json, opnorm
from .verdict import Verdict

__all__ = [
    "TrigMatrixPoly",
    "CircleGrid",
    "grid_for_degree",
    "eval_on_circle",
    "fourier_coeffs",
    "is_inner",
    "blaschke_potapov",
    "blh_forward_check",
    "blh_converse_extract",
]


@dataclass
class TrigMatrixPoly:
    """``sum_k z^k C_k`` with every ``C_k`` of shape ``(fiber_out, fiber_in)``."""

    coeffs: dict[int, np.ndarray]
    fiber_in: int
    fiber_out: int

    def __post_init__(self):
        clean = {}
        for k, C in self.coeffs.items():
            M = as_matrix(C)
            if M.shape != (self.fiber_out, self.fiber_in):
                raise ShapeError(
                    f"coefficient of degree {k} has shape {M.shape}, "
                    f"expected {(self.fiber_out, self.fiber_in)}"
                )
            clean[int(k)] = M
        self.coeffs = dict(sorted(clean.items()))

    @classmethod
    def from_list(cls, mats: Sequence, start: int = 0) -> "TrigMatrixPoly":
        mats = [as_matrix(C) for C in mats]
        out, inn = mats[0].shape
        return cls({start + k: C for k, C in enumerate(mats)}, inn, out)

    @classmethod
    def constant(cls, C) -> "TrigMatrixPoly":
        return cls.from_list([C])

    @classmethod
    def z_times(cls, C) -> "TrigMatrixPoly":
        return cls.from_list([C], start=1)

    @property
    def kmin(self) -> int:
        return min(self.coeffs, default=0)

    @property
    def kmax(self) -> int:
        return max(self.coeffs, default=0)

    @property
    def degree(self) -> int:
        """Largest ``|k|`` carrying a coefficient."""
        return max((abs(k) for k in self.coeffs), default=0)

    @property
    def analytic(self) -> bool:
        return self.kmin >= 0

    def __call__(self, z) -> np.ndarray:
        z = complex(z)
        out = np.zeros((self.fiber_out, self.fiber_in), dtype=complex)
        for k, C in self.coeffs.items():
            out = out + z**k * C
        return out

    def _binary(self, other, sign):
        if (self.fiber_in, self.fiber_out) != (other.fiber_in, other.fiber_out):
            raise ShapeError("fiber dimensions differ")
        coeffs = dict(self.coeffs)
        for k, C in other.coeffs.items():
            coeffs[k] = coeffs.get(k, 0) + sign * C
        return TrigMatrixPoly(coeffs, self.fiber_in, self.fiber_out)

    def __add__(self, other):
        return self._binary(other, 1)

    def __sub__(self, other):
        return self._binary(other, -1)

    def __mul__(self, c):
        return TrigMatrixPoly({k: c * C for k, C in self.coeffs.items()}, self.fiber_in, self.fiber_out)

    __rmul__ = __mul__

    def __matmul__(self, other: "TrigMatrixPoly") -> "TrigMatrixPoly":
        if self.fiber_in != other.fiber_out:
            raise ShapeError("inner fiber dimensions differ")
        coeffs: dict[int, np.ndarray] = {}
        for j, A in self.coeffs.items():
            for k, B in other.coeffs.items():
                coeffs[j + k] = coeffs.get(j + k, 0) + A @ B
        return TrigMatrixPoly(coeffs, other.fiber_in, self.fiber_out)

    def adjoint(self) -> "TrigMatrixPoly":
        """Pointwise adjoint on the circle: ``f(z)^* = sum_k z^{-k} C_k^*``."""
        return TrigMatrixPoly({-k: C.conj().T for k, C in self.coeffs.items()}, self.fiber_out, self.fiber_in)

    def band(self, lo: int, hi: int) -> "TrigMatrixPoly":
        return TrigMatrixPoly(
            {k: C for k, C in self.coeffs.items() if lo <= k <= hi}, self.fiber_in, self.fiber_out
        )

    def to_json(self) -> dict:
        return {
            "fiber_in": self.fiber_in,
            "fiber_out": self.fiber_out,
            "coeffs": {str(k): matrix_to_json(C) for k, C in self.coeffs.items()},
        }

    @classmethod
    def from_json(cls, obj) -> "TrigMatrixPoly":
        try:
            coeffs = {int(k): matrix_from_json(v) for k, v in obj["coeffs"].items()}
            return cls(coeffs, int(obj["fiber_in"]), int(obj["fiber_out"]))
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, InvalidInput):
                raise
            raise InvalidInput(f"malformed polynomial: {exc}") from None


@dataclass(frozen=True)
class CircleGrid:
    """The ``size``-th roots of unity ``exp(2 pi i j / size)``."""

    size: int = 512
    nodes: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        n = int(self.size)
        if n < 2 or n & (n - 1):
            raise InvalidInput(f"grid size must be a power of two >= 2, got {n}")
        object.__setattr__(self, "nodes", np.exp(2j * np.pi * np.arange(n) / n))

    def check_degree(self, degree: int):
        if self.size < 2 * degree + 2:
            raise GridTooCoarse(f"grid of size {self.size} cannot resolve degree {degree}")


def grid_for_degree(degree: int, minimum: int = 16) -> CircleGrid:
    """Smallest power-of-two grid satisfying the alias bound for ``degree``."""
    need = max(minimum, 2 * degree + 2)
    return CircleGrid(1 << (need - 1).bit_length())


def eval_on_circle(f: TrigMatrixPoly, grid: CircleGrid) -> np.ndarray:
    """Values at every node, stacked as an array of shape ``(size, out, in)``."""
    grid.check_degree(f.degree)
    n = grid.size
    c = np.zeros((n, f.fiber_out, f.fiber_in), dtype=complex)
    for k, C in f.coeffs.items():
        c[k % n] += C
    return n * np.fft.ifft(c, axis=0)


def fourier_coeffs(values, grid: CircleGrid, band: tuple[int, int]) -> TrigMatrixPoly:
    """Discrete Fourier coefficients ``C_k`` for ``band[0] <= k <= band[1]``."""
    vals = np.asarray(values, dtype=complex)
    if vals.ndim == 1:
        vals = vals[:, None, None]
    n = grid.size
    if vals.shape[0] != n:
        raise ShapeError(f"expected {n} values, got {vals.shape[0]}")
    lo, hi = band
    if hi < lo:
        raise InvalidInput("empty band")
    if hi - lo + 1 > n:
        raise GridTooCoarse(f"band [{lo}, {hi}] does not fit a grid of size {n}")
    c = np.fft.fft(vals, axis=0) / n
    return TrigMatrixPoly({k: c[k % n] for k in range(lo, hi + 1)}, vals.shape[2], vals.shape[1])


def _sup(values: np.ndarray) -> float:
    if values.size == 0:
        return 0.0
    return float(np.max(np.linalg.norm(values, 2, axis=(1, 2))))


def _eye_like(values: np.ndarray) -> np.ndarray:
    return np.eye(values.shape[-1], dtype=complex)[None]


def is_inner(theta: TrigMatrixPoly, grid: CircleGrid | None = None, tol: ToleranceProfile = DEFAULT_TOL) -> Verdict:
    """``Theta(z)^* Theta(z) = I`` at every node of the grid."""
    if not theta.analytic:
        raise NotAnalytic("inner functions are analytic")
    grid = grid or grid_for_degree(2 * theta.degree)
    grid.check_degree(2 * theta.degree)
    V = eval_on_circle(theta, grid)
    res = _sup(np.conj(np.swapaxes(V, 1, 2)) @ V - _eye_like(V))
    return Verdict.from_checks({"isometry_defect": (res, tol.identity(1.0), tol.band(1.0))}, "inner")


def _check_unitary(U, tol):
    return opnorm(U.conj().T @ U - np.eye(U.shape[0])) <= tol.identity(1.0)


def _check_projection(P, tol):
    return opnorm(P @ P - P) <= tol.identity(1.0) and opnorm(P - P.conj().T) <= tol.identity(1.0)


def blaschke_potapov(factors, tol: ToleranceProfile = DEFAULT_TOL) -> TrigMatrixPoly:
    """Product ``prod_i U_i (P_i + z (I - P_i))`` of Blaschke-Potapov factors.

    Parameters
    ----------
    factors : sequence of (U, P)
        ``U`` unitary, ``P`` an orthogonal projection, all of one size.
    """
    factors = list(factors)
    if not factors:
        raise InvalidFactor("at least one factor is required")
    d = None
    out = None
    for U, P in factors:
        U, P = as_matrix(U), as_matrix(P)
        if d is None:
            d = U.shape[0]
        if U.shape != (d, d) or P.shape != (d, d):
            raise InvalidFactor("factor shapes differ")
        if not _check_unitary(U, tol):
            raise InvalidFactor("U is not unitary")
        if not _check_projection(P, tol):
            raise InvalidFactor("P is not an orthogonal projection")
        f = TrigMatrixPoly({0: U @ P, 1: U @ (np.eye(d) - P)}, d, d)
        out = f if out is None else out @ f
    return TrigMatrixPoly({k: C for k, C in out.coeffs.items() if np.any(C)} or {0: out.coeffs[0]}, d, d)


def _adj(V):
    return np.conj(np.swapaxes(V, 1, 2))


def blh_forward_check(
    theta: TrigMatrixPoly,
    psi1: TrigMatrixPoly,
    psi2: TrigMatrixPoly,
    phi1: TrigMatrixPoly,
    phi2: TrigMatrixPoly,
    grid: CircleGrid | None = None,
    tol: ToleranceProfile = DEFAULT_TOL,
) -> Verdict:
    """Check ``Theta psi_j = phi_j Theta`` and that ``(psi1, psi2, z)`` is a pure P-isometry symbol.

    Residuals are maxima over the grid nodes of

    * ``intertwine_j``: ``||Theta psi_j - phi_j Theta||``
    * ``psi_commute``: ``||psi1 psi2 - psi2 psi1||``
    * ``gamma_symbol``: ``||psi2 - psi2^* z||``
    * ``psi2_norm``: ``max(0, ||psi2|| - 2)``
    * ``defect``: ``||psi1^* psi1 - I + psi2^* psi2 / 4||``
    * ``theta_inner``: ``||Theta^* Theta - I||``
    """
    for name, f in (("theta", theta), ("psi1", psi1), ("psi2", psi2), ("phi1", phi1), ("phi2", phi2)):
        if not f.analytic:
            raise NotAnalytic(f"{name} has negative-degree coefficients")
    d, dp = theta.fiber_out, theta.fiber_in
    for f in (psi1, psi2):
        if (f.fiber_out, f.fiber_in) != (dp, dp):
            raise ShapeError("psi_j must act on the domain fiber of theta")
    for f in (phi1, phi2):
        if (f.fiber_out, f.fiber_in) != (d, d):
            raise ShapeError("phi_j must act on the range fiber of theta")
    deg = max(
        theta.degree + max(psi1.degree, psi2.degree, phi1.degree, phi2.degree),
        2 * max(psi1.degree, psi2.degree) + 1,
        2 * theta.degree,
    )
    grid = grid or grid_for_degree(deg)
    grid.check_degree(deg)
    T, P1, P2, F1, F2 = (eval_on_circle(f, grid) for f in (theta, psi1, psi2, phi1, phi2))
    z = grid.nodes[:, None, None]
    scale = max(_sup(P1), _sup(P2), _sup(F1), _sup(F2), 1.0)
    eye = np.eye(dp)[None]
    checks = {
        "intertwine_1": _sup(T @ P1 - F1 @ T),
        "intertwine_2": _sup(T @ P2 - F2 @ T),
        "psi_commute": _sup(P1 @ P2 - P2 @ P1),
        "gamma_symbol": _sup(P2 - _adj(P2) * z),
        "psi2_norm": max(0.0, _sup(P2) - 2.0),
        "defect": _sup(_adj(P1) @ P1 - eye + 0.25 * _adj(P2) @ P2),
        "theta_inner": _sup(_adj(T) @ T - np.eye(dp)[None]),
    }
    return Verdict.from_checks(
        {k: (v, tol.identity(scale), tol.band(scale)) for k, v in checks.items()},
        "beurling-lax-halmos forward",
    )


def blh_converse_extract(
    theta: TrigMatrixPoly,
    phi1: TrigMatrixPoly,
    phi2: TrigMatrixPoly,
    grid: CircleGrid | None = None,
    band: int | None = None,
    tol: ToleranceProfile = DEFAULT_TOL,
):
    """Recover ``psi_j = Theta^* phi_j Theta`` for an inner ``Theta``.

    ``Theta H^2`` is invariant under ``M_{phi_j}`` exactly when the boundary
    function ``Theta^* phi_j Theta`` is analytic, so any Fourier mass at
    negative degrees signals a non-invariant subspace.

    Returns
    -------
    psi1, psi2 : TrigMatrixPoly
        Coefficients of degree ``0..band``.
    verdict : Verdict
        ``negative_mass``, ``truncation_mass`` and the residuals of
        :func:`blh_forward_check` on the extracted pair.

    Raises
    ------
    NotInvariant
        If the negative-degree mass exceeds ``atol_identity``.
    """
    for name, f in (("theta", theta), ("phi1", phi1), ("phi2", phi2)):
        if not f.analytic:
            raise NotAnalytic(f"{name} has negative-degree coefficients")
    if (phi1.fiber_in, phi1.fiber_out) != (theta.fiber_out,) * 2 or (phi2.fiber_in, phi2.fiber_out) != (
        theta.fiber_out,
    ) * 2:
        raise ShapeError("phi_j must act on the range fiber of theta")
    dt = theta.degree
    dphi = max(phi1.degree, phi2.degree)
    lo, hi = -dt, dt + dphi
    band = hi if band is None else int(band)
    grid = grid or grid_for_degree(hi - lo)
    grid.check_degree(hi - lo)
    inner = is_inner(theta, grid_for_degree(2 * dt, minimum=grid.size), tol)
    if not inner.is_member:
        raise InvalidInput(f"theta is not inner (defect {inner.residuals['isometry_defect']:.3e})")
    T = eval_on_circle(theta, grid)
    scale = 1.0
    psis = []
    neg = trunc = 0.0
    for phi in (phi1, phi2):
        Fv = eval_on_circle(phi, grid)
        scale = max(scale, _sup(Fv))
        full = fourier_coeffs(_adj(T) @ Fv @ T, grid, (lo, hi))
        neg = max(neg, max((opnorm(C) for k, C in full.coeffs.items() if k < 0), default=0.0))
        trunc = max(trunc, max((opnorm(C) for k, C in full.coeffs.items() if k > band), default=0.0))
        psis.append(full.band(0, band))
    if neg > tol.identity(scale):
        err = NotInvariant(f"Theta^* phi Theta has negative Fourier mass {neg:.3e}")
        err.negative_mass = neg
        raise err
    forward = blh_forward_check(theta, psis[0], psis[1], phi1, phi2, tol=tol)
    checks = {
        "negative_mass": (neg, tol.identity(scale), tol.band(scale)),
        "truncation_mass": (trunc, tol.identity(scale), tol.band(scale)),
    }
    for k, v in forward.residuals.items():
        checks[k] = (v, tol.identity(scale), tol.band(scale))
    return psis[0], psis[1], Verdict.from_checks(checks, "beurling-lax-halmos converse")
