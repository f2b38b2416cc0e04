"""Scalar geometry of the symmetrized bidisc and the pentablock.

Points of C^3 are written ``(a, s, p)``.  The closed pentablock is the image
of the closed unit ball of 2x2 matrices under ``A -> (a21, tr A, det A)``;
it fibres over the closed symmetrized bidisc ``Gamma`` with discs
``|a| <= r(s, p)`` as fibres.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from . import _kernels
from .errors import InvalidInput, NotOnBoundary, OutsideGamma, PoleProximity, ShapeError
from .linalg_kernel import DEFAULT_TOL, ToleranceProfile, as_matrix

__all__ = [
    "PentaPoint",
    "GammaData",
    "MembershipVerdict",
    "pi_map",
    "gamma_roots",
    "gamma_data",
    "gamma_membership",
    "beta_of",
    "penta_membership",
    "penta_membership_lambda",
    "penta_membership_psi",
    "psi_z",
    "sup_psi",
    "sup_psi_batch",
    "b_penta_membership",
    "b_penta_characterizations",
    "unitary_from_boundary",
    "lambda_disc_scan",
    "sample_pentablock",
    "sample_boundary",
    "random_boundary_unitary",
    "cross_section",
    "cross_section_rows",
    "cross_section_csv",
    "cross_section_svg",
]


@dataclass(frozen=True)
class PentaPoint:
    a: complex
    s: complex
    p: complex

    def __post_init__(self):
        for name in ("a", "s", "p"):
            v = complex(getattr(self, name))
            if not (math.isfinite(v.real) and math.isfinite(v.imag)):
                raise InvalidInput(f"coordinate {name} is not finite")
            object.__setattr__(self, name, v)

    @cached_property
    def lambdas(self) -> tuple[complex, complex]:
        return gamma_roots(self.s, self.p)

    @cached_property
    def beta(self) -> complex:
        return beta_of(self.s, self.p)

    def conj(self) -> "PentaPoint":
        return PentaPoint(self.a.conjugate(), self.s.conjugate(), self.p.conjugate())

    def scaled(self, t: float) -> "PentaPoint":
        return PentaPoint(t * self.a, t * self.s, t * self.p)

    def to_json(self) -> dict:
        return {k: [v.real, v.imag] for k, v in (("a", self.a), ("s", self.s), ("p", self.p))}

    @classmethod
    def from_json(cls, obj) -> "PentaPoint":
        try:
            return cls(*(_complex_from_json(obj[k]) for k in ("a", "s", "p")))
        except (KeyError, TypeError) as exc:
            raise InvalidInput(f"malformed point: {exc}") from None


def _complex_from_json(v) -> complex:
    if isinstance(v, (list, tuple)):
        if len(v) != 2:
            raise InvalidInput("complex numbers are encoded as [re, im]")
        return complex(float(v[0]), float(v[1]))
    if isinstance(v, str):
        return complex(v.replace(" ", ""))
    if isinstance(v, (int, float)) and not isinstance(v, bool):
        return complex(v)
    raise InvalidInput(f"cannot read a complex number from {v!r}")


@dataclass(frozen=True)
class GammaData:
    s: complex
    p: complex
    beta: complex
    lambda1: complex
    lambda2: complex


@dataclass(frozen=True)
class MembershipVerdict:
    """Outcome of a set-membership test.

    ``margin`` is the signed slack of the deciding inequality (positive means
    strictly inside).  ``inconclusive`` is raised whenever the margin lies
    within the boundary band, whatever ``in_set`` says.
    """

    in_set: bool
    margin: float
    inconclusive: bool
    criterion_used: str

    def to_json(self) -> dict:
        return {
            "in_set": self.in_set,
            "margin": self.margin,
            "inconclusive": self.inconclusive,
            "criterion_used": self.criterion_used,
        }


def _verdict(margin: float, slack: float, criterion: str, tol: ToleranceProfile) -> MembershipVerdict:
    margin = float(margin)
    return MembershipVerdict(
        in_set=margin >= -slack,
        margin=margin,
        inconclusive=abs(margin) < tol.boundary_band,
        criterion_used=criterion,
    )


def pi_map(A) -> PentaPoint:
    """``A -> (a21, tr A, det A)`` for a 2x2 matrix."""
    M = as_matrix(A)
    if M.shape != (2, 2):
        raise ShapeError(f"pi_map needs a 2x2 matrix, got {M.shape}")
    return PentaPoint(M[1, 0], M[0, 0] + M[1, 1], M[0, 0] * M[1, 1] - M[0, 1] * M[1, 0])


def gamma_roots(s: complex, p: complex) -> tuple[complex, complex]:
    """Roots of ``z^2 - s z + p`` with the larger one first (cancellation-free)."""
    s, p = complex(s), complex(p)
    d = cmath.sqrt(s * s - 4 * p)
    q = s + d if abs(s + d) >= abs(s - d) else s - d
    l1 = q / 2
    if l1 == 0:
        return 0j, 0j
    return l1, p / l1


def gamma_membership(s: complex, p: complex, tol: ToleranceProfile = DEFAULT_TOL) -> MembershipVerdict:
    """Both roots of ``z^2 - s z + p`` in the closed unit disc.

    The slack is the boundary band: near a double root on the circle the
    roots are only accurate to about the square root of machine precision.
    """
    l1, l2 = gamma_roots(s, p)
    return _verdict(1.0 - max(abs(l1), abs(l2)), tol.boundary_band, "lambda_formula", tol)


def beta_of(s: complex, p: complex, tol: ToleranceProfile = DEFAULT_TOL) -> complex:
    """The ``beta`` with ``s = beta + conj(beta) p`` (``s/2`` on the collar ``|p| ~ 1``)."""
    s, p = complex(s), complex(p)
    ap = abs(p)
    if ap >= 1.0 - tol.boundary_band:
        return s / 2
    return (s - s.conjugate() * p) / (1.0 - ap * ap)


def gamma_data(s: complex, p: complex, tol: ToleranceProfile = DEFAULT_TOL) -> GammaData:
    l1, l2 = gamma_roots(s, p)
    return GammaData(complex(s), complex(p), beta_of(s, p, tol), l1, l2)


def _radius_beta(s: complex, beta: complex) -> float:
    b2 = min(abs(beta) ** 2, 1.0)
    return abs(1.0 - 0.5 * s * beta.conjugate() / (1.0 + math.sqrt(1.0 - b2)))


def _radius_lambda(l1: complex, l2: complex) -> float:
    return 0.5 * abs(1.0 - l2.conjugate() * l1) + 0.5 * math.sqrt(
        max(0.0, 1.0 - abs(l1) ** 2)
    ) * math.sqrt(max(0.0, 1.0 - abs(l2) ** 2))


def penta_membership(q: PentaPoint, tol: ToleranceProfile = DEFAULT_TOL) -> MembershipVerdict:
    """Closed-pentablock membership via the beta radius ``|1 - s conj(beta)/2 / (1 + sqrt(1-|beta|^2))|``."""
    g = gamma_membership(q.s, q.p, tol)
    if not g.in_set:
        return MembershipVerdict(False, g.margin, g.inconclusive, "beta_formula")
    r = _radius_beta(q.s, beta_of(q.s, q.p, tol))
    return _verdict(r - abs(q.a), tol.atol_identity, "beta_formula", tol)


def penta_membership_lambda(q: PentaPoint, tol: ToleranceProfile = DEFAULT_TOL) -> MembershipVerdict:
    """Same decision through the roots: ``|a| <= |1 - conj(l2) l1|/2 + sqrt((1-|l1|^2)(1-|l2|^2))/2``."""
    g = gamma_membership(q.s, q.p, tol)
    if not g.in_set:
        return MembershipVerdict(False, g.margin, g.inconclusive, "lambda_formula")
    l1, l2 = gamma_roots(q.s, q.p)
    return _verdict(_radius_lambda(l1, l2) - abs(q.a), tol.atol_identity, "lambda_formula", tol)


def psi_z(z: complex, q: PentaPoint) -> complex:
    """``a (1 - |z|^2) / (1 - s z + p z^2)`` for ``|z| < 1``."""
    z = complex(z)
    if not abs(z) < 1:
        raise InvalidInput("psi_z is defined on the open unit disc")
    den = 1 - q.s * z + q.p * z * z
    if abs(den) < 1e-14:
        raise PoleProximity(f"|1 - s z + p z^2| = {abs(den):.2e} at z = {z}")
    return q.a * (1 - abs(z) ** 2) / den


def sup_psi(q: PentaPoint) -> float:
    """Refined grid maximum of ``|psi_z(z, q)|`` over the open disc.

    Every candidate is an actual evaluation at an interior point, so the
    result never exceeds the true supremum.
    """
    return float(_kernels.psi_sup(q.a, q.s, q.p))


def sup_psi_batch(points: Sequence[PentaPoint]) -> np.ndarray:
    a = np.array([q.a for q in points], dtype=complex)
    s = np.array([q.s for q in points], dtype=complex)
    p = np.array([q.p for q in points], dtype=complex)
    return np.asarray(_kernels.psi_sup_batch(a, s, p))


def penta_membership_psi(q: PentaPoint, tol: ToleranceProfile = DEFAULT_TOL) -> MembershipVerdict:
    g = gamma_membership(q.s, q.p, tol)
    if not g.in_set:
        return MembershipVerdict(False, g.margin, g.inconclusive, "psi_sup")
    return _verdict(1.0 - sup_psi(q), tol.atol_identity, "psi_sup", tol)


def _boundary_residuals(q: PentaPoint) -> dict[str, float]:
    s, p, a = q.s, q.p, q.a
    return {
        "s_minus_conj_s_p": abs(s - s.conjugate() * p),
        "abs_p_minus_1": abs(abs(p) - 1.0),
        "abs_s_over_2": max(0.0, abs(s) - 2.0),
        "fiber_equality": abs(abs(a) ** 2 - 1.0 + abs(s) ** 2 / 4),
    }


def b_penta_membership(q: PentaPoint, tol: ToleranceProfile = DEFAULT_TOL) -> MembershipVerdict:
    """Distinguished boundary: ``(s,p)`` in bGamma and ``|a|^2 = 1 - |s|^2/4``.

    The margin is minus the largest equality residual.
    """
    worst = max(_boundary_residuals(q).values())
    return MembershipVerdict(
        in_set=worst <= tol.atol_identity,
        margin=-worst,
        inconclusive=tol.atol_identity < worst < tol.boundary_band,
        criterion_used="boundary_equalities",
    )


def _unitary_candidate(q: PentaPoint, tol: ToleranceProfile) -> np.ndarray:
    u11 = q.s / 2
    u12 = (q.s * q.s / 4 - q.p) / q.a if abs(q.a) > tol.boundary_band else 0j
    return np.array([[u11, u12], [q.a, u11]], dtype=complex)


def unitary_from_boundary(q: PentaPoint, tol: ToleranceProfile = DEFAULT_TOL) -> np.ndarray:
    """The unique unitary ``U`` with ``u11 = u22`` and ``pi_map(U) = q``."""
    if not b_penta_membership(q, tol).in_set:
        raise NotOnBoundary(f"{q} is not on the distinguished boundary")
    return _unitary_candidate(q, tol)


def _in_b_gamma(s: complex, p: complex, tol: ToleranceProfile) -> bool:
    return (
        abs(s - s.conjugate() * p) <= tol.atol_identity
        and abs(abs(p) - 1.0) <= tol.atol_identity
        and abs(s) <= 2.0 + tol.atol_identity
    )


def lambda_disc_scan(q: PentaPoint, n: int = 1024, tol: ToleranceProfile = DEFAULT_TOL) -> bool:
    """Check that ``{lambda : (lambda a, s, p) in closed P}`` is the closed unit disc.

    Samples roughly ``n`` nodes of the closed disc (boundary circle included)
    and, when ``a != 0``, a ring of points at radius ``1 + 10 * band`` that
    must fall outside.
    """
    if not _in_b_gamma(q.s, q.p, tol):
        return False
    n_r = max(2, int(math.sqrt(n) / 2))
    n_t = max(4, n // n_r)
    radii = np.linspace(0.0, 1.0, n_r)
    angles = 2 * np.pi * np.arange(n_t) / n_t
    for r in radii:
        for t in angles:
            lam = r * cmath.exp(1j * t)
            if not penta_membership(PentaPoint(lam * q.a, q.s, q.p), tol).in_set:
                return False
    if abs(q.a) > tol.atol_identity:
        for t in angles:
            lam = (1.0 + 10 * tol.boundary_band) * cmath.exp(1j * t)
            if penta_membership(PentaPoint(lam * q.a, q.s, q.p), tol).margin >= 0:
                return False
    return True


def b_penta_characterizations(q: PentaPoint, tol: ToleranceProfile = DEFAULT_TOL, n: int = 256) -> dict:
    """Evaluate four independent descriptions of the distinguished boundary.

    ``fiber_extreme``
        ``(s,p)`` in bGamma and ``|a|`` equals the fibre radius computed by
        the beta formula (``q`` sits on the rim of its fibre over bGamma).
    ``equalities``
        The defining equalities of :func:`b_penta_membership`.
    ``unitary``
        The explicit candidate matrix is unitary with ``pi_map(U) = q``.
    ``lambda_disc``
        :func:`lambda_disc_scan`.
    """
    in_bg = _in_b_gamma(q.s, q.p, tol)
    fiber = in_bg and abs(_radius_beta(q.s, beta_of(q.s, q.p, tol)) - abs(q.a)) <= tol.atol_identity
    U = _unitary_candidate(q, tol)
    image = pi_map(U)
    unitary = (
        np.linalg.norm(U.conj().T @ U - np.eye(2), 2) <= tol.identity(1.0)
        and abs(image.s - q.s) <= tol.atol_identity
        and abs(image.p - q.p) <= tol.atol_identity
    )
    return {
        "fiber_extreme": bool(fiber),
        "equalities": b_penta_membership(q, tol).in_set,
        "unitary": bool(unitary),
        "lambda_disc": lambda_disc_scan(q, n, tol),
    }


def sample_pentablock(count: int, seed: int) -> list[PentaPoint]:
    """``pi_map(G / (||G|| (1 + u)))`` for complex Gaussian 2x2 ``G`` and ``u ~ U(0,1)``."""
    if count < 1:
        raise InvalidInput("count must be >= 1")
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        G = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
        u = rng.uniform(0.0, 1.0)
        A = G / (np.linalg.norm(G, 2) * (1.0 + u))
        out.append(pi_map(A))
    return out


def random_boundary_unitary(rng: np.random.Generator) -> np.ndarray:
    """Random 2x2 unitary with equal diagonal entries.

    Every such matrix is ``e^{i phi/2} [[c, -conj(b)], [b, c]]`` with ``c``
    real and ``c^2 + |b|^2 = 1``.
    """
    phi = rng.uniform(0, 2 * np.pi)
    c = rng.uniform(-1.0, 1.0)
    b = math.sqrt(max(0.0, 1 - c * c)) * cmath.exp(1j * rng.uniform(0, 2 * np.pi))
    return cmath.exp(0.5j * phi) * np.array([[c, -b.conjugate()], [b, c]], dtype=complex)


def sample_boundary(count: int, seed: int) -> list[PentaPoint]:
    if count < 1:
        raise InvalidInput("count must be >= 1")
    rng = np.random.default_rng(seed)
    return [pi_map(random_boundary_unitary(rng)) for _ in range(count)]


def cross_section(s: complex, p: complex, tol: ToleranceProfile = DEFAULT_TOL) -> float:
    """Radius of the disc of admissible ``a`` over ``(s, p)``."""
    s, p = complex(s), complex(p)
    if not gamma_membership(s, p, tol).in_set:
        raise OutsideGamma(f"(s, p) = ({s}, {p}) is outside Gamma")
    return _radius_beta(s, beta_of(s, p, tol))


def cross_section_rows(nodes: Iterable[tuple[complex, complex]], tol: ToleranceProfile = DEFAULT_TOL):
    """``(s, p, radius)`` for every node lying in Gamma; other nodes are skipped."""
    for s, p in nodes:
        if gamma_membership(s, p, tol).in_set:
            yield complex(s), complex(p), cross_section(s, p, tol)


def cross_section_csv(rows) -> str:
    lines = ["s_re,s_im,p_re,p_im,radius"]
    for s, p, r in rows:
        lines.append(f"{s.real!r},{s.imag!r},{p.real!r},{p.imag!r},{r!r}")
    return "\n".join(lines) + "\n"


def cross_section_svg(s: complex, p: complex, tol: ToleranceProfile = DEFAULT_TOL, size: int = 400) -> str:
    """Single-fibre figure: the admissible ``a``-disc inside the unit circle."""
    r = cross_section(s, p, tol)
    c = size / 2
    scale = 0.45 * size
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">\n'
        f'  <title>fibre over s={s!r}, p={p!r}: radius {r!r}</title>\n'
        f'  <line x1="0" y1="{c}" x2="{size}" y2="{c}" stroke="#999" stroke-width="1"/>\n'
        f'  <line x1="{c}" y1="0" x2="{c}" y2="{size}" stroke="#999" stroke-width="1"/>\n'
        f'  <circle cx="{c}" cy="{c}" r="{scale:.6f}" fill="none" stroke="#333" '
        f'stroke-dasharray="4 3"/>\n'
        f'  <circle cx="{c}" cy="{c}" r="{scale * r:.6f}" fill="#4a7bd0" fill-opacity="0.35" '
        f'stroke="#1d3f7a"/>\n'
        f"</svg>\n"
    )
