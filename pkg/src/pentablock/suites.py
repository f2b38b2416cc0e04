"""Seeded Monte Carlo suites, one per characterization being cross-checked.

Samples are processed in fixed chunks of :data:`CHUNK`; chunk ``c`` draws
from ``default_rng(SeedSequence([seed, c]))`` so the report depends only on
``(suite, samples, seed)``, never on the number of workers.
"""
from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np
import scipy.linalg

from .classify import OperatorTriple, p_isometry_check, p_unitary_check
from .errors import InvalidInput, NotInvariant
from .geometry import (
    PentaPoint,
    b_penta_characterizations,
    gamma_roots,
    _radius_beta,
    _radius_lambda,
    beta_of,
    pi_map,
    random_boundary_unitary,
    sample_pentablock,
    unitary_from_boundary,
    sup_psi_batch,
)
from .linalg_kernel import DEFAULT_TOL, ToleranceProfile, random_unitary
from .models import (
    fejer_riesz_normal,
    symmetrization_model,
    truncated_shift,
    verify_five_equations,
    wold_decompose,
)
from .multipliers import TrigMatrixPoly, blaschke_potapov, blh_converse_extract, blh_forward_check

__all__ = [
    "CHUNK",
    "SUITES",
    "RunReport",
    "run_suite",
    "random_disc_points",
    "random_normal_contraction",
    "planted_p_unitary",
    "perturb_p_unitary",
    "planted_wold",
    "planted_blh",
]

CHUNK = 1000


@dataclass
class RunReport:
    command: str
    seed: int
    samples: int
    pass_count: int
    fail_count: int
    inconclusive_count: int
    worst_residual: float
    elapsed_ms: int

    def to_json(self) -> dict:
        return asdict(self)


# -- generators ------------------------------------------------------------


def random_disc_points(count: int, rng: np.random.Generator, radius: float = 1.0) -> np.ndarray:
    """Uniform points of the closed disc of the given radius."""
    r = radius * np.sqrt(rng.uniform(0.0, 1.0, count))
    return r * np.exp(2j * np.pi * rng.uniform(0.0, 1.0, count))


def random_normal_contraction(d: int, rng: np.random.Generator, unimodular: float = 0.25) -> np.ndarray:
    """``W diag(lam) W^*`` with eigenvalues in the closed disc, some on the circle."""
    lam = random_disc_points(d, rng)
    on_circle = rng.uniform(size=d) < unimodular
    lam[on_circle] = lam[on_circle] / np.abs(lam[on_circle])
    W = random_unitary(d, rng)
    return (W * lam) @ W.conj().T


def planted_p_unitary(n: int, rng: np.random.Generator):
    """Diagonal distinguished-boundary tuples conjugated by a random unitary.

    Returns the triple, the diagonal points and the conjugating unitary.
    """
    pts = [pi_map(random_boundary_unitary(rng)) for _ in range(n)]
    Q = random_unitary(n, rng)
    return OperatorTriple.diagonal(pts).conjugate(Q), pts, Q


def perturb_p_unitary(pts, Q, rng: np.random.Generator) -> OperatorTriple:
    """Push one joint eigentuple off the distinguished boundary (still commuting normal)."""
    pts = list(pts)
    j = int(rng.integers(len(pts)))
    q = pts[j]
    delta = rng.uniform(0.01, 0.3)
    if abs(q.a) > 0.1:
        pts[j] = PentaPoint(q.a * (1 + delta) if rng.uniform() < 0.5 else q.a * (1 - delta), q.s, q.p)
    else:
        pts[j] = PentaPoint(q.a, q.s, q.p * (1 - delta))
    return OperatorTriple.diagonal(pts).conjugate(Q)


def planted_wold(rng: np.random.Generator, kmax: int = 5):
    """``Q (U + S_n (x) I_d) Q^*`` with ``dim U = k``.  Returns ``(V, k, n, Q)``."""
    k = int(rng.integers(0, kmax + 1))
    n = int(rng.integers(2, 9))
    d = int(rng.integers(1, 4))
    U = random_unitary(k, rng) if k else np.zeros((0, 0), dtype=complex)
    V = scipy.linalg.block_diag(U, np.kron(truncated_shift(n), np.eye(d)))
    Q = random_unitary(V.shape[0], rng)
    return Q @ V @ Q.conj().T, k, n, Q


def _fr_symbols(F):
    pair = fejer_riesz_normal(F)
    d = F.shape[0]
    phi1 = TrigMatrixPoly({0: pair.A0, 1: pair.A1}, d, d)
    phi2 = TrigMatrixPoly({0: F, 1: F.conj().T}, d, d)
    return phi1, phi2


def planted_blh(rng: np.random.Generator, invariant: bool = True):
    """``(theta, phi1, phi2)`` with ``theta H^2`` invariant under both symbols, or generically not.

    Invariant case: ``F = W D W^*`` normal, ``phi = (A0 + z A1, F + z F^*)``
    and ``theta`` a Blaschke-Potapov product of factors diagonal in the ``W``
    basis, optionally restricted to ``theta W_S V'`` for a coordinate subset
    ``S``.  Non-invariant case: ``F`` with distinct eigenvalues and generic
    factors.
    """
    d = int(rng.integers(2, 5))
    deg = int(rng.integers(1, 4))
    if invariant:
        W = random_unitary(d, rng)
        lam = random_disc_points(d, rng)
        F = (W * lam) @ W.conj().T
        factors = []
        for _ in range(deg):
            ph = np.exp(2j * np.pi * rng.uniform(size=d))
            mask = rng.uniform(size=d) < 0.5
            mask[int(rng.integers(d))] = False
            factors.append(((W * ph) @ W.conj().T, (W * mask) @ W.conj().T))
        theta = blaschke_potapov(factors)
        if rng.uniform() < 0.5:
            m = int(rng.integers(1, d + 1))
            S = rng.permutation(d)[:m]
            R = W[:, S] @ random_unitary(m, rng)
            theta = theta @ TrigMatrixPoly.constant(R)
    else:
        lam = 0.9 * np.exp(2j * np.pi * (np.arange(d) + rng.uniform(0, 0.5, d)) / d)
        W = random_unitary(d, rng)
        F = (W * lam) @ W.conj().T
        factors = []
        for _ in range(deg):
            Vb = random_unitary(d, rng)
            r = int(rng.integers(1, d))
            factors.append((random_unitary(d, rng), Vb[:, :r] @ Vb[:, :r].conj().T))
        theta = blaschke_potapov(factors)
    phi1, phi2 = _fr_symbols(F)
    return theta, phi1, phi2


# -- per-suite chunk runners -------------------------------------------------
# each returns (pass, fail, inconclusive, worst_residual)


def _chunk_thm21(rng, count, tol):
    pts = sample_pentablock(count, int(rng.integers(2**63)))
    half = count // 2
    extra = random_disc_points(count - half, rng, radius=1.5)
    pts = pts[:half] + [PentaPoint(a, q.s, q.p) for a, q in zip(extra, pts[half:])]
    sups = sup_psi_batch(pts)
    band = tol.boundary_band
    npass = nfail = ninc = 0
    worst = 0.0
    for q, sup in zip(pts, sups):
        r_beta = _radius_beta(q.s, beta_of(q.s, q.p, tol))
        r_lam = _radius_lambda(*gamma_roots(q.s, q.p))
        worst = max(worst, abs(r_beta - r_lam))
        margins = (r_beta - abs(q.a), r_lam - abs(q.a), 1.0 - sup)
        if any(abs(m) < band for m in margins):
            ninc += 1
            continue
        verdicts = {m >= -tol.atol_identity for m in margins}
        if len(verdicts) == 1:
            npass += 1
        else:
            nfail += 1
    return npass, nfail, ninc, worst


def _chunk_thm22(rng, count, tol):
    npass = nfail = 0
    worst = 0.0
    for _ in range(count):
        U = random_boundary_unitary(rng)
        q = pi_map(U)
        err = float(np.max(np.abs(unitary_from_boundary(q, tol) - U)))
        worst = max(worst, err)
        on = b_penta_characterizations(q, tol)
        off = b_penta_characterizations(PentaPoint(q.a, q.s, 0.95 * q.p), tol)
        if err <= 1e-10 and all(on.values()) and not any(off.values()):
            npass += 1
        else:
            nfail += 1
    return npass, nfail, 0, worst


_ROUTE_SIZES = (1, 2, 4, 8)


def _chunk_thm33(rng, count, tol):
    npass = nfail = ninc = 0
    worst = 0.0
    for i in range(count):
        n = _ROUTE_SIZES[i % len(_ROUTE_SIZES)]
        t, pts, Q = planted_p_unitary(n, rng)
        v = p_unitary_check(t, "all", tol)
        bad = perturb_p_unitary(pts, Q, rng)
        w = p_unitary_check(bad, "all", tol)
        worst = max(worst, v.worst_residual)
        if v.is_member and not w.is_member and not w.inconclusive:
            npass += 1
        elif v.inconclusive or w.inconclusive:
            ninc += 1
        else:
            nfail += 1
    return npass, nfail, ninc, worst


def _chunk_thm63(rng, count, tol):
    npass = nfail = 0
    worst = 0.0
    for _ in range(count):
        F = random_normal_contraction(int(rng.integers(1, 9)), rng)
        v = verify_five_equations(F, fejer_riesz_normal(F, tol), tol)
        worst = max(worst, v.worst_residual)
        if v.is_member:
            npass += 1
        else:
            nfail += 1
    return npass, nfail, 0, worst


def _chunk_example61(rng, count, tol):
    npass = nfail = 0
    worst = 0.0
    for _ in range(count):
        n = int(rng.integers(2, 17))
        v = p_isometry_check(symmetrization_model(n).triple, tol)
        worst = max(worst, v.worst_residual)
        if v.is_member and v.residuals["defect"] <= 1e-13:
            npass += 1
        else:
            nfail += 1
    return npass, nfail, 0, worst


def _chunk_wold(rng, count, tol):
    npass = nfail = 0
    worst = 0.0
    for _ in range(count):
        V, k, n, Q = planted_wold(rng)
        r = wold_decompose(V, n, n, tol)
        angle = 0.0
        if k and r.unitary_dim == k:
            angle = float(np.max(scipy.linalg.subspace_angles(r.basis_unitary, Q[:, :k])))
        worst = max(worst, angle)
        if r.unitary_dim == k and r.certified and angle <= 1e-6:
            npass += 1
        else:
            nfail += 1
    return npass, nfail, 0, worst


def _chunk_blh(rng, count, tol):
    npass = nfail = 0
    worst = 0.0
    for i in range(count):
        invariant = i % 2 == 0
        theta, phi1, phi2 = planted_blh(rng, invariant)
        try:
            psi1, psi2, v = blh_converse_extract(theta, phi1, phi2, tol=tol)
        except NotInvariant:
            ok = not invariant
        else:
            fwd = blh_forward_check(theta, psi1, psi2, phi1, phi2, tol=tol)
            worst = max(worst, v.residuals["negative_mass"], fwd.worst_residual)
            ok = invariant and v.is_member and fwd.is_member and v.residuals["negative_mass"] <= 1e-10
        if ok:
            npass += 1
        else:
            nfail += 1
    return npass, nfail, 0, worst


SUITES = {
    "thm21": _chunk_thm21,
    "thm22": _chunk_thm22,
    "thm33-routes": _chunk_thm33,
    "thm63": _chunk_thm63,
    "example61": _chunk_example61,
    "wold": _chunk_wold,
    "blh": _chunk_blh,
}


def _run_chunk(args):
    suite, seed, index, count, tol = args
    rng = np.random.default_rng(np.random.SeedSequence([seed, index]))
    return SUITES[suite](rng, count, tol)


def run_suite(
    suite: str, samples: int, seed: int = 0, tol: ToleranceProfile = DEFAULT_TOL, workers: int = 1
) -> RunReport:
    """Run a named suite and merge the chunk results.

    Raises
    ------
    InvalidInput
        Unknown suite, or ``samples < 1``.
    """
    if suite not in SUITES:
        raise InvalidInput(f"unknown suite {suite!r}; choose from {sorted(SUITES)}")
    if samples < 1:
        raise InvalidInput("samples must be >= 1")
    if seed < 0:
        raise InvalidInput("seed must be >= 0")
    start = time.perf_counter()
    jobs = [
        (suite, seed, c, min(CHUNK, samples - c * CHUNK), tol) for c in range((samples + CHUNK - 1) // CHUNK)
    ]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_run_chunk, jobs))
    else:
        parts = [_run_chunk(j) for j in jobs]
    p, f, i = (sum(x[k] for x in parts) for k in range(3))
    worst = max(x[3] for x in parts)
    elapsed = int(round(1000 * (time.perf_counter() - start)))
    return RunReport(suite, seed, samples, p, f, i, float(worst), elapsed)
