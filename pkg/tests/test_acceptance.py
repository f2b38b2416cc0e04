"""Acceptance suite: ten criteria at their stated tolerances.

Each criterion records one ``PASS``/``FAIL`` line; the lines are printed in
the pytest terminal summary and when this file is run as a script.
"""
import math
import time

import numpy as np
import pytest
import scipy.linalg
import scipy.optimize

from pentablock import geometry as g
from pentablock.classify import (
    OperatorTriple,
    gamma_isometry_check,
    gamma_unitary_check,
    lemma25_inequality_check,
    p_isometry_check,
    p_unitary_check,
    pointwise_symbol_check,
    quasi_p_unitary_check,
)
from pentablock.errors import NotInvariant
from pentablock.linalg_kernel import joint_diagonalize, numerical_radius, random_unitary
from pentablock.models import fejer_riesz_normal, symmetrization_model, verify_five_equations, wold_decompose
from pentablock.multipliers import TrigMatrixPoly, blh_converse_extract, blh_forward_check
from pentablock.suites import (
    perturb_p_unitary,
    planted_blh,
    planted_p_unitary,
    planted_wold,
    random_normal_contraction,
)

SEED = 20240611
BAND = 1e-7
RESULTS: dict[int, str] = {}


def record(k: int, ok: bool, detail: str) -> bool:
    RESULTS[k] = f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    print(RESULTS[k])
    return ok


def rng_for(k: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([SEED, k]))


def ginibre(n, rng):
    return (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)


def criterion_1():
    rng = rng_for(1)
    disagree = excluded = 0
    members = 0
    for i in range(10_000):
        G = ginibre(2, rng)
        A = G / np.linalg.norm(G, 2) * (1.0 if i % 10 == 0 else rng.uniform(0.05, 1.0))
        q = g.pi_map(A)
        if i % 2:
            # same (s, p), exterior or interior a
            q = g.PentaPoint(rng.uniform(0, 1.5) * np.exp(2j * np.pi * rng.uniform()), q.s, q.p)
        vs = (g.penta_membership(q), g.penta_membership_lambda(q), g.penta_membership_psi(q))
        if any(abs(v.margin) < BAND for v in vs):
            excluded += 1
            continue
        members += vs[0].in_set
        if len({v.in_set for v in vs}) != 1:
            disagree += 1
    return record(1, disagree == 0, f"disagreements={disagree} excluded={excluded} members={members}/10000")


def criterion_2():
    rng = rng_for(2)
    worst = 0.0
    for _ in range(1000):
        U = g.random_boundary_unitary(rng)
        worst = max(worst, float(np.max(np.abs(g.unitary_from_boundary(g.pi_map(U)) - U))))
    disagree = 0
    for q in g.sample_boundary(1000, SEED):
        for x in (q, g.PentaPoint(q.a, q.s, 0.95 * q.p)):
            if len(set(g.b_penta_characterizations(x).values())) != 1:
                disagree += 1
    ok = worst <= 1e-10 and disagree == 0
    return record(2, ok, f"round_trip={worst:.2e} characterization_disagreements={disagree}")


def criterion_3():
    rng = rng_for(3)
    routes = ("spectral", "algebraic", "block")
    bad_members = bad_rejects = 0
    for n in (1, 2, 4, 8):
        for i in range(200):
            t, pts, Q = planted_p_unitary(n, rng)
            bad_members += not all(p_unitary_check(t, r).is_member for r in routes)
            if i % 4 == 0:
                bad = perturb_p_unitary(pts, Q, rng)
                bad_rejects += any(p_unitary_check(bad, r).is_member for r in routes)
    ok = bad_members == 0 and bad_rejects == 0
    return record(3, ok, f"planted_missed={bad_members}/800 perturbed_accepted={bad_rejects}/200")


def criterion_4():
    rng = rng_for(4)
    worst = 0.0
    all_ok = True
    for _ in range(50):
        beta = np.exp(2j * np.pi * rng.uniform())
        c = np.conj(beta)
        symbols = [
            TrigMatrixPoly.from_list([[[beta / 2]], [[-c / 2]]]),
            TrigMatrixPoly.from_list([[[beta]], [[c]]]),
            TrigMatrixPoly.from_list([[[0]], [[1]]]),
        ]
        v = pointwise_symbol_check(symbols, grid=512)
        all_ok &= v.is_member
        worst = max(worst, v.residuals["fiber_identity"])
    return record(4, all_ok and worst <= 1e-12, f"fiber_identity={worst:.2e} over 50x512 nodes")


def criterion_5():
    rng = rng_for(5)
    worst = 0.0
    for _ in range(100):
        F = random_normal_contraction(int(rng.integers(1, 9)), rng)
        worst = max(worst, verify_five_equations(F, fejer_riesz_normal(F)).worst_residual)
    F = np.diag([1.0, 0.0])
    pair = fejer_riesz_normal(F)
    lhs = pair.A0.conj().T @ pair.A0 + pair.A1.conj().T @ pair.A1
    rhs = np.eye(2) - 0.25 * (F.conj().T @ F + F @ F.conj().T)
    exact = np.array_equal(lhs, np.diag([0.5, 1.0])) and np.array_equal(rhs, np.diag([0.5, 1.0]))
    return record(5, worst <= 1e-10 and exact, f"worst_residual={worst:.2e} diag(1,0)_exact={exact}")


def criterion_6():
    worst = 0.0
    for n in (2, 4, 8):
        T1, T2, T3 = (m for m in symmetrization_model(n).triple.ops)
        E = symmetrization_model(n).triple.window
        D = 0.25 * (2 * T1).conj().T @ (2 * T1) - (np.eye(n * n) - 0.25 * T2.conj().T @ T2)
        worst = max(worst, float(np.linalg.norm(D @ E, 2)))
    return record(6, worst <= 1e-13, f"windowed_defect={worst:.2e}")


def criterion_7():
    rng = rng_for(7)
    failures = 0
    worst = 0.0
    for _ in range(50):
        V, k, n, Q = planted_wold(rng)
        r = wold_decompose(V, window=n, steps=n)
        angle = 0.0
        if k and r.unitary_dim == k:
            angle = float(np.max(scipy.linalg.subspace_angles(r.basis_unitary, Q[:, :k])))
        worst = max(worst, angle)
        failures += not (r.unitary_dim == k and r.certified and angle <= 1e-6)
    return record(7, failures == 0, f"failures={failures}/50 worst_angle={worst:.2e}")


def criterion_8():
    rng = rng_for(8)
    bad_extract = bad_reject = 0
    worst = 0.0
    for _ in range(50):
        theta, phi1, phi2 = planted_blh(rng, invariant=True)
        try:
            psi1, psi2, v = blh_converse_extract(theta, phi1, phi2)
        except NotInvariant:
            bad_extract += 1
            continue
        fwd = blh_forward_check(theta, psi1, psi2, phi1, phi2)
        worst = max(worst, v.residuals["negative_mass"])
        bad_extract += not (v.is_member and fwd.is_member and v.residuals["negative_mass"] <= 1e-10)
    for _ in range(20):
        theta, phi1, phi2 = planted_blh(rng, invariant=False)
        try:
            blh_converse_extract(theta, phi1, phi2)
        except NotInvariant:
            continue
        bad_reject += 1
    ok = bad_extract == 0 and bad_reject == 0
    return record(8, ok, f"extraction_failures={bad_extract}/50 negative_mass={worst:.2e} accepted_non_invariant={bad_reject}/20")


def _checks(t):
    out = {"p_isometry": p_isometry_check(t), "quasi": quasi_p_unitary_check(t)}
    out["gamma_isometry"] = gamma_isometry_check(t.T2, t.T3, window=t.window)
    if t.window is None:
        out["p_unitary"] = p_unitary_check(t)
        out["gamma_unitary"] = gamma_unitary_check(t.T2, t.T3)
        out["lemma25"] = lemma25_inequality_check(t, zgrid=16)
    return out


def criterion_9():
    rng = rng_for(9)
    violations = 0
    drift_bound = 10 * 1e-9
    S = np.eye(6, k=-1, dtype=complex)
    shift_pair = OperatorTriple(0 * S, 2 * S, S @ S, window=np.arange(4))
    for i in range(100):
        n = int(rng.integers(1, 5))
        t, pts, Q = planted_p_unitary(n, rng)
        cases = [t, perturb_p_unitary(pts, Q, rng), shift_pair]
        for x in cases:
            W = random_unitary(x.n, rng)
            a, b = _checks(x), _checks(x.conjugate(W))
            for k in a:
                if a[k].is_member != b[k].is_member:
                    violations += 1
                for name, val in a[k].residuals.items():
                    if not name.startswith("spectral.") and abs(val - b[k].residuals[name]) > drift_bound * (1 + x.scale**2):
                        violations += 1
            if x.window is None and p_unitary_check(x).is_member != p_unitary_check(x.adjoint()).is_member:
                violations += 1
        t2, _, _ = planted_p_unitary(int(rng.integers(1, 4)), rng)
        for left, right in ((t, t2), (shift_pair, t)):
            c = _checks(left.direct_sum(right))
            lc, rc = _checks(left), _checks(right)
            # closure applies to checks both summands pass
            passing = [k for k in c if lc[k].is_member and k in rc and rc[k].is_member]
            violations += sum(not c[k].is_member for k in passing)
    return record(9, violations == 0, f"violations={violations} over 100 sweeps")


def criterion_10():
    A = np.array([[0, 2], [0, 0]], dtype=complex)
    theta = np.linspace(0, 2 * np.pi, 3600, endpoint=False)
    oracle = max(np.linalg.eigvalsh(0.5 * (np.exp(1j * t) * A + (np.exp(1j * t) * A).conj().T))[-1] for t in theta)
    w = numerical_radius(A)
    nr_ok = abs(w - 1) <= 1e-6 and abs(w - oracle) <= 1e-6
    rng = rng_for(10)
    worst = 0.0
    for n in range(1, 17):
        for _ in range(5):
            pool = rng.standard_normal((max(1, n // 2), 3)) + 1j * rng.standard_normal((max(1, n // 2), 3))
            tuples = pool[rng.integers(len(pool), size=n)]
            Q = random_unitary(n, rng)
            fam = [Q @ np.diag(tuples[:, i]) @ Q.conj().T for i in range(3)]
            _, got = joint_diagonalize(fam)
            got = np.array(got)
            cost = np.linalg.norm(got[:, None, :] - tuples[None, :, :], axis=2)
            r, c = scipy.optimize.linear_sum_assignment(cost)
            worst = max(worst, float(cost[r, c].max()))
    ok = nr_ok and worst <= 1e-8
    return record(10, ok, f"numerical_radius={w:.9f} oracle={oracle:.9f} multiset_error={worst:.2e}")


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
            criterion_6, criterion_7, criterion_8, criterion_9, criterion_10]


@pytest.mark.parametrize("criterion", CRITERIA, ids=[f"criterion_{k}" for k in range(1, 11)])
def test_criterion(criterion):
    assert criterion()


if __name__ == "__main__":
    for fn in CRITERIA:
        start = time.perf_counter()
        fn()
        print(f"             ({time.perf_counter() - start:.1f}s)")
