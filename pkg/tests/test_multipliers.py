import numpy as np
import pytest
from hypothesis import given, strategies as st

from pentablock.errors import GridTooCoarse, InvalidFactor, InvalidInput, NotAnalytic, NotInvariant, ShapeError
from pentablock.linalg_kernel import random_unitary
from pentablock.models import fejer_riesz_normal
from pentablock.multipliers import (
    CircleGrid,
    TrigMatrixPoly,
    blaschke_potapov,
    blh_converse_extract,
    blh_forward_check,
    eval_on_circle,
    fourier_coeffs,
    grid_for_degree,
    is_inner,
)
from pentablock.suites import planted_blh, random_normal_contraction

from conftest import ginibre

seeds = st.integers(0, 2**32 - 1)


def random_poly(rng, d, lo, hi):
    return TrigMatrixPoly({k: ginibre(d, rng) for k in range(lo, hi + 1)}, d, d)


def convolve(f, g):
    # oracle: schoolbook product of coefficient dictionaries
    out = {}
    for i, A in f.coeffs.items():
        for j, B in g.coeffs.items():
            out[i + j] = out.get(i + j, 0) + A @ B
    return out


def random_projection(d, r, rng):
    V = random_unitary(d, rng)[:, :r]
    return V @ V.conj().T


def z_poly(d):
    return TrigMatrixPoly.z_times(np.eye(d))


class TestPoly:
    def test_shapes(self):
        with pytest.raises(ShapeError):
            TrigMatrixPoly({0: np.eye(2), 1: np.eye(3)}, 2, 2)
        with pytest.raises(ShapeError):
            TrigMatrixPoly.constant(np.eye(2)) + TrigMatrixPoly.constant(np.eye(3))

    def test_degrees(self):
        f = TrigMatrixPoly({-1: np.eye(1), 2: np.eye(1)}, 1, 1)
        assert (f.kmin, f.kmax, f.analytic) == (-1, 2, False)
        assert z_poly(2).analytic and z_poly(2).degree == 1

    def test_product_against_oracle(self, rng):
        f, g = random_poly(rng, 2, -1, 2), random_poly(rng, 2, 0, 3)
        h = f @ g
        ref = convolve(f, g)
        assert set(h.coeffs) == set(ref)
        assert all(np.allclose(h.coeffs[k], ref[k], atol=1e-13) for k in ref)

    def test_adjoint_on_circle(self, rng):
        f = random_poly(rng, 2, -1, 2)
        z = np.exp(0.3j)
        assert np.allclose(f.adjoint()(z), f(z).conj().T)

    def test_json_roundtrip(self, rng):
        f = random_poly(rng, 2, -1, 1)
        g = TrigMatrixPoly.from_json(f.to_json())
        assert all(np.array_equal(f.coeffs[k], g.coeffs[k]) for k in f.coeffs)
        with pytest.raises(InvalidInput):
            TrigMatrixPoly.from_json({"bogus": 1})


class TestGrid:
    def test_grid(self):
        with pytest.raises(InvalidInput):
            CircleGrid(100)
        with pytest.raises(GridTooCoarse):
            CircleGrid(8).check_degree(4)
        CircleGrid(16).check_degree(7)
        assert grid_for_degree(3).size == 16
        assert grid_for_degree(40).size == 128

    def test_eval_examples(self, rng):
        C = ginibre(2, rng)
        cg = CircleGrid(16)
        vals = eval_on_circle(TrigMatrixPoly.constant(C), cg)
        assert np.allclose(vals, C[None])
        vals = eval_on_circle(z_poly(2), cg)
        assert np.allclose(vals, cg.nodes[:, None, None] * np.eye(2)[None])

    def test_eval_matches_direct(self, rng):
        f = random_poly(rng, 3, -2, 3)
        cg = CircleGrid(32)
        vals = eval_on_circle(f, cg)
        assert all(np.allclose(vals[j], f(z), atol=1e-12) for j, z in enumerate(cg.nodes))

    def test_fourier_examples(self, rng):
        cg = CircleGrid(32)
        f = fourier_coeffs(eval_on_circle(z_poly(2), cg), cg, (-4, 4))
        assert np.allclose(f.coeffs[1], np.eye(2), atol=1e-13)
        assert max(np.abs(C).max() for k, C in f.coeffs.items() if k != 1) <= 1e-13
        C = ginibre(2, rng)
        g = fourier_coeffs(eval_on_circle(TrigMatrixPoly.constant(C), cg), cg, (0, 0))
        assert np.allclose(g.coeffs[0], C)

    @given(seeds)
    def test_roundtrip(self, seed):
        rng = np.random.default_rng(seed)
        f = random_poly(rng, 2, -3, 3)
        cg = CircleGrid(16)
        g = fourier_coeffs(eval_on_circle(f, cg), cg, (-3, 3))
        assert all(np.allclose(g.coeffs[k], f.coeffs[k], atol=1e-12) for k in f.coeffs)

    def test_sandwich_against_oracle(self, rng):
        theta = random_poly(rng, 2, 0, 2)
        phi = random_poly(rng, 2, 0, 1)
        cg = CircleGrid(32)
        T, P = eval_on_circle(theta, cg), eval_on_circle(phi, cg)
        vals = np.conj(np.swapaxes(T, 1, 2)) @ P @ T
        got = fourier_coeffs(vals, cg, (-2, 3))
        ref = convolve(theta.adjoint(), convolve_poly(phi, theta))
        assert all(np.allclose(got.coeffs[k], ref[k], atol=1e-12) for k in ref)

    @given(seeds)
    def test_parseval(self, seed):
        rng = np.random.default_rng(seed)
        f = random_poly(rng, 2, 0, 4)
        cg = CircleGrid(16)
        vals = eval_on_circle(f, cg)
        lhs = sum(np.linalg.norm(C) ** 2 for C in f.coeffs.values())
        rhs = np.mean(np.linalg.norm(vals, axis=(1, 2)) ** 2)
        assert abs(lhs - rhs) <= 1e-12 * max(1.0, lhs)


def convolve_poly(f, g):
    ref = convolve(f, g)
    return TrigMatrixPoly(ref, f.fiber_in, f.fiber_out)


class TestInner:
    def test_examples(self, rng):
        assert is_inner(z_poly(2)).is_member
        U, P = random_unitary(3, rng), random_projection(3, 1, rng)
        assert is_inner(blaschke_potapov([(U, P)])).is_member
        assert not is_inner(TrigMatrixPoly.constant(0.5 * np.eye(2))).is_member
        with pytest.raises(NotAnalytic):
            is_inner(TrigMatrixPoly({-1: np.eye(1)}, 1, 1))

    def test_blaschke_potapov(self, rng):
        I, Z = np.eye(2), np.zeros((2, 2))
        assert blaschke_potapov([(I, I)]).coeffs.keys() == {0}
        f = blaschke_potapov([(I, Z)])
        assert np.allclose(f.coeffs[1], I) and not np.any(f.coeffs.get(0, 0))
        g = blaschke_potapov([(random_unitary(3, rng), random_projection(3, 1, rng)) for _ in range(2)])
        assert g.degree == 2 and is_inner(g).is_member

    def test_invalid_factor(self, rng):
        with pytest.raises(InvalidFactor):
            blaschke_potapov([(2 * np.eye(2), np.eye(2))])
        with pytest.raises(InvalidFactor):
            blaschke_potapov([(np.eye(2), np.array([[1, 1], [0, 0]]))])
        with pytest.raises(InvalidFactor):
            blaschke_potapov([])

    @given(seeds, st.integers(1, 4))
    def test_inner_preservation(self, seed, k):
        rng = np.random.default_rng(seed)
        d = 3
        f = blaschke_potapov(
            [(random_unitary(d, rng), random_projection(d, int(rng.integers(0, d + 1)), rng)) for _ in range(k)]
        )
        for size in (grid_for_degree(2 * f.degree).size, 64):
            assert is_inner(f, CircleGrid(size)).is_member


class TestBLH:
    def test_identity_theta(self, rng):
        F = random_normal_contraction(2, rng)
        pair = fejer_riesz_normal(F)
        phi1 = TrigMatrixPoly({0: pair.A0, 1: pair.A1}, 2, 2)
        phi2 = TrigMatrixPoly({0: F, 1: F.conj().T}, 2, 2)
        theta = z_poly(2)
        v = blh_forward_check(theta, phi1, phi2, phi1, phi2)
        assert v.is_member and v.worst_residual <= 1e-13
        psi1, psi2, w = blh_converse_extract(theta, phi1, phi2)
        assert w.is_member and w.residuals["negative_mass"] <= 1e-13
        assert np.allclose(psi1.coeffs[0], pair.A0) and np.allclose(psi2.coeffs[1], F.conj().T)

    def test_diagonal_planted(self, rng):
        theta = TrigMatrixPoly({0: np.diag([0, 1.0]), 1: np.diag([1.0, 0])}, 2, 2)
        F = np.diag(np.exp(2j * np.pi * rng.uniform(size=2)) * rng.uniform(0, 1, 2))
        pair = fejer_riesz_normal(F)
        phi1 = TrigMatrixPoly({0: pair.A0, 1: pair.A1}, 2, 2)
        phi2 = TrigMatrixPoly({0: F, 1: F.conj().T}, 2, 2)
        psi1, psi2, v = blh_converse_extract(theta, phi1, phi2)
        assert v.is_member
        assert np.allclose(psi1.coeffs[0], pair.A0, atol=1e-12)
        w = blh_forward_check(theta, psi1, psi2, phi1, phi2)
        assert w.is_member and w.worst_residual <= 1e-10
        bad = psi1 + TrigMatrixPoly.constant(0.01 * np.eye(2))
        assert not blh_forward_check(theta, bad, psi2, phi1, phi2).is_member

    @given(seeds)
    def test_roundtrip_planted(self, seed):
        theta, phi1, phi2 = planted_blh(np.random.default_rng(seed), invariant=True)
        psi1, psi2, v = blh_converse_extract(theta, phi1, phi2)
        assert v.is_member and v.residuals["negative_mass"] <= 1e-10
        w = blh_forward_check(theta, psi1, psi2, phi1, phi2)
        assert w.is_member and w.worst_residual <= 10 * 1e-9 * (1 + 2)

    @given(seeds)
    def test_non_invariant(self, seed):
        theta, phi1, phi2 = planted_blh(np.random.default_rng(seed), invariant=False)
        with pytest.raises(NotInvariant) as exc:
            blh_converse_extract(theta, phi1, phi2)
        assert exc.value.negative_mass > 1e-9

    def test_symbol_level_identity(self, rng):
        for _ in range(10):
            F = random_normal_contraction(3, rng)
            pair = fejer_riesz_normal(F)
            phi1 = eval_on_circle(TrigMatrixPoly({0: pair.A0, 1: pair.A1}, 3, 3), CircleGrid(64))
            phi2 = eval_on_circle(TrigMatrixPoly({0: F, 1: F.conj().T}, 3, 3), CircleGrid(64))
            for x in np.eye(3):
                lhs = np.linalg.norm(phi1 @ x, axis=1) ** 2
                rhs = 1 - 0.25 * np.linalg.norm(phi2 @ x, axis=1) ** 2
                assert np.max(np.abs(lhs - rhs)) <= 1e-10

    def test_non_inner_rejected(self):
        phi = TrigMatrixPoly.constant(np.eye(1))
        with pytest.raises(InvalidInput):
            blh_converse_extract(TrigMatrixPoly.constant(0.5 * np.eye(1)), phi, phi)
