import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from pentablock import geometry as g
from pentablock.classify import (
    OperatorTriple,
    commutator_residual,
    gamma_isometry_check,
    gamma_unitary_check,
    isometric_window,
    lemma25_inequality_check,
    lemma25_min_eigenvalue,
    p_isometry_check,
    p_unitary_check,
    pointwise_symbol_check,
    quasi_p_unitary_check,
)
from pentablock.errors import InvalidInput, NotCommuting, NotNormal, ShapeError, Unsupported
from pentablock.linalg_kernel import random_unitary
from pentablock.models import truncated_shift
from pentablock.multipliers import TrigMatrixPoly
from pentablock.suites import perturb_p_unitary, planted_p_unitary

from conftest import ginibre

seeds = st.integers(0, 2**32 - 1)
ROUTES = ["spectral", "algebraic", "block", "all"]


def diag_unitary(n, rng):
    return np.diag(np.exp(2j * np.pi * rng.uniform(size=n)))


def shifted(n, k=2):
    """Truncated shift together with the window on which ``V^k`` is exact."""
    return truncated_shift(n).astype(complex), np.arange(n - k)


class TestTriple:
    def test_shapes_and_window(self):
        with pytest.raises(ShapeError):
            OperatorTriple(np.eye(2), np.eye(3), np.eye(2))
        with pytest.raises(InvalidInput):
            OperatorTriple(np.eye(2), np.eye(2), np.eye(2), window=[5])
        t = OperatorTriple(np.eye(3), np.eye(3), np.eye(3), window=[0, 2])
        assert t.window.shape == (3, 2)

    def test_json_roundtrip(self, rng):
        t, _, _ = planted_p_unitary(3, rng)
        u = OperatorTriple.from_json(t.to_json())
        assert all(np.array_equal(a, b) for a, b in zip(t.ops, u.ops))
        w = OperatorTriple.from_json(t.with_window([0, 1]).to_json())
        assert np.array_equal(w.window, t.with_window([0, 1]).window)
        with pytest.raises(InvalidInput):
            OperatorTriple.from_json({"T1": [[1]]})

    def test_isometric_window(self):
        V, _ = shifted(5)
        assert isometric_window(V).shape == (5, 4)


class TestGamma:
    def test_unitary_examples(self, rng):
        U = random_unitary(3, rng)
        assert gamma_unitary_check(0 * U, U).is_member
        assert gamma_unitary_check(2 * U, U @ U).is_member
        v = gamma_unitary_check(2 * U, U)
        assert not v.is_member
        assert v.residuals["S_minus_adjS_P"] > 1e-3

    def test_isometry_examples(self):
        V, w = shifted(6)
        assert gamma_isometry_check(0 * V, V, window=np.arange(5)).is_member
        assert gamma_isometry_check(2 * V, V @ V, window=w).is_member
        assert not gamma_isometry_check(2.5 * np.eye(2), np.eye(2)).is_member

    def test_non_commuting(self):
        with pytest.raises(NotCommuting):
            gamma_unitary_check(np.array([[0, 1], [0, 0]]), np.array([[0, 0], [1, 0]]))


class TestPUnitary:
    @pytest.mark.parametrize("route", ROUTES)
    def test_scalar_boundary_point(self, route):
        assert p_unitary_check(OperatorTriple.scalar(0.5, math.sqrt(3), 1), route).is_member

    @pytest.mark.parametrize("n", [1, 2, 4, 8])
    def test_planted_routes_agree(self, n):
        rng = np.random.default_rng(n)
        for _ in range(20):
            t, pts, Q = planted_p_unitary(n, rng)
            for route in ROUTES:
                assert p_unitary_check(t, route).is_member
            bad = perturb_p_unitary(pts, Q, rng)
            for route in ROUTES:
                assert not p_unitary_check(bad, route).is_member

    def test_shift_tensor_is_not_unitary(self):
        V, _ = shifted(5)
        t = OperatorTriple(0 * V, 2 * V, V @ V)
        v = p_unitary_check(t, "all")
        assert not v.is_member
        assert not p_unitary_check(t, "algebraic").is_member
        with pytest.raises(NotNormal):
            p_unitary_check(t, "spectral")

    def test_window_unsupported(self):
        with pytest.raises(Unsupported):
            p_unitary_check(OperatorTriple(np.eye(2), np.eye(2), np.eye(2), window=[0]))

    def test_unknown_route(self):
        with pytest.raises(InvalidInput):
            p_unitary_check(OperatorTriple.scalar(0, 0, 0), "other")


class TestIsometries:
    def test_commuting_isometries(self, rng):
        V, W = diag_unitary(3, rng), diag_unitary(3, rng)
        assert p_isometry_check(OperatorTriple(V, 0 * V, W)).is_member
        S, w = shifted(6)
        assert p_isometry_check(OperatorTriple(S, 0 * S, S @ S, window=w)).is_member

    def test_shift_tensor_pair(self):
        V, w = shifted(7)
        assert p_isometry_check(OperatorTriple(0 * V, 2 * V, V @ V, window=w)).is_member

    def test_printed_variant_fails(self):
        V, w = shifted(7)
        assert not p_isometry_check(OperatorTriple(0 * V, 2 * V, V, window=w)).is_member

    def test_identity_triple(self):
        I = np.eye(2)
        assert not p_isometry_check(OperatorTriple(I, I, I)).is_member

    def test_quasi(self, rng):
        t, _, _ = planted_p_unitary(3, rng)
        assert quasi_p_unitary_check(t).is_member
        assert quasi_p_unitary_check(OperatorTriple.scalar(0, 2, 1)).is_member
        V, w = shifted(7)
        v = quasi_p_unitary_check(OperatorTriple(0 * V, 2 * V, V @ V, window=w))
        assert not v.is_member

    def test_exact_inputs_collapse(self, rng):
        # without a window an isometry is unitary, so the three notions coincide
        for _ in range(10):
            t, pts, Q = planted_p_unitary(3, rng)
            bad = perturb_p_unitary(pts, Q, rng)
            for x in (t, bad):
                u = p_unitary_check(x).is_member
                assert quasi_p_unitary_check(x).is_member == u
                assert p_isometry_check(x).is_member == u


class TestLemma25:
    def test_examples(self):
        assert abs(lemma25_min_eigenvalue(OperatorTriple.scalar(0, 0, 0)) - 1) < 1e-15
        assert lemma25_inequality_check(OperatorTriple.scalar(0, 0, 0)).is_member
        assert lemma25_inequality_check(OperatorTriple.scalar(1, 0, 0)).is_member
        assert abs(lemma25_min_eigenvalue(OperatorTriple.scalar(1, 0, 0))) < 1e-12
        v = lemma25_inequality_check(OperatorTriple.scalar(3, 0, 0))
        assert not v.is_member
        assert abs(lemma25_min_eigenvalue(OperatorTriple.scalar(3, 0, 0)) + 8) < 1e-12

    def test_scalar_oracle(self):
        # independent evaluation of the scalar expression on a polar grid
        a, s, p = 0.3, 0.4 + 0.2j, 0.1j
        r = np.linspace(0, 1, 32)[:, None]
        th = np.linspace(0, 2 * np.pi, 32, endpoint=False)[None, :]
        z = r * np.exp(1j * th)
        X = z * s - z**2 * p + z * abs(z) ** 2 * np.conj(s) * p
        e = 1 - (1 - abs(z) ** 2) ** 2 * a**2 + abs(z) ** 2 * abs(s) ** 2 + abs(z) ** 4 * abs(p) ** 2 - 2 * X.real
        assert abs(lemma25_min_eigenvalue(OperatorTriple.scalar(a, s, p)) - e.min()) < 1e-12

    def test_images_of_contractions(self, rng):
        for q in g.sample_pentablock(20, 7):
            assert lemma25_inequality_check(OperatorTriple.scalar(q.a, q.s, q.p)).is_member


class TestSymbols:
    @staticmethod
    def example_symbols(beta):
        c = np.conj(beta)
        return [
            TrigMatrixPoly.from_list([[[beta / 2]], [[-c / 2]]]),
            TrigMatrixPoly.from_list([[[beta]], [[c]]]),
            TrigMatrixPoly.from_list([[[0]], [[1]]]),
        ]

    def test_boundary_identity(self, rng):
        for _ in range(5):
            beta = np.exp(2j * np.pi * rng.uniform())
            v = pointwise_symbol_check(self.example_symbols(beta))
            assert v.is_member
            assert v.residuals["fiber_identity"] <= 1e-12

    def test_interior(self):
        z = TrigMatrixPoly.from_list([[[0]], [[1]]])
        zero, two = TrigMatrixPoly.constant(np.zeros((1, 1))), TrigMatrixPoly.constant(2 * np.eye(1))
        assert pointwise_symbol_check([zero, zero, z], grid=16, mode="interior").is_member
        assert not pointwise_symbol_check([two, zero, z], grid=16, mode="interior").is_member

    def test_non_normal_values(self):
        N = TrigMatrixPoly.constant(np.array([[0, 1], [0, 0]]))
        with pytest.raises(Unsupported):
            pointwise_symbol_check([N, N, N], grid=16)


class TestInvariants:
    @given(seeds)
    def test_conjugation_invariance(self, seed):
        rng = np.random.default_rng(seed)
        t, pts, Q = planted_p_unitary(3, rng)
        bad = perturb_p_unitary(pts, Q, rng)
        W = random_unitary(3, rng)
        for x in (t, bad):
            v, w = p_unitary_check(x), p_unitary_check(x.conjugate(W))
            assert v.is_member == w.is_member
            for k in v.residuals:
                if not k.startswith("spectral."):
                    assert abs(v.residuals[k] - w.residuals[k]) <= 10 * 1e-9 * (1 + x.scale)
            assert quasi_p_unitary_check(x).is_member == quasi_p_unitary_check(x.conjugate(W)).is_member
            assert p_isometry_check(x).is_member == p_isometry_check(x.conjugate(W)).is_member

    @given(seeds)
    def test_windowed_conjugation_invariance(self, seed):
        rng = np.random.default_rng(seed)
        V, w = shifted(6)
        t = OperatorTriple(0 * V, 2 * V, V @ V, window=w)
        W = random_unitary(6, rng)
        assert p_isometry_check(t.conjugate(W)).is_member
        assert not quasi_p_unitary_check(t.conjugate(W)).is_member

    @given(seeds)
    def test_adjoint_closure(self, seed):
        rng = np.random.default_rng(seed)
        t, pts, Q = planted_p_unitary(3, rng)
        bad = perturb_p_unitary(pts, Q, rng)
        for x in (t, bad):
            assert p_unitary_check(x).is_member == p_unitary_check(x.adjoint()).is_member

    @given(seeds)
    def test_direct_sum_closure(self, seed):
        rng = np.random.default_rng(seed)
        t1, _, _ = planted_p_unitary(2, rng)
        t2, _, _ = planted_p_unitary(3, rng)
        s = t1.direct_sum(t2)
        assert p_unitary_check(s).is_member
        assert quasi_p_unitary_check(s).is_member
        V, w = shifted(6)
        iso = OperatorTriple(0 * V, 2 * V, V @ V, window=w)
        assert p_isometry_check(iso.direct_sum(t1)).is_member

    @given(seeds)
    def test_hierarchy(self, seed):
        rng = np.random.default_rng(seed)
        t, pts, Q = planted_p_unitary(int(rng.integers(1, 5)), rng)
        for x in (t, perturb_p_unitary(pts, Q, rng)):
            if p_unitary_check(x).is_member:
                assert quasi_p_unitary_check(x).is_member
            if quasi_p_unitary_check(x).is_member:
                assert p_isometry_check(x).is_member

    @given(seeds)
    def test_scalar_bridge(self, seed):
        rng = np.random.default_rng(seed)
        if rng.uniform() < 0.5:
            q = g.pi_map(g.random_boundary_unitary(rng))
            if rng.uniform() < 0.5:
                q = q.scaled(rng.uniform(0.5, 0.99))
        else:
            G = ginibre(2, rng)
            q = g.pi_map(G / np.linalg.norm(G, 2))
        t = OperatorTriple.scalar(q.a, q.s, q.p)
        assert p_unitary_check(t).is_member == g.b_penta_membership(q).in_set
        if not g.penta_membership(q).in_set:
            assert not lemma25_inequality_check(t).is_member

    def test_commutator_residual(self):
        A, B = np.array([[0, 1], [0, 0]]), np.array([[0, 0], [1, 0]])
        assert commutator_residual([A, B]) == pytest.approx(1.0)
        assert commutator_residual([A, A]) == 0.0
