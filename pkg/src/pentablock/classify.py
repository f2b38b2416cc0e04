"""Classification of commuting operator tuples.

The checks follow the algebraic characterizations of Gamma- and
pentablock-unitaries and isometries.  Every check first verifies
commutativity (relative tolerance) and reports the commutator residual.

Truncated models are not isometries in finite dimensions, only on a subspace
of "exact" vectors.  A triple may therefore carry a ``window``: a matrix
``E`` with orthonormal columns, and every operator identity ``X = 0`` is then
tested as ``||X E|| = 0``.  On a genuine finite-dimensional input without a
window an isometry is automatically unitary, so ``p_isometry_check``,
``quasi_p_unitary_check`` and ``p_unitary_check`` coincide there.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
import scipy.linalg

from .errors import InvalidInput, NotCommuting, NotNormal, NotSimultaneouslyDiagonalizable, ShapeError, Unsupported
from .geometry import PentaPoint, _boundary_residuals, penta_membership
from .linalg_kernel import (
    DEFAULT_TOL,
    ToleranceProfile,
    as_square,
    commutator,
    joint_diagonalize,
    matrix_from_json,
    matrix_to_json,
    normality_residual,
    opnorm,
    spectral_radius,
)
from .multipliers import CircleGrid, TrigMatrixPoly, eval_on_circle
from .verdict import Verdict

__all__ = [
    "OperatorTriple",
    "Verdict",
    "isometric_window",
    "commutator_residual",
    "gamma_unitary_check",
    "gamma_isometry_check",
    "p_unitary_check",
    "p_isometry_check",
    "quasi_p_unitary_check",
    "lemma25_min_eigenvalue",
    "lemma25_inequality_check",
    "pointwise_symbol_check",
]


def _window_matrix(window, n: int):
    if window is None:
        return None
    W = np.asarray(window)
    if W.ndim == 1:
        idx = W.astype(int)
        if idx.size and (idx.min() < 0 or idx.max() >= n):
            raise InvalidInput("window index out of range")
        return np.eye(n, dtype=complex)[:, idx]
    W = W.astype(complex)
    if W.ndim != 2 or W.shape[0] != n:
        raise ShapeError(f"window must have {n} rows")
    return W


@dataclass(frozen=True)
class OperatorTriple:
    """Three ``n x n`` matrices, optionally with an exactness window.

    Parameters
    ----------
    T1, T2, T3 : array_like
    window : None, index array or matrix with orthonormal columns
        Identities are only required on the span of the window.
    """

    T1: np.ndarray
    T2: np.ndarray
    T3: np.ndarray
    window: np.ndarray | None = None

    def __post_init__(self):
        mats = [as_square(T) for T in (self.T1, self.T2, self.T3)]
        n = mats[0].shape[0]
        if any(M.shape != (n, n) for M in mats):
            raise ShapeError("the three operators must have the same size")
        object.__setattr__(self, "T1", mats[0])
        object.__setattr__(self, "T2", mats[1])
        object.__setattr__(self, "T3", mats[2])
        object.__setattr__(self, "window", _window_matrix(self.window, n))

    @property
    def n(self) -> int:
        return self.T1.shape[0]

    @property
    def ops(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return self.T1, self.T2, self.T3

    @property
    def scale(self) -> float:
        return max(opnorm(T) for T in self.ops)

    @classmethod
    def scalar(cls, a, s, p) -> "OperatorTriple":
        return cls(np.array([[a]]), np.array([[s]]), np.array([[p]]))

    @classmethod
    def diagonal(cls, points) -> "OperatorTriple":
        """Diagonal triple whose joint eigentuples are the given ``(a, s, p)``."""
        pts = [PentaPoint(*q) if not isinstance(q, PentaPoint) else q for q in points]
        return cls(
            np.diag([q.a for q in pts]).astype(complex),
            np.diag([q.s for q in pts]).astype(complex),
            np.diag([q.p for q in pts]).astype(complex),
        )

    def adjoint(self) -> "OperatorTriple":
        return OperatorTriple(*(T.conj().T for T in self.ops), window=self.window)

    def conjugate(self, Q) -> "OperatorTriple":
        """``Q T_i Q^*`` with the window carried along to ``Q E``."""
        Q = as_square(Q)
        W = None if self.window is None else Q @ self.window
        return OperatorTriple(*(Q @ T @ Q.conj().T for T in self.ops), window=W)

    def compress(self, B) -> "OperatorTriple":
        """``B^* T_i B`` for a matrix ``B`` with orthonormal columns."""
        return OperatorTriple(*(B.conj().T @ T @ B for T in self.ops))

    def direct_sum(self, other: "OperatorTriple") -> "OperatorTriple":
        if self.window is None and other.window is None:
            W = None
        else:
            E1 = np.eye(self.n) if self.window is None else self.window
            E2 = np.eye(other.n) if other.window is None else other.window
            W = scipy.linalg.block_diag(E1, E2)
        return OperatorTriple(
            *(scipy.linalg.block_diag(A, B) for A, B in zip(self.ops, other.ops)), window=W
        )

    def with_window(self, window) -> "OperatorTriple":
        return replace(self, window=window)

    def to_json(self) -> dict:
        out = {"T1": matrix_to_json(self.T1), "T2": matrix_to_json(self.T2), "T3": matrix_to_json(self.T3)}
        if self.window is not None:
            out["window"] = matrix_to_json(self.window)
        return out

    @classmethod
    def from_json(cls, obj) -> "OperatorTriple":
        if not isinstance(obj, dict):
            raise InvalidInput("triple must be a JSON object")
        try:
            mats = [matrix_from_json(obj[k]) for k in ("T1", "T2", "T3")]
        except KeyError as exc:
            raise InvalidInput(f"triple is missing {exc}") from None
        W = matrix_from_json(obj["window"]) if obj.get("window") is not None else None
        return cls(*mats, window=W)


def isometric_window(V, tol: ToleranceProfile = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis of the subspace on which ``V`` acts isometrically.

    Spanned by the eigenvectors of ``V^* V`` with eigenvalue within
    ``atol_spectral`` of 1.
    """
    V = as_square(V)
    w, X = np.linalg.eigh(V.conj().T @ V)
    return X[:, np.abs(w - 1.0) <= tol.spectral(1.0)]


def _wres(X: np.ndarray, E) -> float:
    return opnorm(X if E is None else X @ E)


def commutator_residual(ops, E=None) -> float:
    """Largest ``||[A, B] E||`` over pairs."""
    ops = list(ops)
    return max(
        (_wres(commutator(ops[i], ops[j]), E) for i in range(len(ops)) for j in range(i)),
        default=0.0,
    )


def _require_commuting(ops, E, tol: ToleranceProfile) -> float:
    scale = max(opnorm(T) for T in ops)
    res = commutator_residual(ops, E)
    if res > tol.identity(scale):
        raise NotCommuting(f"commutator residual {res:.3e}")
    return res


def _checks(values: dict, scale: float, tol: ToleranceProfile) -> dict:
    return {k: (v, tol.identity(scale), tol.band(scale)) for k, v in values.items()}


def _gamma_unitary_residuals(S, P, E) -> dict:
    eye = np.eye(S.shape[0])
    return {
        "P_isometry": _wres(P.conj().T @ P - eye, E),
        "P_coisometry": _wres(P @ P.conj().T - eye, E),
        "S_minus_adjS_P": _wres(S - S.conj().T @ P, E),
        "spectral_radius_excess": max(0.0, spectral_radius(S) - 2.0),
    }


def _gamma_isometry_residuals(S, P, E) -> dict:
    eye = np.eye(S.shape[0])
    return {
        "S_minus_adjS_P": _wres(S - S.conj().T @ P, E),
        "P_isometry": _wres(P.conj().T @ P - eye, E),
        "norm_excess": max(0.0, opnorm(S) - 2.0),
    }


def _defect(T1, T2, E) -> float:
    eye = np.eye(T1.shape[0])
    return _wres(T1.conj().T @ T1 - eye + 0.25 * T2.conj().T @ T2, E)


def gamma_unitary_check(S, P, tol: ToleranceProfile = DEFAULT_TOL, window=None) -> Verdict:
    """``P`` unitary, ``S = S^* P`` and ``r(S) <= 2``."""
    S, P = as_square(S), as_square(P)
    if S.shape != P.shape:
        raise ShapeError("S and P differ in size")
    E = _window_matrix(window, S.shape[0])
    res = {"commutator": _require_commuting((S, P), E, tol)}
    res.update(_gamma_unitary_residuals(S, P, E))
    return Verdict.from_checks(_checks(res, max(opnorm(S), opnorm(P)), tol), "gamma-unitary")


def gamma_isometry_check(S, P, tol: ToleranceProfile = DEFAULT_TOL, window=None) -> Verdict:
    """``S = S^* P``, ``P^* P = I`` and ``||S|| <= 2``."""
    S, P = as_square(S), as_square(P)
    if S.shape != P.shape:
        raise ShapeError("S and P differ in size")
    E = _window_matrix(window, S.shape[0])
    res = {"commutator": _require_commuting((S, P), E, tol)}
    res.update(_gamma_isometry_residuals(S, P, E))
    return Verdict.from_checks(_checks(res, max(opnorm(S), opnorm(P)), tol), "gamma-isometry")


def _spectral_route(t: OperatorTriple, tol: ToleranceProfile, seed: int, strict: bool) -> Verdict:
    scale = t.scale
    normal = max(normality_residual(T) for T in t.ops)
    if normal > tol.identity(scale):
        if strict:
            raise NotNormal(f"spectral route needs normal operators (residual {normal:.3e})")
        return Verdict.from_checks(
            _checks({"normality": normal}, scale, tol), "spectral: joint spectrum in the distinguished boundary"
        )
    try:
        _, tuples = joint_diagonalize(t.ops, tol, seed=seed)
    except NotSimultaneouslyDiagonalizable as exc:
        if strict:
            raise NotNormal(str(exc)) from None
        tuples = None
    if tuples is None:
        worst = float(scale + 1.0)
    else:
        worst = max((max(_boundary_residuals(PentaPoint(*e)).values()) for e in tuples), default=0.0)
    return Verdict.from_checks(
        _checks({"normality": normal, "joint_spectrum_boundary": worst}, scale, tol),
        "spectral: joint spectrum in the distinguished boundary",
    )


def _algebraic_route(t: OperatorTriple, tol: ToleranceProfile) -> Verdict:
    N1, N2, N3 = t.ops
    res = {"N1_normality": normality_residual(N1)}
    res.update(_gamma_unitary_residuals(N2, N3, None))
    res["defect"] = _defect(N1, N2, None)
    return Verdict.from_checks(
        _checks(res, t.scale, tol), "algebraic: N1 normal, (N2,N3) gamma-unitary, defect identity"
    )


def _block_route(t: OperatorTriple, tol: ToleranceProfile) -> Verdict:
    N1, N2, N3 = t.ops
    n = t.n
    U1 = 0.5 * N2
    U2 = -N1.conj().T @ N3
    U3 = N1
    U = np.block([[U1, U2], [U3, U1]])
    eye = np.eye(2 * n)
    blocks = (U1, U2, U3)
    res = {
        "block_isometry": opnorm(U.conj().T @ U - eye),
        "block_coisometry": opnorm(U @ U.conj().T - eye),
        "block_normality": max(normality_residual(B) for B in blocks),
        "block_commutator": commutator_residual(blocks),
        "reconstruction": opnorm(N3 - (U1 @ U1 - U2 @ U3)),
    }
    return Verdict.from_checks(_checks(res, t.scale, tol), "block: [[U1,U2],[U3,U1]] unitary")


def p_unitary_check(
    t: OperatorTriple, route: str = "all", tol: ToleranceProfile = DEFAULT_TOL, seed: int = 0
) -> Verdict:
    """Decide whether ``t`` is a pentablock-unitary.

    Parameters
    ----------
    route : {"spectral", "algebraic", "block", "all"}
        ``all`` runs the three characterizations and requires them to agree;
        disagreement is reported as an inconclusive non-member.

    Raises
    ------
    NotCommuting
    NotNormal
        Only for an explicit ``route="spectral"`` on non-normal input.
    """
    if t.window is not None:
        raise Unsupported("unitarity is a global property; drop the window")
    res = _require_commuting(t.ops, None, tol)
    if route == "spectral":
        parts = {"spectral": _spectral_route(t, tol, seed, strict=True)}
    elif route == "algebraic":
        parts = {"algebraic": _algebraic_route(t, tol)}
    elif route == "block":
        parts = {"block": _block_route(t, tol)}
    elif route == "all":
        parts = {
            "spectral": _spectral_route(t, tol, seed, strict=False),
            "algebraic": _algebraic_route(t, tol),
            "block": _block_route(t, tol),
        }
    else:
        raise InvalidInput(f"unknown route {route!r}")
    residuals = {"commutator": res}
    tolerances = {"commutator": tol.identity(t.scale)}
    for name, v in parts.items():
        prefix = f"{name}." if len(parts) > 1 else ""
        residuals.update({prefix + k: x for k, x in v.residuals.items()})
        tolerances.update({prefix + k: x for k, x in v.tolerances.items()})
    outcomes = {v.is_member for v in parts.values()}
    agree = len(outcomes) == 1
    member = agree and outcomes.pop()
    inconclusive = (not agree) or (not member and any(v.inconclusive for v in parts.values()))
    label = "+".join(parts) if len(parts) > 1 else next(iter(parts.values())).route
    return Verdict(member, residuals, f"p-unitary {label}", inconclusive, tolerances)


def p_isometry_check(t: OperatorTriple, tol: ToleranceProfile = DEFAULT_TOL) -> Verdict:
    """``(V2, V3)`` a Gamma-isometry and ``V1^* V1 = I - V2^* V2 / 4`` (on the window)."""
    E = t.window
    V1, V2, V3 = t.ops
    res = {"commutator": _require_commuting(t.ops, E, tol)}
    res.update(_gamma_isometry_residuals(V2, V3, E))
    res["defect"] = _defect(V1, V2, E)
    return Verdict.from_checks(_checks(res, t.scale, tol), "p-isometry: gamma-isometry and defect identity")


def quasi_p_unitary_check(t: OperatorTriple, tol: ToleranceProfile = DEFAULT_TOL) -> Verdict:
    """Quasi pentablock-unitary, decided two ways and compared.

    ``corollary``: ``(R2, R3)`` a Gamma-unitary plus the defect identity.
    ``definition``: a pentablock-isometry whose third entry is unitary.
    """
    E = t.window
    R1, R2, R3 = t.ops
    res = _require_commuting(t.ops, E, tol)
    scale = t.scale
    cor = dict(_gamma_unitary_residuals(R2, R3, E))
    cor["defect"] = _defect(R1, R2, E)
    eye = np.eye(t.n)
    dfn = dict(_gamma_isometry_residuals(R2, R3, E))
    dfn["defect"] = cor["defect"]
    dfn["T3_coisometry"] = _wres(R3 @ R3.conj().T - eye, E)
    v_cor = Verdict.from_checks(_checks(cor, scale, tol), "corollary")
    v_dfn = Verdict.from_checks(_checks(dfn, scale, tol), "definition")
    residuals = {"commutator": res}
    tolerances = {"commutator": tol.identity(scale)}
    for v in (v_cor, v_dfn):
        residuals.update({f"{v.route}.{k}": x for k, x in v.residuals.items()})
        tolerances.update({f"{v.route}.{k}": x for k, x in v.tolerances.items()})
    agree = v_cor.is_member == v_dfn.is_member
    member = agree and v_cor.is_member
    inconclusive = (not agree) or (not member and (v_cor.inconclusive or v_dfn.inconclusive))
    return Verdict(member, residuals, "quasi-p-unitary corollary+definition", inconclusive, tolerances)


def _disc_grid(zgrid: int, closed: bool) -> np.ndarray:
    if zgrid < 1:
        raise InvalidInput("grid size must be positive")
    radii = np.linspace(0.0, 1.0, zgrid) if closed else np.arange(zgrid) / zgrid
    angles = 2 * np.pi * np.arange(zgrid) / zgrid
    return (radii[:, None] * np.exp(1j * angles)[None, :]).ravel()


def lemma25_min_eigenvalue(t: OperatorTriple, zgrid: int = 32) -> float:
    """Smallest eigenvalue over a polar grid of the closed disc of

    ``I - (1-|z|^2)^2 T1^*T1 + |z|^2 T2^*T2 + |z|^4 T3^*T3 - (X + X^*)``
    with ``X = z T2 - z^2 T3 + z |z|^2 T2^* T3``.
    """
    T1, T2, T3 = t.ops
    n = t.n
    if n == 0:
        return 0.0
    z = _disc_grid(zgrid, closed=True)[:, None, None]
    r2 = np.abs(z) ** 2
    A1, A2, A3 = (T.conj().T @ T for T in t.ops)
    T23 = T2.conj().T @ T3
    X = z * T2 - z**2 * T3 + z * r2 * T23
    H = np.eye(n) - (1 - r2) ** 2 * A1 + r2 * A2 + r2**2 * A3 - (X + np.conj(np.swapaxes(X, 1, 2)))
    H = 0.5 * (H + np.conj(np.swapaxes(H, 1, 2)))
    return float(np.min(np.linalg.eigvalsh(H)[:, 0]))


def lemma25_inequality_check(t: OperatorTriple, zgrid: int = 32, tol: ToleranceProfile = DEFAULT_TOL) -> Verdict:
    """Necessary condition for a pentablock contraction; a falsifier, not a decision procedure.

    ``negative_part`` is ``max(0, -lambda_min)`` over the grid.
    """
    res = _require_commuting(t.ops, None, tol)
    neg = max(0.0, -lemma25_min_eigenvalue(t, zgrid))
    scale = t.scale**2
    return Verdict.from_checks(
        _checks({"commutator": res, "negative_part": neg}, scale, tol), "lemma25 positivity on the disc"
    )


def _scalarize(values, tol: ToleranceProfile, seed: int):
    """Joint eigentuples of three commuting normal matrices at one node."""
    if values[0].shape == (1, 1):
        return [tuple(complex(V[0, 0]) for V in values)]
    try:
        _, tuples = joint_diagonalize(values, tol, seed=seed)
    except NotSimultaneouslyDiagonalizable as exc:
        raise Unsupported(f"symbol values are not commuting normal matrices: {exc}") from None
    return tuples


def pointwise_symbol_check(
    symbols,
    grid: int = 512,
    mode: str = "boundary",
    tol: ToleranceProfile = DEFAULT_TOL,
    seed: int = 0,
) -> Verdict:
    """Check a symbol triple node by node.

    ``boundary`` mode evaluates on ``grid`` roots of unity and requires every
    joint eigentuple to lie on the distinguished boundary; ``fiber_identity``
    reports ``max |4|a|^2 + |s|^2 - 4|``.  ``interior`` mode uses a
    ``grid x grid`` polar grid of the open disc and requires membership in the
    closed pentablock.
    """
    phis = list(symbols)
    if len(phis) != 3 or not all(isinstance(f, TrigMatrixPoly) for f in phis):
        raise InvalidInput("expected three TrigMatrixPoly symbols")
    if mode == "boundary":
        cg = CircleGrid(grid)
        vals = [eval_on_circle(f, cg) for f in phis]
        points = [[V[j] for V in vals] for j in range(cg.size)]
    elif mode == "interior":
        points = [[f(z) for f in phis] for z in _disc_grid(grid, closed=False)]
    else:
        raise InvalidInput(f"unknown mode {mode!r}")
    scale = 0.0
    worst = fiber = deficit = 0.0
    for vals in points:
        scale = max(scale, max(opnorm(V) for V in vals))
        for a, s, p in _scalarize(vals, tol, seed):
            q = PentaPoint(a, s, p)
            if mode == "boundary":
                worst = max(worst, max(_boundary_residuals(q).values()))
                fiber = max(fiber, abs(4 * abs(a) ** 2 + abs(s) ** 2 - 4))
            else:
                v = penta_membership(q, tol)
                if not v.in_set:
                    deficit = max(deficit, -v.margin)
    if mode == "boundary":
        checks = _checks({"boundary_residual": worst, "fiber_identity": fiber}, scale, tol)
        return Verdict.from_checks(checks, "pointwise distinguished boundary")
    checks = {"membership_deficit": (deficit, 0.0, tol.band(scale))}
    return Verdict.from_checks(checks, "pointwise closed pentablock")
