"""Structural diagnostics for square and general problems.

* ``Q = (A^T + B^T)(A^T - B^T)^{-1}`` and brute-force principal-minor tests
  for nondegeneracy and the P-property.
* The singular-value gap ``sigma_min(A) - sigma_max(B)``; a positive gap
  makes ``Q`` positive definite.
* The complementarity function ``psi`` whose B-subdifferential turns
  ``P_C2`` into a subgradient step, ``P_C2(w) = w - d_B Psi(w)``.
* Fixed-point classification of split points and the LCP export.
"""

import enum
import itertools
from dataclasses import dataclass

import numpy as np

from ._config import DEFAULT_TOLERANCES
from ._linalg import lu_checked, lu_solve
from .core import SQRT2, SplitPoint, as_vector, build_split_space
from .exceptions import BadShape, InfeasibleAffine, SingularSystem, SizeCap
from .projections import TieRule, _enumerate_C2_vecs, _project_C2_vec, _single_valued, tie_indices

DEFAULT_MINOR_CAP = 12


class Verdict(enum.Enum):
    YES = "Yes"
    NO = "No"
    SKIPPED = "Skipped"


class PointVerdict(enum.Enum):
    SOLUTION = "Solution"
    SPURIOUS_FIXED_POINT = "SpuriousFixedPoint"
    NOT_FIXED = "NotFixed"


def _require_square(A, B=None):
    if A.shape[0] != A.shape[1] or (B is not None and B.shape != A.shape):
        raise BadShape(f"a square problem is required, got A of shape {A.shape}")


def compute_Q(p, tol=DEFAULT_TOLERANCES):
    """``Q = (A + B)^T (A - B)^{-T}``, or ``None`` if ``A - B`` is singular."""
    _require_square(p.A, p.B)
    try:
        F = lu_checked(p.A - p.B, tol.cond_max, "A - B")
    except SingularSystem:
        return None
    # Q^T = (A - B)^{-1} (A + B)
    return lu_solve(F, p.A + p.B).T


def _principal_minors(Q):
    """Yield ``(k, dets)`` with the determinants of all k x k principal submatrices."""
    n = Q.shape[0]
    for k in range(1, n + 1):
        idx = np.array(list(itertools.combinations(range(n), k)))
        subs = Q[idx[:, :, None], idx[:, None, :]]
        yield k, np.linalg.det(subs), np.abs(subs).reshape(len(idx), -1).max(axis=1)


def _minor_test(Q, cap, tol, positive):
    Q = np.asarray(Q, dtype=float)
    if Q.ndim == 0:
        Q = Q.reshape(1, 1)
    _require_square(Q)
    if Q.shape[0] > cap:
        return Verdict.SKIPPED
    for k, dets, maxabs in _principal_minors(Q):
        threshold = tol.det_rtol * np.maximum(1.0, maxabs ** k)
        ok = dets > threshold if positive else np.abs(dets) > threshold
        if not np.all(ok):
            return Verdict.NO
    return Verdict.YES


def is_nondegenerate(Q, cap=DEFAULT_MINOR_CAP, tol=DEFAULT_TOLERANCES):
    """All principal minors nonzero (checked exhaustively for ``n <= cap``)."""
    return _minor_test(Q, cap, tol, positive=False)


def is_P_matrix(Q, cap=DEFAULT_MINOR_CAP, tol=DEFAULT_TOLERANCES):
    """All principal minors positive (checked exhaustively for ``n <= cap``)."""
    return _minor_test(Q, cap, tol, positive=True)


def sv_gap(A, B):
    A = np.atleast_2d(np.asarray(A, dtype=float))
    B = np.atleast_2d(np.asarray(B, dtype=float))
    s_a = np.linalg.svd(A, compute_uv=False)
    s_b = np.linalg.svd(B, compute_uv=False)
    # sigma_n(A) vanishes when A has fewer rows than columns
    sigma_min_a = s_a[-1] if A.shape[0] >= A.shape[1] else 0.0
    return float(sigma_min_a - s_b[0])


@dataclass(frozen=True, eq=False)
class StructureReport:
    Q: np.ndarray | None
    nondegenerate: Verdict
    p_matrix: Verdict
    sv_gap: float

    @property
    def unique_solution_certified(self):
        return self.p_matrix is Verdict.YES

    def summary(self):
        if self.Q is None:
            q = "Q absent (A - B singular)"
        elif self.nondegenerate is Verdict.SKIPPED:
            q = "Q nondegeneracy not checked (n above cap)"
        elif self.nondegenerate is Verdict.NO:
            q = "Q degenerate"
        elif self.p_matrix is Verdict.YES:
            q = "Q nondegenerate, P-matrix"
        else:
            q = "Q nondegenerate, not P-matrix"
        return q


def analyze(p, cap=DEFAULT_MINOR_CAP, tol=DEFAULT_TOLERANCES):
    """Structure report for a square problem."""
    Q = compute_Q(p, tol)
    if Q is None:
        nondeg = p_mat = Verdict.SKIPPED
    else:
        nondeg = is_nondegenerate(Q, cap, tol)
        p_mat = is_P_matrix(Q, cap, tol) if nondeg is not Verdict.NO else Verdict.NO
    return StructureReport(Q, nondeg, p_mat, sv_gap(p.A, p.B))


def psi(s, t):
    """``min(s, t)^2 / 2 + max(-max(s, t), 0)^2 / 2``; zero exactly on ``M``."""
    s, t = float(s), float(t)
    return 0.5 * min(s, t) ** 2 + 0.5 * max(-max(s, t), 0.0) ** 2


def psi_subdiff(s, t):
    """Elements of the B-subdifferential of :func:`psi` at ``(s, t)``."""
    s, t = float(s), float(t)
    if s == t and s > 0:
        return [(s, 0.0), (0.0, t)]
    if s < t or s == t:
        return [(s, min(t, 0.0))]
    return [(min(s, 0.0), t)]


def _psi_vec(u, v):
    return 0.5 * np.minimum(u, v) ** 2 + 0.5 * np.maximum(-np.maximum(u, v), 0.0) ** 2


@dataclass(frozen=True, eq=False)
class MeritEval:
    value: float
    subgradient: SplitPoint
    tie_count: int


def merit_value(w):
    w = as_vector(w)
    n = w.shape[0] // 2
    return float(_psi_vec(w[:n], w[n:]).sum())


def merit(w, rule=TieRule.PREFER_U):
    """``Psi(w) = sum_i psi(u_i, v_i)`` and a rule-selected B-subgradient.

    The selection matches :func:`~avemap.projections.project_C2`, so
    ``w - subgradient`` equals ``project_C2(w, rule)``.
    """
    rule = _single_valued(rule)
    w = as_vector(w)
    g = w - _project_C2_vec(w, rule)
    return MeritEval(merit_value(w), SplitPoint.from_vector(g), int(tie_indices(w).size))


def enumerate_merit_subgradients(w):
    """Every element of the B-subdifferential of ``Psi`` at ``w``, built pairwise from :func:`psi_subdiff`."""
    w = as_vector(w)
    n = w.shape[0] // 2
    per_pair = [psi_subdiff(w[i], w[n + i]) for i in range(n)]
    out = []
    for combo in itertools.product(*per_pair):
        g = np.empty(2 * n)
        g[:n] = [a for a, _ in combo]
        g[n:] = [b for _, b in combo]
        out.append(g)
    return out


@dataclass(frozen=True)
class PointClass:
    in_C1: bool
    in_C2: bool
    in_Omega: bool
    is_fixed_point: bool
    verdict: PointVerdict
    q_nondegenerate: Verdict | None = None

    @property
    def hypothesis_violated(self):
        """A fixed point in ``Omega`` that is not a solution.

        This can only happen when ``Ker(T)^perp`` meets ``{w : u_i v_i = 0}``
        nontrivially, in particular when ``Q`` is degenerate.
        """
        return self.is_fixed_point and self.in_Omega and self.verdict is not PointVerdict.SOLUTION


def classify_point(space, p, w, tol=1e-8):
    """Classify ``w`` against ``C1``, ``C2``, ``Omega`` and ``Fix(P_C1 P_C2)``.

    ``w`` counts as fixed if some element of ``P_C2(w)`` maps back to it
    within ``tol``.
    """
    w = as_vector(w)
    n = w.shape[0] // 2
    u, v = w[:n], w[n:]
    in_c1 = space.affine_gap(w) <= tol
    in_c2 = bool(np.linalg.norm(w - _project_C2_vec(w, TieRule.PREFER_U)) <= tol)
    in_omega = not bool(np.any((u < -tol) & (v < -tol)))
    try:
        candidates = _enumerate_C2_vecs(w)
    except SizeCap:
        candidates = [_project_C2_vec(w, TieRule.PREFER_U), _project_C2_vec(w, TieRule.PREFER_V)]
    fixed = any(np.linalg.norm(space.project(z) - w) <= tol for z in candidates)
    if in_c1 and in_c2:
        verdict = PointVerdict.SOLUTION
    elif fixed:
        verdict = PointVerdict.SPURIOUS_FIXED_POINT
    else:
        verdict = PointVerdict.NOT_FIXED
    q_nd = None
    if p.m == p.n:
        Q = compute_Q(p, space.tol)
        q_nd = Verdict.NO if Q is None else is_nondegenerate(Q, tol=space.tol)
    return PointClass(in_c1, in_c2, in_omega, fixed, verdict, q_nd)


def complementary_columns(lambda1, n):
    """``Lambda1 ∪ {n + i : i not in Lambda1}`` as a sorted index array."""
    lambda1 = sorted(set(int(i) for i in lambda1))
    if any(i < 0 or i >= n for i in lambda1):
        raise ValueError("indices in lambda1 must lie in range(n)")
    rest = [n + i for i in range(n) if i not in set(lambda1)]
    return np.array(lambda1 + rest, dtype=int)


def restricted_L_norm(space, columns):
    """Spectral norm of the columns ``columns`` of ``L = I - T^+ T``."""
    columns = np.asarray(columns, dtype=int)
    if columns.size == 0:
        return 0.0
    return float(np.linalg.norm(space.L[:, columns], 2))


def to_lcp(p, tol=DEFAULT_TOLERANCES):
    """Equivalent LCP ``u >= 0, F(u) = M u + q >= 0, <u, F(u)> = 0``.

    Returns ``(M, q) = (Q^T, -sqrt(2) (A - B)^{-1} c)``.  On ``C1`` the
    second split block is ``v = F(u)``, so a solution ``x`` of the AVE
    corresponds to ``u = sqrt(2) x_+`` (the first block of
    :func:`~avemap.core.to_split`).

    Raises
    ------
    BadShape
        If ``p`` is not square.
    SingularSystem
        If ``A - B`` is singular.
    """
    _require_square(p.A, p.B)
    F = lu_checked(p.A - p.B, tol.cond_max, "A - B")
    M = lu_solve(F, p.A + p.B)
    q = -SQRT2 * lu_solve(F, p.c)
    return M, q


def lcp_violation(M, q, u):
    """Largest violation of ``u >= 0``, ``Mu + q >= 0`` and complementarity."""
    u = np.asarray(u, dtype=float)
    f = M @ u + q
    return float(max(np.max(-u, initial=0.0), np.max(-f, initial=0.0), np.max(np.abs(u * f), initial=0.0)))


def descent_gap(w_k, w_next, w_star):
    """Slack in ``||w_next - w*||^2 <= ||w_k - w*||^2 - 2 Psi(w_k)``.

    Nonnegative whenever the inequality holds.
    """
    w_k, w_next, w_star = as_vector(w_k), as_vector(w_next), as_vector(w_star)
    lhs = np.sum((w_next - w_star) ** 2)
    rhs = np.sum((w_k - w_star) ** 2) - 2.0 * merit_value(w_k)
    return float(rhs - lhs)


def affine_space_or_none(p, tol=DEFAULT_TOLERANCES):
    try:
        return build_split_space(p, tol)
    except InfeasibleAffine:
        return None
