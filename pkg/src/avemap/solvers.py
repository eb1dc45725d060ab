"""Iterative solvers for ``Ax + B|x| = c``.

Split-space methods (any ``m, n``):

* :func:`solve_map`: alternating projections ``w <- P_C1(P_C2(w))``.
* :func:`solve_relaxed_map`: convex combination of ``P_C2`` and MAP steps.
* :func:`solve_map_ls`: MAP warm start followed by fixed-point linear
  system steps ``(I - L D_w) w' = sqrt(2) T^+ c``.

Baselines for square problems: :func:`solve_gnm` (generalized Newton),
:func:`solve_picard` and :func:`solve_gsm` (Gauss-Seidel).

Every solver starts from ``x = 0`` (MAP-LS from ``w = T^+ c``), stops as
soon as ``||Ax + B|x| - c|| <= epsilon`` and returns a :class:`SolverReport`.
Runtime failures (singular systems, missing Gauss-Seidel roots, empty
``C1``) are reported through ``status``; violated preconditions raise
:class:`~avemap.exceptions.BadShape`.
"""

import enum
import math
import time
from dataclasses import dataclass, field

import numpy as np

from ._config import DEFAULT_TOLERANCES, Tolerances
from ._linalg import lu_checked, lu_solve
from ._validation import require_minus_identity, require_square
from .core import SQRT2, SplitPoint, as_vector, build_split_space, from_split, residual
from .exceptions import InfeasibleAffine, SingularSystem
from .projections import TieRule, _project_C2_vec, _single_valued

DEFAULT_MAX_ITER = {
    "map": 2000,
    "relaxed-map": 2000,
    "map-ls": 2000,
    "gnm": 2000,
    "picard": 2000,
    "gsm": 10000,
}


class Status(enum.Enum):
    CONVERGED = "Converged"
    MAX_ITER = "MaxIter"
    FIXED_POINT_NOT_SOLUTION = "FixedPointNotSolution"
    NO_GSM_ROOT = "NoGsmRoot"
    SINGULAR_SYSTEM = "SingularSystem"
    INFEASIBLE_AFFINE = "InfeasibleAffine"


@dataclass(frozen=True)
class SolverConfig:
    """Run parameters shared by all solvers.

    ``max_iter=None`` selects the per-solver default from
    ``DEFAULT_MAX_ITER``.
    """

    epsilon: float = 1e-6
    max_iter: int | None = None
    gamma: float = 0.5
    switch_N: int = 100
    switch_delta: float = 1e-3
    tie_rule: TieRule = TieRule.PREFER_U
    fp_stagnation_tol: float = 1e-12
    tol: Tolerances = DEFAULT_TOLERANCES

    def __post_init__(self):
        object.__setattr__(self, "tie_rule", _single_valued(self.tie_rule))
        if not 0.0 < self.gamma < 1.0:
            raise ValueError(f"gamma must lie in (0, 1), got {self.gamma}")
        if not self.epsilon > 0.0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")
        if self.max_iter is not None and self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")
        if self.switch_N < 1:
            raise ValueError("switch_N must be at least 1")
        if not self.switch_delta > 0.0:
            raise ValueError("switch_delta must be positive")

    def iteration_cap(self, solver):
        return self.max_iter if self.max_iter is not None else DEFAULT_MAX_ITER[solver]


@dataclass
class SolverReport:
    solver: str
    status: Status
    iterations: int
    x: np.ndarray
    final_residual: float
    residual_history: np.ndarray
    wallclock: float
    phase_iters: tuple | None = None
    w: np.ndarray | None = None
    failed_iteration: int | None = None
    message: str = ""
    iterates: np.ndarray | None = field(default=None, repr=False)

    @property
    def converged(self):
        return self.status is Status.CONVERGED


class _Trace:
    """Book-keeping shared by the solver loops."""

    def __init__(self, solver, p, cfg, keep_iterates=False):
        self.solver = solver
        self.p = p
        self.cfg = cfg
        self.cap = cfg.iteration_cap(solver)
        self.start = time.perf_counter()
        self.history = []
        self.iterates = [] if keep_iterates else None
        self.k = 0

    def record(self, r, w=None):
        self.history.append(r)
        if self.iterates is not None and w is not None:
            self.iterates.append(np.array(w, copy=True))

    def report(self, status, x, r, w=None, **extra):
        return SolverReport(
            solver=self.solver,
            status=status,
            iterations=self.k,
            x=np.asarray(x, dtype=float),
            final_residual=float(r),
            residual_history=np.asarray(self.history, dtype=float),
            wallclock=time.perf_counter() - self.start,
            w=None if w is None else np.asarray(w, dtype=float),
            iterates=None if self.iterates is None else np.array(self.iterates),
            **extra,
        )


def _infeasible_report(trace, exc):
    x = np.zeros(trace.p.n)
    r = residual(trace.p, x)
    trace.record(r)
    return trace.report(Status.INFEASIBLE_AFFINE, x, r, message=str(exc))


def map_step(space, w, rule=TieRule.PREFER_U):
    """One alternating projection ``P_C1(P_C2(w))``."""
    rule = _single_valued(rule)
    return SplitPoint.from_vector(space.project(_project_C2_vec(as_vector(w), rule)))


def solve_map(p, cfg=None, w0=None, return_iterates=False):
    """Method of alternating projections from ``w0`` (default ``0``).

    Stops with ``FixedPointNotSolution`` once a step is shorter than
    ``cfg.fp_stagnation_tol`` while the residual is still above
    ``cfg.epsilon``.
    """
    cfg = cfg or SolverConfig()
    trace = _Trace("map", p, cfg, return_iterates)
    try:
        space = build_split_space(p, cfg.tol)
    except InfeasibleAffine as exc:
        return _infeasible_report(trace, exc)

    w = np.zeros(2 * p.n) if w0 is None else as_vector(w0).astype(float)
    x = from_split(w)
    r = residual(p, x)
    trace.record(r, w)
    status = Status.CONVERGED
    while r > cfg.epsilon:
        if trace.k >= trace.cap:
            status = Status.MAX_ITER
            break
        w_next = space.project(_project_C2_vec(w, cfg.tie_rule))
        step = np.linalg.norm(w_next - w)
        w = w_next
        trace.k += 1
        x = from_split(w)
        r = residual(p, x)
        trace.record(r, w)
        if r > cfg.epsilon and step <= cfg.fp_stagnation_tol:
            status = Status.FIXED_POINT_NOT_SOLUTION
            break
    return trace.report(status, x, r, w=w)


def solve_relaxed_map(p, cfg=None, return_iterates=False):
    """Relaxed MAP ``w <- (1 - gamma) P_C2(w) + gamma P_C1(P_C2(w))``.

    The start is ``gamma * P_C1(0)``, i.e. the relaxed step taken from
    ``0 ∈ C2``.  Since iterates are convex combinations outside ``C2``, the
    residual is measured at both ``w`` and ``P_C2(w)`` and the smaller one
    is kept.
    """
    cfg = cfg or SolverConfig()
    trace = _Trace("relaxed-map", p, cfg, return_iterates)
    try:
        space = build_split_space(p, cfg.tol)
    except InfeasibleAffine as exc:
        return _infeasible_report(trace, exc)
    gamma = cfg.gamma

    def best(w):
        z = _project_C2_vec(w, cfg.tie_rule)
        x_w, x_z = from_split(w), from_split(z)
        r_w, r_z = residual(p, x_w), residual(p, x_z)
        return (x_z, r_z, z) if r_z <= r_w else (x_w, r_w, z)

    bar = np.zeros(2 * p.n)
    w = (1.0 - gamma) * bar + gamma * space.project(bar)
    x, r, z = best(w)
    trace.record(r, w)
    status = Status.CONVERGED
    while r > cfg.epsilon:
        if trace.k >= trace.cap:
            status = Status.MAX_ITER
            break
        w_next = (1.0 - gamma) * z + gamma * space.project(z)
        step = np.linalg.norm(w_next - w)
        w = w_next
        trace.k += 1
        x, r, z = best(w)
        trace.record(r, w)
        if r > cfg.epsilon and step <= cfg.fp_stagnation_tol:
            status = Status.FIXED_POINT_NOT_SOLUTION
            break
    return trace.report(status, x, r, w=w)


def diagonal_selector(w, rule=TieRule.PREFER_U):
    """0/1 diagonal of ``D_w``, chosen so that ``D_w w`` lies in ``P_C2(w)``.

    Per pair ``(u_i, v_i)`` the entries ``(d_i, d_{n+i})`` are ``(1, 0)``
    when ``u_i > v_i, u_i >= 0``; ``(0, 1)`` when ``u_i < v_i, v_i >= 0``;
    the rule-selected one of those on a tie ``u_i = v_i > 0``; and
    ``(0, 0)`` otherwise.
    """
    rule = _single_valued(rule)
    w = as_vector(w)
    n = w.shape[0] // 2
    u, v = w[:n], w[n:]
    tie = (u == v) & (u > 0)
    on_u = ((u > v) & (u >= 0)) | (tie & (rule is TieRule.PREFER_U))
    on_v = ((u < v) & (v >= 0)) | (tie & (rule is TieRule.PREFER_V))
    return np.concatenate([on_u, on_v]).astype(float)


def _block_solve(M11, M12, M21, M22, b1, b2, cond_max):
    # Eliminate the first block row, solve the Schur complement for the second.
    F11 = lu_checked(M11, cond_max, "leading block of I - L D_w")
    X = lu_solve(F11, M12)
    y = lu_solve(F11, b1)
    schur = M22 - M21 @ X
    Fs = lu_checked(schur, cond_max, "Schur complement of I - L D_w")
    x2 = lu_solve(Fs, b2 - M21 @ y)
    return y - X @ x2, x2


def _ls_solve(space, blocks, d, cond_max):
    n = space.n
    L1, L2, L3 = blocks
    d1, d2 = d[:n], d[n:]
    eye = np.eye(n)
    M11 = eye - L1 * d1
    M12 = -L2 * d2
    M21 = -L2.T * d1
    M22 = eye - L3 * d2
    p1, p2 = space.particular_solution[:n], space.particular_solution[n:]
    try:
        w1, w2 = _block_solve(M11, M12, M21, M22, p1, p2, cond_max)
    except SingularSystem:
        # Pivot on the trailing block instead.
        w2, w1 = _block_solve(M22, M21, M12, M11, p2, p1, cond_max)
    return np.concatenate([w1, w2])


def ls_step(space, L_blocks, w, rule=TieRule.PREFER_U):
    """Solve ``(I - L D_w) w' = sqrt(2) T^+ c`` by block elimination.

    Raises
    ------
    SingularSystem
        If neither diagonal block nor its Schur complement is safely
        invertible.
    """
    if L_blocks is None:
        L_blocks = space.L_blocks
    d = diagonal_selector(w, rule)
    return SplitPoint.from_vector(_ls_solve(space, L_blocks, d, space.tol.cond_max))


def solve_map_ls(p, cfg=None, return_iterates=False):
    """MAP-LS hybrid.

    Phase 1 takes MAP steps from ``w0 = T^+ c`` while fewer than
    ``switch_N`` have been taken and the step is longer than
    ``switch_delta``.  The first time either condition fails, the solver
    switches permanently to linear-system steps, computed from the current
    iterate.  A singular linear system is replaced by one MAP step.
    """
    cfg = cfg or SolverConfig()
    trace = _Trace("map-ls", p, cfg, return_iterates)
    try:
        space = build_split_space(p, cfg.tol)
    except InfeasibleAffine as exc:
        return _infeasible_report(trace, exc)
    rule = cfg.tie_rule

    w = space.particular_solution / SQRT2
    x = from_split(w)
    r = residual(p, x)
    trace.record(r, w)
    n_map = n_ls = n_fallback = 0
    in_ls_phase = False
    status = Status.CONVERGED
    while r > cfg.epsilon:
        if trace.k >= trace.cap:
            status = Status.MAX_ITER
            break
        if not in_ls_phase:
            w_map = space.project(_project_C2_vec(w, rule))
            if n_map < cfg.switch_N and np.linalg.norm(w_map - w) > cfg.switch_delta:
                w_next = w_map
                n_map += 1
            else:
                in_ls_phase = True
        if in_ls_phase:
            try:
                w_next = _ls_solve(space, space.L_blocks, diagonal_selector(w, rule),
                                   cfg.tol.cond_max)
                n_ls += 1
            except SingularSystem:
                w_next = space.project(_project_C2_vec(w, rule))
                n_fallback += 1
        step = np.linalg.norm(w_next - w)
        w = w_next
        trace.k += 1
        x = from_split(w)
        r = residual(p, x)
        trace.record(r, w)
        if r > cfg.epsilon and step <= cfg.fp_stagnation_tol:
            status = Status.FIXED_POINT_NOT_SOLUTION
            break
    msg = f"{n_fallback} singular LS steps replaced by MAP steps" if n_fallback else ""
    return trace.report(status, x, r, w=w, phase_iters=(n_map + n_fallback, n_ls), message=msg)


def _stagnated(x_next, x, r, cfg):
    return r > cfg.epsilon and np.linalg.norm(x_next - x) <= cfg.fp_stagnation_tol


def solve_gnm(p, cfg=None):
    """Generalized Newton ``x <- (A - diag(sgn x))^{-1} c`` for ``B = -I``."""
    require_minus_identity(p)
    cfg = cfg or SolverConfig()
    trace = _Trace("gnm", p, cfg)
    A, c = p.A, p.c
    x = np.zeros(p.n)
    r = residual(p, x)
    trace.record(r)
    status = Status.CONVERGED
    while r > cfg.epsilon:
        if trace.k >= trace.cap:
            status = Status.MAX_ITER
            break
        try:
            F = lu_checked(A - np.diag(np.sign(x)), cfg.tol.cond_max, "A - D")
        except SingularSystem as exc:
            return trace.report(Status.SINGULAR_SYSTEM, x, r, message=str(exc),
                                failed_iteration=trace.k + 1)
        x_next = lu_solve(F, c)
        trace.k += 1
        r = residual(p, x_next)
        done = _stagnated(x_next, x, r, cfg)
        x = x_next
        trace.record(r)
        if done:
            status = Status.FIXED_POINT_NOT_SOLUTION
            break
    return trace.report(status, x, r)


def solve_picard(p, cfg=None):
    """Picard iteration ``x <- A^{-1}(c - B|x|)`` with one LU of ``A``.

    A run whose iterates overflow is stopped early and reported as
    ``MaxIter``.
    """
    require_square(p)
    cfg = cfg or SolverConfig()
    trace = _Trace("picard", p, cfg)
    x = np.zeros(p.n)
    r = residual(p, x)
    trace.record(r)
    try:
        F = lu_checked(p.A, cfg.tol.cond_max, "A")
    except SingularSystem as exc:
        return trace.report(Status.SINGULAR_SYSTEM, x, r, message=str(exc), failed_iteration=1)
    status = Status.CONVERGED
    with np.errstate(over="ignore", invalid="ignore"):
        while r > cfg.epsilon:
            if trace.k >= trace.cap:
                status = Status.MAX_ITER
                break
            x_next = lu_solve(F, p.c - p.B @ np.abs(x))
            trace.k += 1
            if not np.all(np.isfinite(x_next)):
                trace.record(math.inf)
                return trace.report(Status.MAX_ITER, x_next, math.inf, message="iterates diverged")
            r = residual(p, x_next)
            done = _stagnated(x_next, x, r, cfg)
            x = x_next
            trace.record(r)
            if done:
                status = Status.FIXED_POINT_NOT_SOLUTION
                break
    return trace.report(status, x, r)


def gsm_scalar_root(a, b):
    """Solve ``a*x - |x| = b``: try ``x = b/(a-1) >= 0``, then ``x = b/(a+1) <= 0``.

    Returns ``None`` if neither branch yields a valid root.
    """
    if a != 1.0:
        x = b / (a - 1.0)
        if x >= 0.0:
            return x
    if a != -1.0:
        x = b / (a + 1.0)
        if x <= 0.0:
            return x
    return None


def solve_gsm(p, cfg=None):
    """Gauss-Seidel sweeps for ``Ax - |x| = c`` (``B = -I``).

    Component ``i`` solves ``A_ii x_i - |x_i| = c_i - sum_{j != i} A_ij x_j``
    with the already-updated ``x_j`` for ``j < i``.
    """
    require_minus_identity(p)
    cfg = cfg or SolverConfig()
    trace = _Trace("gsm", p, cfg)
    A, c, n = p.A, p.c, p.n
    diag = np.diag(A).copy()
    strict_upper = np.triu(A, 1)
    x = np.zeros(n)
    r = residual(p, x)
    trace.record(r)
    status = Status.CONVERGED
    with np.errstate(over="ignore", invalid="ignore"):
        while r > cfg.epsilon:
            if trace.k >= trace.cap:
                status = Status.MAX_ITER
                break
            rhs = c - strict_upper @ x
            x_next = np.zeros(n)
            for i in range(n):
                b = rhs[i] - A[i, :i] @ x_next[:i]
                if not math.isfinite(b):
                    trace.k += 1
                    trace.record(math.inf)
                    return trace.report(Status.MAX_ITER, x, math.inf, message="iterates diverged")
                root = gsm_scalar_root(diag[i], b)
                if root is None:
                    return trace.report(
                        Status.NO_GSM_ROOT, x, r, failed_iteration=trace.k + 1,
                        message=f"no root of a*x - |x| = b at component {i} "
                                f"(a={diag[i]:.6g}, b={b:.6g})",
                    )
                x_next[i] = root
            trace.k += 1
            if not np.all(np.isfinite(x_next)):
                trace.record(math.inf)
                return trace.report(Status.MAX_ITER, x_next, math.inf, message="iterates diverged")
            r = residual(p, x_next)
            done = _stagnated(x_next, x, r, cfg)
            x = x_next
            trace.record(r)
            if done:
                status = Status.FIXED_POINT_NOT_SOLUTION
                break
    return trace.report(status, x, r)


SOLVERS = {
    "map": solve_map,
    "relaxed-map": solve_relaxed_map,
    "map-ls": solve_map_ls,
    "gnm": solve_gnm,
    "picard": solve_picard,
    "gsm": solve_gsm,
}


def solve(p, solver="map", cfg=None):
    try:
        fn = SOLVERS[solver]
    except KeyError:
        raise ValueError(f"unknown solver {solver!r}; choose from {sorted(SOLVERS)}") from None
    return fn(p, cfg)
