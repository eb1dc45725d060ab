"""Problem data, split coordinates and the affine constraint set.

The absolute value equation ``Ax + B|x| = c`` is lifted to the split space
``w = (u, v)`` with ``u = sqrt(2) * x_+`` and ``v = sqrt(2) * (-x)_+``.  In
these coordinates a solution is a point of ``C1 ∩ C2`` where

* ``C1 = {w : T w = sqrt(2) c}`` with ``T = [A + B | -A + B]``,
* ``C2 = {w : u >= 0, v >= 0, <u, v> = 0}``.
"""

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy import linalg

from ._config import DEFAULT_TOLERANCES
from ._linalg import cholesky_or_none
from ._validation import check_problem_arrays, check_vector
from .exceptions import BadShape, InfeasibleAffine, ProblemFormatError

SQRT2 = np.sqrt(2.0)


@dataclass(frozen=True, eq=False)
class AveProblem:
    """An instance of ``Ax + B|x| = c`` with ``A, B`` of shape ``(m, n)``."""

    A: np.ndarray
    B: np.ndarray
    c: np.ndarray

    def __post_init__(self):
        A, B, c = check_problem_arrays(self.A, self.B, self.c)
        for name, arr in (("A", A), ("B", B), ("c", c)):
            arr = arr.copy()
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def m(self):
        return self.A.shape[0]

    @property
    def n(self):
        return self.A.shape[1]

    def residual(self, x):
        return residual(self, x)


def residual(p, x):
    """Euclidean norm of ``Ax + B|x| - c``."""
    x = np.asarray(x, dtype=float)
    if x.shape != (p.n,):
        raise BadShape(f"x must have shape ({p.n},), got {x.shape}")
    return float(np.linalg.norm(p.A @ x + p.B @ np.abs(x) - p.c))


@dataclass(frozen=True, eq=False)
class SplitPoint:
    """A point ``w = (u, v)`` of the split space."""

    u: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        u = check_vector(self.u, "u")
        v = check_vector(self.v, "v", length=u.shape[0])
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "v", v)

    @property
    def n(self):
        return self.u.shape[0]

    @property
    def w(self):
        """The stacked vector ``(u, v)`` of length ``2n``."""
        return np.concatenate([self.u, self.v])

    @classmethod
    def from_vector(cls, w):
        w = np.asarray(w, dtype=float)
        if w.ndim != 1 or w.shape[0] % 2:
            raise BadShape(f"a split vector must be 1-D of even length, got {w.shape}")
        n = w.shape[0] // 2
        return cls(w[:n].copy(), w[n:].copy())

    def to_x(self):
        return from_split(self)


def as_vector(w):
    """Stacked vector for a :class:`SplitPoint` or an array-like of length 2n."""
    if isinstance(w, SplitPoint):
        return w.w
    w = np.asarray(w, dtype=float)
    if w.ndim != 1 or w.shape[0] % 2:
        raise BadShape(f"a split vector must be 1-D of even length, got {w.shape}")
    return w


def to_split(x):
    x = check_vector(x, "x")
    return SplitPoint(SQRT2 * np.maximum(x, 0.0), SQRT2 * np.maximum(-x, 0.0))


def from_split(w):
    w = as_vector(w)
    n = w.shape[0] // 2
    return (w[:n] - w[n:]) / SQRT2


class SplitSpace:
    """Precomputed affine data for ``C1 = {w : T w = sqrt(2) c}``.

    ``T T^T = 2 (A A^T + B B^T)`` is Cholesky-factorized when it is safely
    positive definite.  Otherwise a truncated SVD of ``T`` provides the
    pseudo-inverse and ``rank_deficient`` is set.

    Raises
    ------
    InfeasibleAffine
        If ``sqrt(2) c`` is not in the range of ``T``.
    """

    def __init__(self, problem, tol=DEFAULT_TOLERANCES):
        self.problem = problem
        self.tol = tol
        A, B, c = problem.A, problem.B, problem.c
        self.n = problem.n
        self.m = problem.m
        self.T = np.hstack([A + B, B - A])
        self.rhs = SQRT2 * c
        self.gram = self.T @ self.T.T
        self.gram_factor = cholesky_or_none(self.gram, tol.gram_cond_max)
        self._svd = None
        if self.gram_factor is None:
            U, s, Vt = linalg.svd(self.T, full_matrices=False)
            keep = s > tol.svd_rtol * s[0] if s[0] > 0 else np.zeros_like(s, dtype=bool)
            self._svd = (U[:, keep], s[keep], Vt[keep])
        for arr in (self.T, self.rhs, self.gram):
            arr.setflags(write=False)

        self.affine_tol = tol.affine_atol * (1.0 + np.linalg.norm(c))
        self.particular_solution = self.pinv(self.rhs)
        self.particular_solution.setflags(write=False)
        gap = np.linalg.norm(self.T @ self.particular_solution - self.rhs)
        if gap > self.affine_tol:
            raise InfeasibleAffine(
                f"sqrt(2)c is outside the range of T (least-squares residual {gap:.3g})"
            )

    @property
    def uses_cholesky(self):
        return self.gram_factor is not None

    @property
    def rank_deficient(self):
        return self.gram_factor is None

    @property
    def rank(self):
        if self.gram_factor is not None:
            return self.m
        return self._svd[1].shape[0]

    def pinv(self, r):
        """Apply the Moore-Penrose inverse ``T^+`` to a vector of length m."""
        if self.gram_factor is not None:
            return self.T.T @ linalg.cho_solve(self.gram_factor, r, check_finite=False)
        U, s, Vt = self._svd
        return Vt.T @ ((U.T @ r) / s)

    def project(self, w):
        """``P_C1(w) = w - T^+ (T w - sqrt(2) c)`` on stacked vectors."""
        return w - self.pinv(self.T @ w - self.rhs)

    def apply_L(self, w):
        """Apply ``L = I - T^+ T``, the orthogonal projector onto ``Ker(T)``."""
        return w - self.pinv(self.T @ w)

    def affine_gap(self, w):
        return float(np.linalg.norm(self.T @ w - self.rhs))

    @cached_property
    def L(self):
        if self.gram_factor is not None:
            L = -self.T.T @ linalg.cho_solve(self.gram_factor, self.T, check_finite=False)
        else:
            _, _, Vt = self._svd
            L = -Vt.T @ Vt
        L[np.diag_indices_from(L)] += 1.0
        L = (L + L.T) / 2.0
        L.setflags(write=False)
        return L

    @cached_property
    def L_blocks(self):
        """``(L1, L2, L3)`` with ``L = [[L1, L2], [L2^T, L3]]``."""
        n = self.n
        L = self.L
        return L[:n, :n], L[:n, n:], L[n:, n:]


def build_split_space(p, tol=DEFAULT_TOLERANCES):
    return SplitSpace(p, tol)


def write_problem(p, path):
    """Write ``p`` in the whitespace-delimited ``AVE m n`` text format."""
    def row(values):
        return " ".join(f"{v:.17g}" for v in values)

    lines = [f"AVE {p.m} {p.n}"]
    lines += [row(r) for r in p.A]
    lines += [row(r) for r in p.B]
    lines.append(row(p.c))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def parse_problem(text):
    lines = [ln.split() for ln in text.splitlines() if ln.strip()]
    if not lines or len(lines[0]) != 3 or lines[0][0] != "AVE":
        raise ProblemFormatError("first line must be 'AVE m n'")
    try:
        m, n = int(lines[0][1]), int(lines[0][2])
    except ValueError:
        raise ProblemFormatError("dimensions in header must be integers") from None
    if m < 1 or n < 1:
        raise ProblemFormatError("dimensions must be positive")
    body = lines[1:]
    if len(body) != 2 * m + 1:
        raise ProblemFormatError(f"expected {2 * m + 1} data rows, found {len(body)}")
    try:
        rows = [[float(tok) for tok in ln] for ln in body]
    except ValueError as exc:
        raise ProblemFormatError(str(exc)) from None
    for i, r in enumerate(rows[:-1]):
        if len(r) != n:
            raise ProblemFormatError(f"matrix row {i + 1} has {len(r)} entries, expected {n}")
    if len(rows[-1]) != m:
        raise ProblemFormatError(f"c row has {len(rows[-1])} entries, expected {m}")
    try:
        return AveProblem(np.array(rows[:m]), np.array(rows[m:2 * m]), np.array(rows[-1]))
    except BadShape as exc:
        raise ProblemFormatError(str(exc)) from None


def read_problem(path):
    with open(path) as fh:
        return parse_problem(fh.read())
