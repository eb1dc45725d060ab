"""Projectors onto ``C1`` (affine) and ``C2`` (complementarity set).

``C2`` is nonconvex and its projector is set-valued wherever some pair has
``u_i = v_i > 0``.  Single-valued entry points resolve those ties with a
:class:`TieRule`; :func:`enumerate_project_C2` returns every candidate.
"""

import enum
import itertools

import numpy as np

from .core import SplitPoint, as_vector
from .exceptions import SizeCap

REGION_NEITHER = 0
REGION_1 = 1
REGION_2 = 2

MAX_TIES = 16


class TieRule(enum.Enum):
    PREFER_U = "u"
    PREFER_V = "v"
    BOTH = "both"

    @classmethod
    def coerce(cls, rule):
        if isinstance(rule, cls):
            return rule
        return cls(str(rule).lower())


def _single_valued(rule):
    rule = TieRule.coerce(rule)
    if rule is TieRule.BOTH:
        raise ValueError("TieRule.BOTH is only valid for set-valued enumeration")
    return rule


def project_M(s, t, rule=TieRule.PREFER_U):
    """Project ``(s, t)`` onto ``M = {(a, b) : a, b >= 0, ab = 0}``.

    Returns a list of candidate points.  It has two entries only for
    ``rule=TieRule.BOTH`` at a tie ``s = t > 0``.
    """
    rule = TieRule.coerce(rule)
    s, t = float(s), float(t)
    if s < t:
        return [(0.0, max(t, 0.0))]
    if s > t:
        return [(max(s, 0.0), 0.0)]
    on_u = (max(s, 0.0), 0.0)
    on_v = (0.0, max(t, 0.0))
    if rule is TieRule.PREFER_U:
        return [on_u]
    if rule is TieRule.PREFER_V:
        return [on_v]
    return [on_u] if on_u == on_v else [on_u, on_v]


def _project_C2_vec(w, rule):
    n = w.shape[0] // 2
    u, v = w[:n], w[n:]
    keep_u = u > v if rule is TieRule.PREFER_V else u >= v
    z = np.zeros_like(w)
    z[:n] = np.where(keep_u, np.maximum(u, 0.0), 0.0)
    z[n:] = np.where(keep_u, 0.0, np.maximum(v, 0.0))
    return z


def project_C2(w, rule=TieRule.PREFER_U):
    """Rule-selected element of ``P_C2(w)``, applied coordinate-pairwise."""
    return SplitPoint.from_vector(_project_C2_vec(as_vector(w), _single_valued(rule)))


def tie_indices(w):
    """Indices ``i`` with ``u_i = v_i > 0``, where ``P_C2`` branches."""
    w = as_vector(w)
    n = w.shape[0] // 2
    return np.flatnonzero((w[:n] == w[n:]) & (w[:n] > 0))


def _enumerate_C2_vecs(w):
    n = w.shape[0] // 2
    ties = tie_indices(w)
    if ties.size > MAX_TIES:
        raise SizeCap(f"{ties.size} tied coordinates exceed the cap of {MAX_TIES}")
    base = _project_C2_vec(w, TieRule.PREFER_U)
    out = []
    for choice in itertools.product((False, True), repeat=ties.size):
        z = base.copy()
        for i, to_v in zip(ties, choice):
            if to_v:
                z[i], z[n + i] = 0.0, w[n + i]
        out.append(z)
    return out


def enumerate_project_C2(w):
    """All elements of ``P_C2(w)``; ``2**k`` of them for ``k`` ties.

    Raises
    ------
    SizeCap
        If more than 16 coordinates are tied.
    """
    return [SplitPoint.from_vector(z) for z in _enumerate_C2_vecs(as_vector(w))]


def project_C1(space, w):
    """Orthogonal projection onto ``C1`` using the factorization in ``space``."""
    return SplitPoint.from_vector(space.project(as_vector(w)))


def region_of(w):
    """Per-pair region labels: 1 for ``K1``, 2 for ``K2``, 0 for a positive tie.

    Pairs with ``u_i = v_i <= 0`` belong to both ``K1`` and ``K2`` and are
    labelled 1.
    """
    w = as_vector(w)
    n = w.shape[0] // 2
    u, v = w[:n], w[n:]
    pattern = np.full(n, REGION_2, dtype=np.int8)
    pattern[(u > v) | ((u == v) & (u <= 0))] = REGION_1
    pattern[(u == v) & (u > 0)] = REGION_NEITHER
    return pattern


def in_C2(w, atol=0.0):
    w = as_vector(w)
    n = w.shape[0] // 2
    u, v = w[:n], w[n:]
    return bool(np.all(u >= -atol) and np.all(v >= -atol) and np.all(np.minimum(np.abs(u), np.abs(v)) <= atol))
