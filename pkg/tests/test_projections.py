import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from avemap.core import AveProblem, SplitPoint, build_split_space
from avemap.exceptions import SizeCap
from avemap.projections import (
    REGION_1,
    REGION_2,
    REGION_NEITHER,
    TieRule,
    enumerate_project_C2,
    in_C2,
    project_C1,
    project_C2,
    project_M,
    region_of,
    tie_indices,
)

coord = st.one_of(
    st.floats(-50, 50, allow_nan=False),
    st.sampled_from([0.0, 1.0, -1.0, 2.5]),
)


def split_vectors(n_max=4):
    return st.integers(1, n_max).flatmap(lambda n: arrays(float, 2 * n, elements=coord))


def brute_force_distance(w):
    """Distance from w to C2, minimising over every support pattern."""
    n = w.shape[0] // 2
    u, v = w[:n], w[n:]
    best = np.inf
    for keep_u in itertools.product((True, False), repeat=n):
        keep_u = np.array(keep_u)
        z = np.concatenate([np.where(keep_u, np.maximum(u, 0), 0), np.where(keep_u, 0, np.maximum(v, 0))])
        best = min(best, np.linalg.norm(w - z))
    return best


class TestProjectM:
    @pytest.mark.parametrize("s, t, expected", [
        (3.0, 1.0, [(3.0, 0.0)]),
        (1.0, 3.0, [(0.0, 3.0)]),
        (-1.0, -2.0, [(0.0, 0.0)]),
        (-2.0, 0.5, [(0.0, 0.5)]),
        (0.0, 0.0, [(0.0, 0.0)]),
    ])
    def test_off_tie(self, s, t, expected):
        for rule in TieRule:
            assert project_M(s, t, rule) == expected

    def test_tie(self):
        assert project_M(2.0, 2.0, TieRule.PREFER_U) == [(2.0, 0.0)]
        assert project_M(2.0, 2.0, "v") == [(0.0, 2.0)]
        assert project_M(2.0, 2.0, TieRule.BOTH) == [(2.0, 0.0), (0.0, 2.0)]
        assert project_M(-1.0, -1.0, TieRule.BOTH) == [(0.0, 0.0)]


class TestProjectC2:
    @given(split_vectors())
    def test_oracle_optimality(self, w):
        for rule in (TieRule.PREFER_U, TieRule.PREFER_V):
            z = project_C2(w, rule).w
            assert in_C2(z)
            assert np.linalg.norm(w - z) <= brute_force_distance(w) + 1e-12

    @given(split_vectors())
    def test_idempotent(self, w):
        z = project_C2(w).w
        np.testing.assert_allclose(project_C2(z).w, z, atol=1e-12)

    @given(split_vectors(3))
    def test_enumeration_is_the_set_of_nearest_points(self, w):
        d = brute_force_distance(w)
        cands = enumerate_project_C2(w)
        assert len(cands) == 2 ** tie_indices(w).size
        for z in cands:
            assert in_C2(z)
            assert abs(np.linalg.norm(w - z.w) - d) <= 1e-12

    def test_rule_both_rejected_for_single_valued(self):
        with pytest.raises(ValueError):
            project_C2([1.0, 1.0], TieRule.BOTH)

    def test_accepts_split_point(self):
        z = project_C2(SplitPoint([2.0, -1.0], [1.0, 3.0]))
        np.testing.assert_array_equal(z.w, [2.0, 0.0, 0.0, 3.0])

    def test_size_cap(self):
        with pytest.raises(SizeCap):
            enumerate_project_C2(np.ones(34))
        assert len(enumerate_project_C2(np.ones(8))) == 16


class TestProjectC1:
    @given(st.integers(0, 2**32 - 1))
    def test_firmly_nonexpansive(self, seed):
        rng = np.random.default_rng(seed)
        m, n = rng.integers(1, 5), rng.integers(1, 5)
        A, B, x0 = rng.normal(size=(m, n)), rng.normal(size=(m, n)), rng.normal(size=n)
        p = AveProblem(A, B, A @ x0 + B @ np.abs(x0))
        space = build_split_space(p)
        x, y = rng.normal(size=2 * n) * 3, rng.normal(size=2 * n) * 3
        px, py = project_C1(space, x).w, project_C1(space, y).w
        assert np.sum((px - py) ** 2) <= np.dot(px - py, x - y) + 1e-10


class TestRegions:
    def test_labels(self):
        w = np.array([3.0, 1.0, 2.0, -1.0, 1.0, 4.0, 2.0, -1.0])
        np.testing.assert_array_equal(region_of(w), [REGION_1, REGION_2, REGION_NEITHER, REGION_1])

    def test_in_C2(self):
        assert in_C2([1.0, 0.0, 0.0, 2.0])
        assert not in_C2([1.0, 1.0])
        assert not in_C2([-1.0, 0.0])
        assert in_C2([1e-9, 1.0], atol=1e-8)
