import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from avemap.analysis import (
    PointVerdict,
    Verdict,
    analyze,
    classify_point,
    complementary_columns,
    compute_Q,
    enumerate_merit_subgradients,
    is_nondegenerate,
    is_P_matrix,
    lcp_violation,
    merit,
    psi,
    psi_subdiff,
    restricted_L_norm,
    sv_gap,
    to_lcp,
)
from avemap.core import AveProblem, build_split_space, to_split
from avemap.exceptions import BadShape, SingularSystem
from avemap.generators import gen_example1, gen_example2, gen_example3
from avemap.projections import TieRule, enumerate_project_C2, project_C2
from avemap.solvers import map_step, solve_map

SQRT2 = np.sqrt(2.0)
coord = st.one_of(st.floats(-20, 20, allow_nan=False), st.sampled_from([0.0, 1.0, -1.0, 3.0]))


@st.composite
def tied_split_vectors(draw, n_max=3):
    """Split vectors where some pairs are forced to tie."""
    n = draw(st.integers(1, n_max))
    u = draw(arrays(float, n, elements=coord))
    v = draw(arrays(float, n, elements=coord))
    tie = draw(arrays(bool, n))
    return np.concatenate([u, np.where(tie, u, v)])


def gap_positive_pair(rng, n):
    """Random square (A, B) with sigma_min(A) > sigma_max(B)."""
    B = rng.normal(size=(n, n))
    A = rng.normal(size=(n, n))
    smin_a = np.linalg.svd(A, compute_uv=False)[-1]
    smax_b = np.linalg.svd(B, compute_uv=False)[0]
    A *= (smax_b * rng.uniform(1.05, 3.0)) / smin_a
    return A, B


class TestQ:
    def test_degenerate_example(self, degenerate_problem):
        Q = compute_Q(degenerate_problem)
        np.testing.assert_allclose(Q, [[-1.5, 1.5], [1.0, 0.0]], atol=1e-12)
        assert is_nondegenerate(Q) is Verdict.NO

    def test_scalar_example(self, infeasible_scalar):
        Q = compute_Q(infeasible_scalar)
        np.testing.assert_allclose(Q, [[-2.0]], atol=1e-15)
        assert is_nondegenerate(Q) is Verdict.YES
        assert is_P_matrix(Q) is Verdict.NO

    def test_zero_B_gives_identity(self):
        rng = np.random.default_rng(1)
        p = AveProblem(rng.normal(size=(4, 4)), np.zeros((4, 4)), np.ones(4))
        np.testing.assert_allclose(compute_Q(p), np.eye(4), atol=1e-12)

    def test_singular_A_minus_B_is_absent(self):
        p = AveProblem(np.eye(2), np.eye(2), np.ones(2))
        assert compute_Q(p) is None
        rep = analyze(p)
        assert rep.Q is None and rep.p_matrix is Verdict.SKIPPED
        assert "absent" in rep.summary()

    def test_rectangular_rejected(self):
        with pytest.raises(BadShape):
            compute_Q(AveProblem(np.ones((2, 3)), np.ones((2, 3)), np.ones(2)))

    def test_minor_tests(self):
        assert is_P_matrix(np.eye(3)) is Verdict.YES
        assert is_nondegenerate(-2.0) is Verdict.YES
        # positive diagonal but a negative 2x2 minor
        assert is_P_matrix([[1.0, 2.0], [2.0, 1.0]]) is Verdict.NO
        assert is_nondegenerate([[1.0, 2.0], [2.0, 1.0]]) is Verdict.YES
        assert is_P_matrix(np.eye(13)) is Verdict.SKIPPED
        assert is_nondegenerate(np.eye(5), cap=4) is Verdict.SKIPPED
        with pytest.raises(BadShape):
            is_P_matrix(np.ones((2, 3)))

    def test_threshold_scales_with_entries(self):
        big = 1e8 * np.array([[1.0, 1.0], [1.0, 1.0 + 1e-14]])
        assert is_nondegenerate(big) is Verdict.NO


class TestSvGap:
    def test_examples(self):
        assert sv_gap(2 * np.eye(3), np.eye(3)) == pytest.approx(1.0)
        assert sv_gap(np.eye(3), 2 * np.eye(3)) == pytest.approx(-1.0)

    def test_wide_matrix_has_zero_sigma_min(self):
        assert sv_gap(np.ones((1, 2)), np.zeros((1, 2))) == 0.0

    def test_implication_chain(self):
        rng = np.random.default_rng(2024)
        checked = 0
        for _ in range(50):
            n = int(rng.integers(1, 9))
            A, B = gap_positive_pair(rng, n)
            rep = analyze(AveProblem(A, B, np.ones(n)))
            assert rep.sv_gap > 0
            assert rep.p_matrix is Verdict.YES
            assert rep.nondegenerate is Verdict.YES
            assert rep.unique_solution_certified
            checked += 1
        assert checked == 50

    def test_uniform_family_report(self):
        inst = gen_example1(8, seed=5)
        rep = analyze(inst.problem)
        assert rep.sv_gap > 0 and rep.summary() == "Q nondegenerate, P-matrix"


class TestPsi:
    @pytest.mark.parametrize("s, t, value, subdiff", [
        (0.0, 3.0, 0.0, [(0.0, 0.0)]),
        (-1.0, -1.0, 1.0, [(-1.0, -1.0)]),
        (2.0, 2.0, 2.0, [(2.0, 0.0), (0.0, 2.0)]),
        (5.0, -1.0, 0.5, [(0.0, -1.0)]),
    ])
    def test_examples(self, s, t, value, subdiff):
        assert psi(s, t) == pytest.approx(value)
        assert psi_subdiff(s, t) == subdiff

    def test_zero_set_is_M(self):
        grid = np.linspace(-3, 3, 25)
        for s in grid:
            for t in grid:
                on_M = s >= 0 and t >= 0 and s * t == 0
                assert (psi(s, t) == 0) == on_M, (s, t)

    @given(coord, coord, st.booleans())
    def test_subgradient_identities(self, a, b, force_tie):
        if force_tie:
            b = a
        value = psi(a, b)
        for g in psi_subdiff(a, b):
            g = np.array(g)
            assert abs(g @ g - 2 * value) <= 1e-12 * max(1.0, value)
            assert 2 * value <= g @ np.array([a, b]) + 1e-12 * max(1.0, value)


class TestMerit:
    @given(tied_split_vectors())
    def test_projection_identity(self, w):
        for rule in (TieRule.PREFER_U, TieRule.PREFER_V):
            ev = merit(w, rule)
            np.testing.assert_allclose(w - ev.subgradient.w, project_C2(w, rule).w, atol=1e-12)
            assert ev.value >= 0

    @given(tied_split_vectors())
    def test_set_equality(self, w):
        lhs = {tuple(np.round(z.w, 12)) for z in enumerate_project_C2(w)}
        rhs = {tuple(np.round(w - g, 12)) for g in enumerate_merit_subgradients(w)}
        assert lhs == rhs

    def test_examples(self):
        ev = merit([3.0, 0.0, 0.0, 2.0])
        assert ev.value == 0 and np.all(ev.subgradient.w == 0)
        ev = merit([-1.0, -1.0])
        assert ev.value == pytest.approx(1.0)
        np.testing.assert_allclose([-1.0, -1.0] - ev.subgradient.w, [0.0, 0.0])
        assert merit([2.0, 1.0, 2.0, 3.0]).tie_count == 1


class TestClassify:
    def test_spurious_outside_omega(self, infeasible_scalar):
        space = build_split_space(infeasible_scalar)
        pc = classify_point(space, infeasible_scalar, [-0.8, -0.4])
        assert pc.is_fixed_point and not pc.in_Omega
        assert pc.verdict is PointVerdict.SPURIOUS_FIXED_POINT
        assert not pc.hypothesis_violated

    def test_solution(self, quadrant_problem):
        space = build_split_space(quadrant_problem)
        pc = classify_point(space, quadrant_problem, [3.0, 0.0, 0.0, 0.0])
        assert pc.verdict is PointVerdict.SOLUTION
        assert pc.in_C1 and pc.in_C2 and pc.in_Omega and pc.is_fixed_point

    def test_spurious_inside_omega_needs_degenerate_Q(self, degenerate_problem):
        space = build_split_space(degenerate_problem)
        w = solve_map(degenerate_problem, w0=[-1.0, 5.0, 9.0, 1.0]).w
        pc = classify_point(space, degenerate_problem, w, tol=1e-6)
        assert pc.is_fixed_point and pc.in_Omega and not pc.in_C2
        assert pc.verdict is PointVerdict.SPURIOUS_FIXED_POINT
        assert pc.hypothesis_violated and pc.q_nondegenerate is Verdict.NO

    def test_not_fixed(self, quadrant_problem):
        space = build_split_space(quadrant_problem)
        pc = classify_point(space, quadrant_problem, [0.0, 0.0, 1.0, 0.0])
        assert pc.verdict is PointVerdict.NOT_FIXED and not pc.in_C1

    def test_fixed_through_one_tie_branch_only(self):
        # C1 = {v_1 = 1}; w = (1, 0, 1, 0) ties in pair 1 and is recovered
        # from the u branch of P_C2 but not from the v branch.
        p = AveProblem([[0.5, 0.0]], [[-0.5, 0.0]], [-1.0 / SQRT2])
        space = build_split_space(p)
        w = np.array([1.0, 0.0, 1.0, 0.0])
        np.testing.assert_allclose(map_step(space, w, TieRule.PREFER_U).w, w, atol=1e-14)
        assert np.linalg.norm(map_step(space, w, TieRule.PREFER_V).w - w) > 0.5
        pc = classify_point(space, p, w)
        assert pc.is_fixed_point and pc.verdict is PointVerdict.SPURIOUS_FIXED_POINT

    def test_p_matrix_runs_end_in_solutions(self):
        for seed in range(5):
            inst = gen_example1(6, seed=seed)
            space = build_split_space(inst.problem)
            rep = solve_map(inst.problem)
            assert rep.converged
            pc = classify_point(space, inst.problem, rep.w, tol=1e-5)
            assert pc.verdict is PointVerdict.SOLUTION


class TestRestrictedLNorm:
    def test_complementary_columns_contract(self):
        rng = np.random.default_rng(7)
        for _ in range(30):
            n = int(rng.integers(1, 7))
            A, B = gap_positive_pair(rng, n)
            space = build_split_space(AveProblem(A, B, np.zeros(n)))
            for _ in range(10):
                lam1 = np.flatnonzero(rng.random(n) < 0.5)
                assert restricted_L_norm(space, complementary_columns(lam1, n)) < 1 - 1e-6

    def test_full_and_empty(self, quadrant_problem):
        space = build_split_space(quadrant_problem)
        assert restricted_L_norm(space, np.arange(4)) == pytest.approx(1.0)
        assert restricted_L_norm(space, []) == 0.0

    def test_full_column_rank(self):
        space = build_split_space(gen_example3(12, 4, seed=1).problem)
        assert restricted_L_norm(space, np.arange(8)) < 1e-10

    def test_columns(self):
        np.testing.assert_array_equal(complementary_columns([0, 2], 3), [0, 2, 4])
        with pytest.raises(ValueError):
            complementary_columns([3], 3)


class TestLcp:
    def test_zero_rhs(self):
        p = AveProblem(2 * np.eye(2), -np.eye(2), np.zeros(2))
        M, q = to_lcp(p)
        np.testing.assert_array_equal(q, 0.0)
        assert lcp_violation(M, q, np.zeros(2)) == 0.0

    def test_scalar_hand_check(self, unit_scalar):
        M, q = to_lcp(unit_scalar)
        np.testing.assert_allclose(M, [[1 / 3]])
        assert lcp_violation(M, q, to_split([1.0]).u) < 1e-12

    @pytest.mark.parametrize("make", [
        lambda s: gen_example1(10, seed=s),
        lambda s: gen_example2(10, seed=s),
        lambda s: gen_example3(10, 10, seed=s),
    ])
    def test_generated_solutions_solve_the_lcp(self, make):
        for s in range(3):
            inst = make(s)
            M, q = to_lcp(inst.problem)
            u = to_split(inst.x_star).u
            assert lcp_violation(M, q, u) <= 1e-8 * max(1.0, np.abs(q).max())

    def test_errors(self):
        with pytest.raises(SingularSystem):
            to_lcp(AveProblem(np.eye(2), np.eye(2), np.ones(2)))
        with pytest.raises(BadShape):
            to_lcp(AveProblem(np.ones((1, 2)), np.ones((1, 2)), [1.0]))
