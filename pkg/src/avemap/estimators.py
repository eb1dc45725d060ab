"""scikit-learn style wrappers around the functional solvers.

An estimator here is fitted to one equation ``Ax + B|x| = c``; there is no
notion of samples, so ``fit`` takes the three problem arrays.  Hyper-
parameters follow the usual ``get_params``/``set_params`` protocol, which
makes the estimators easy to clone and to sweep over.

>>> est = MAPSolver(epsilon=1e-8).fit([[2.0]], [[-1.0]], [1.0])
>>> est.status_.value
'Converged'
"""

from sklearn.base import BaseEstimator

from .core import AveProblem
from .solvers import SOLVERS, SolverConfig, solve


class _AveEstimator(BaseEstimator):
    _solver = None

    def __init__(self, epsilon=1e-6, max_iter=None, gamma=0.5, switch_N=100,
                 switch_delta=1e-3, tie_rule="u"):
        self.epsilon = epsilon
        self.max_iter = max_iter
        self.gamma = gamma
        self.switch_N = switch_N
        self.switch_delta = switch_delta
        self.tie_rule = tie_rule

    def _config(self):
        return SolverConfig(
            epsilon=self.epsilon,
            max_iter=self.max_iter,
            gamma=self.gamma,
            switch_N=self.switch_N,
            switch_delta=self.switch_delta,
            tie_rule=self.tie_rule,
        )

    def _solver_name(self):
        return self._solver

    def fit(self, A, B, c):
        """Solve ``Ax + B|x| = c`` and store the outcome on the estimator.

        Sets ``x_``, ``report_``, ``n_iter_``, ``status_`` and
        ``residual_``.  A run that does not converge still fits; inspect
        ``status_`` or ``converged_``.
        """
        problem = AveProblem(A, B, c)
        report = solve(problem, self._solver_name(), self._config())
        self.problem_ = problem
        self.report_ = report
        self.x_ = report.x
        self.n_iter_ = report.iterations
        self.status_ = report.status
        self.residual_ = report.final_residual
        self.n_features_in_ = problem.n
        return self

    @property
    def converged_(self):
        return self.report_.converged


class AveSolver(_AveEstimator):
    """Generic estimator; ``solver`` is one of the registered solver names."""

    def __init__(self, solver="map", epsilon=1e-6, max_iter=None, gamma=0.5,
                 switch_N=100, switch_delta=1e-3, tie_rule="u"):
        super().__init__(epsilon, max_iter, gamma, switch_N, switch_delta, tie_rule)
        self.solver = solver

    def _solver_name(self):
        if self.solver not in SOLVERS:
            raise ValueError(f"unknown solver {self.solver!r}; choose from {sorted(SOLVERS)}")
        return self.solver


class MAPSolver(_AveEstimator):
    _solver = "map"


class RelaxedMAPSolver(_AveEstimator):
    _solver = "relaxed-map"


class MAPLSSolver(_AveEstimator):
    _solver = "map-ls"


class GNMSolver(_AveEstimator):
    _solver = "gnm"


class PicardSolver(_AveEstimator):
    _solver = "picard"


class GSMSolver(_AveEstimator):
    _solver = "gsm"
