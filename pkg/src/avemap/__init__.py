"""Alternating projection solvers for absolute value equations ``Ax + B|x| = c``."""

from .analysis import (
    PointVerdict,
    Verdict,
    analyze,
    classify_point,
    compute_Q,
    is_nondegenerate,
    is_P_matrix,
    merit,
    psi,
    psi_subdiff,
    restricted_L_norm,
    sv_gap,
    to_lcp,
)
from .core import (
    AveProblem,
    SplitPoint,
    SplitSpace,
    build_split_space,
    from_split,
    parse_problem,
    read_problem,
    residual,
    to_split,
    write_problem,
)
from .estimators import (
    AveSolver,
    GNMSolver,
    GSMSolver,
    MAPLSSolver,
    MAPSolver,
    PicardSolver,
    RelaxedMAPSolver,
)
from .exceptions import (
    AveError,
    BadShape,
    CampaignConfigError,
    InfeasibleAffine,
    ProblemFormatError,
    SingularSystem,
    SizeCap,
)
from .generators import Family, GenConfig, gen_example1, gen_example2, gen_example3
from .projections import TieRule, enumerate_project_C2, project_C1, project_C2, region_of
from .solvers import (
    SOLVERS,
    SolverConfig,
    SolverReport,
    Status,
    solve,
    solve_gnm,
    solve_gsm,
    solve_map,
    solve_map_ls,
    solve_picard,
    solve_relaxed_map,
)

__version__ = "0.1.0"
