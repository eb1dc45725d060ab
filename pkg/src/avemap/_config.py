from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    """Numerical thresholds shared by every module.

    Pass a modified copy (``dataclasses.replace``) wherever a function takes
    a ``tol`` argument to override them.
    """

    # Cholesky of T T^T is rejected above this 1-norm condition estimate.
    gram_cond_max: float = 1e12
    # Singular values below svd_rtol * sigma_max are truncated.
    svd_rtol: float = 1e-12
    # ||T w - sqrt(2) c|| <= affine_atol * (1 + ||c||) counts as membership in C1.
    affine_atol: float = 1e-8
    # Linear systems with condition estimate above this are declared singular.
    cond_max: float = 1e12
    # |det| <= det_rtol * scale counts as a zero principal minor.
    det_rtol: float = 1e-10


DEFAULT_TOLERANCES = Tolerances()
