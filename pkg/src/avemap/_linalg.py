"""Dense factorizations with LAPACK condition estimates."""

import warnings

import numpy as np
from scipy import linalg
from scipy.linalg import lapack

from .exceptions import SingularSystem


def cholesky_or_none(S, cond_max):
    """Lower Cholesky factor of ``S``, or ``None`` if ``S`` is not safely SPD."""
    try:
        factor = linalg.cho_factor(S, lower=True, check_finite=False)
    except linalg.LinAlgError:
        return None
    anorm = np.abs(S).sum(axis=0).max()
    rcond, info = lapack.dpocon(factor[0], anorm, uplo="L")
    if info != 0 or rcond * cond_max < 1.0:
        return None
    return factor


def lu_checked(M, cond_max, what="matrix"):
    """LU factorization of ``M``; raises ``SingularSystem`` if ill-conditioned."""
    with warnings.catch_warnings():
        # exact singularity is reported below through the condition estimate
        warnings.simplefilter("ignore", linalg.LinAlgWarning)
        lu, piv = linalg.lu_factor(M, check_finite=False)
    anorm = np.abs(M).sum(axis=0).max()
    if anorm == 0.0:
        raise SingularSystem(f"{what} is zero")
    rcond, info = lapack.dgecon(lu, anorm, norm="1")
    if info != 0 or not np.isfinite(rcond) or rcond * cond_max < 1.0:
        raise SingularSystem(f"{what} is numerically singular (rcond={rcond:.3g})")
    return lu, piv


def lu_solve(factor, b, trans=0):
    return linalg.lu_solve(factor, b, trans=trans, check_finite=False)
