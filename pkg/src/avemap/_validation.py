"""Input validation helpers in the spirit of ``sklearn.utils.validation``."""

import numpy as np

from .exceptions import BadShape


def check_matrix(M, name="matrix"):
    """Return ``M`` as a finite 2-D float array.

    Scalars become 1 x 1 matrices.  1-D input is ambiguous (row or
    column?) and is rejected.
    """
    M = np.asarray(M, dtype=float)
    if M.ndim == 0:
        M = M.reshape(1, 1)
    if M.ndim != 2:
        raise BadShape(f"{name} must be 2-D, got shape {M.shape}")
    if M.size == 0:
        raise BadShape(f"{name} is empty")
    if not np.all(np.isfinite(M)):
        raise BadShape(f"{name} contains non-finite entries")
    return M


def check_vector(v, name="vector", length=None):
    v = np.asarray(v, dtype=float)
    if v.ndim == 0:
        v = v.reshape(1)
    if v.ndim != 1:
        raise BadShape(f"{name} must be 1-D, got shape {v.shape}")
    if length is not None and v.shape[0] != length:
        raise BadShape(f"{name} must have length {length}, got {v.shape[0]}")
    if not np.all(np.isfinite(v)):
        raise BadShape(f"{name} contains non-finite entries")
    return v


def check_problem_arrays(A, B, c):
    """Validate and coerce the data of ``Ax + B|x| = c``."""
    A = check_matrix(A, "A")
    B = check_matrix(B, "B")
    if A.shape != B.shape:
        raise BadShape(f"A and B must have the same shape, got {A.shape} and {B.shape}")
    c = check_vector(c, "c", length=A.shape[0])
    return A, B, c


def require_square(p):
    if p.m != p.n:
        raise BadShape(f"solver requires a square problem, got m={p.m}, n={p.n}")


def require_minus_identity(p):
    require_square(p)
    if not np.array_equal(p.B, -np.eye(p.n)):
        raise BadShape("solver requires B = -I")
