"""Random instance families with a planted solution.

Randomness comes from NumPy's counter-based Philox bit generator.  Trial
``k`` of a campaign with base seed ``s`` draws from the stream keyed by
``SeedSequence(s, spawn_key=(k,))``, so trials are independent and can be
generated in any order.  Normal variates use NumPy's ziggurat sampler.
Bit-compatibility with any other environment's random streams is not a
goal.
"""

import enum
from dataclasses import dataclass, field

import numpy as np

from .core import AveProblem

MIN_T = 1e-6
MIN_SIGMA = 1e-12


class Family(enum.Enum):
    UNIFORM = "example1"
    PSD_GRAM = "example2"
    GAUSSIAN_RECT = "example3"


@dataclass(frozen=True)
class GenConfig:
    family: Family
    n: int
    m: int | None = None
    alpha: int = 0
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        if self.n < 1:
            raise ValueError("n must be positive")
        if self.family is Family.GAUSSIAN_RECT:
            if self.m is None or self.m < 1:
                raise ValueError("example3 needs a positive m")
        elif self.m not in (None, self.n):
            raise ValueError(f"{self.family.value} instances are square")
        if self.alpha not in (0, 1, 2, 3):
            raise ValueError("alpha must be one of 0, 1, 2, 3")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in 64 unsigned bits")

    def generate(self, trial=0):
        if self.family is Family.UNIFORM:
            return gen_example1(self.n, self.alpha, self.seed, trial)
        if self.family is Family.PSD_GRAM:
            return gen_example2(self.n, self.seed, trial)
        return gen_example3(self.m, self.n, self.seed, trial)


@dataclass(frozen=True, eq=False)
class GeneratedInstance:
    problem: AveProblem
    x_star: np.ndarray
    family_tags: dict = field(default_factory=dict)


def make_rng(seed, trial=0):
    """Deterministic Philox generator for ``(seed, trial)``."""
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(trial),))
    return np.random.Generator(np.random.Philox(ss))


def _planted(A, B, x, tags):
    c = A @ x + B @ np.abs(x)
    return GeneratedInstance(AveProblem(A, B, c), x, tags)


def gen_example1(n, alpha=0, seed=0, trial=0):
    """Uniform ``A'`` on ``[-10, 10]`` rescaled to ``A = A' / (t sigma_min(A'))``, ``B = -I``.

    ``t`` is uniform on ``[0, 1]`` and redrawn below ``1e-6``; ``A'`` is
    redrawn if numerically singular.  The planted solution has entries
    ``r * 10**(alpha * s)`` with ``r ~ U[-1, 1]``, ``s ~ U[0, 1]``.
    """
    if alpha not in (0, 1, 2, 3):
        raise ValueError("alpha must be one of 0, 1, 2, 3")
    rng = make_rng(seed, trial)
    while True:
        A0 = rng.uniform(-10.0, 10.0, size=(n, n))
        sigma_min = np.linalg.svd(A0, compute_uv=False)[-1]
        if sigma_min >= MIN_SIGMA:
            break
    t = rng.uniform(0.0, 1.0)
    while t < MIN_T:
        t = rng.uniform(0.0, 1.0)
    A = A0 / (t * sigma_min)
    r = rng.uniform(-1.0, 1.0, size=n)
    s = rng.uniform(0.0, 1.0, size=n)
    x = r * 10.0 ** (alpha * s)
    tags = {"family": "example1", "alpha": alpha, "t": t, "sv_gap": 1.0 / t - 1.0}
    return _planted(A, -np.eye(n), x, tags)


def gen_example2(n, seed=0, trial=0):
    """``A = A'^T A'`` with standard normal ``A'``, ``B = -I``, normal ``x*``."""
    rng = make_rng(seed, trial)
    A0 = rng.standard_normal((n, n))
    A = A0.T @ A0
    x = rng.standard_normal(n)
    return _planted(A, -np.eye(n), x, {"family": "example2"})


def gen_example3(m, n, seed=0, trial=0):
    """Standard normal ``A, B`` of shape ``(m, n)`` and planted ``x*``."""
    rng = make_rng(seed, trial)
    A = rng.standard_normal((m, n))
    B = rng.standard_normal((m, n))
    x = rng.standard_normal(n)
    return _planted(A, B, x, {"family": "example3", "r": m / n})
