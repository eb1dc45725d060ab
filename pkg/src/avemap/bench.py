"""Benchmark campaigns over generated instance families.

A campaign is described by flat ``key = value`` text::

    family = example1
    n = 200
    alpha = 0
    trials = 20
    seed = 12345
    solvers = map, gnm, picard, gsm

Every trial draws one instance and runs all listed solvers on it.  A run
counts as a success iff its status is ``Converged``; time and iteration
averages are taken over successes only.
"""

import csv
import io
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .core import residual
from .exceptions import CampaignConfigError
from .generators import Family, GenConfig
from .solvers import SOLVERS, SolverConfig, Status, solve

log = logging.getLogger(__name__)

CSV_COLUMNS = (
    "solver", "trials", "successes", "success_rate", "avg_time_s", "avg_iters",
    "n_maxiter", "n_fixedpoint", "n_singular", "n_nogsmroot",
)

# config key -> (SolverConfig field, parser)
_SOLVER_KEYS = {
    "eps": ("epsilon", float),
    "max_iter": ("max_iter", int),
    "gamma": ("gamma", float),
    "N": ("switch_N", int),
    "delta": ("switch_delta", float),
    "tie": ("tie_rule", str),
}
_CAMPAIGN_KEYS = {"family", "n", "m", "r", "alpha", "trials", "seed", "solvers", "out", "jobs"}
_NEEDS_MINUS_IDENTITY = {"gnm", "gsm"}
_NEEDS_SQUARE = {"picard"}


@dataclass(frozen=True)
class Campaign:
    generator: GenConfig
    trials: int
    solvers: tuple
    config: SolverConfig = field(default_factory=SolverConfig)
    out_path: str | None = None
    jobs: int = 1

    def __post_init__(self):
        if self.trials < 1:
            raise CampaignConfigError("trials must be at least 1")
        if not self.solvers:
            raise CampaignConfigError("the solver list is empty")
        for s in self.solvers:
            if s not in SOLVERS:
                raise CampaignConfigError(f"unknown solver {s!r}")
        if self.jobs < 1:
            raise CampaignConfigError("jobs must be at least 1")
        gen = self.generator
        if gen.family is Family.GAUSSIAN_RECT:
            bad = [s for s in self.solvers if s in _NEEDS_MINUS_IDENTITY]
            if gen.m != gen.n:
                bad += [s for s in self.solvers if s in _NEEDS_SQUARE]
            if bad:
                raise CampaignConfigError(
                    f"solvers {', '.join(bad)} are not applicable to example3 instances "
                    f"of shape ({gen.m}, {gen.n})"
                )


@dataclass(frozen=True)
class TrialRecord:
    trial: int
    solver: str
    status: Status
    iterations: int
    wallclock: float
    final_residual: float
    true_residual_at_x_star: float
    failed_iteration: int | None = None
    phase_iters: tuple | None = None


@dataclass(frozen=True)
class CampaignRow:
    solver: str
    trials: int
    successes: int
    avg_time_success: float
    avg_iters_success: float
    failure_breakdown: dict

    @property
    def success_rate(self):
        return self.successes / self.trials

    def csv_values(self):
        b = self.failure_breakdown
        return [
            self.solver, str(self.trials), str(self.successes), _fmt(self.success_rate),
            _fmt(self.avg_time_success), _fmt(self.avg_iters_success),
            str(b.get(Status.MAX_ITER, 0)), str(b.get(Status.FIXED_POINT_NOT_SOLUTION, 0)),
            str(b.get(Status.SINGULAR_SYSTEM, 0)), str(b.get(Status.NO_GSM_ROOT, 0)),
        ]


def _fmt(v):
    return "nan" if math.isnan(v) else f"{v:.6g}"


def parse_config_text(text):
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise CampaignConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise CampaignConfigError(f"line {lineno}: empty key")
        out[key] = value
    return out


def campaign_from_mapping(settings):
    """Build a :class:`Campaign` from string-valued settings.

    Raises
    ------
    CampaignConfigError
        On unknown keys, unparsable values or inconsistent combinations.
    """
    unknown = set(settings) - _CAMPAIGN_KEYS - set(_SOLVER_KEYS)
    if unknown:
        raise CampaignConfigError(f"unknown keys: {', '.join(sorted(unknown))}")
    try:
        family = Family(settings.get("family", "example1"))
        n = int(settings["n"])
        m = None
        if family is Family.GAUSSIAN_RECT:
            if "m" in settings:
                m = int(settings["m"])
            elif "r" in settings:
                m = max(1, round(float(settings["r"]) * n))
            else:
                raise CampaignConfigError("example3 needs m or r")
        gen = GenConfig(family, n, m=m, alpha=int(settings.get("alpha", 0)),
                      seed=int(settings.get("seed", 0)))
        solver_kwargs = {
            fname: conv(settings[key]) for key, (fname, conv) in _SOLVER_KEYS.items() if key in settings
        }
        cfg = SolverConfig(**solver_kwargs)
        solvers = tuple(s.strip() for s in settings.get("solvers", "map").split(",") if s.strip())
        return Campaign(gen, int(settings.get("trials", 1)), solvers, cfg,
                        settings.get("out") or None, int(settings.get("jobs", 1)))
    except KeyError as exc:
        raise CampaignConfigError(f"missing required key {exc.args[0]!r}") from None
    except CampaignConfigError:
        raise
    except ValueError as exc:
        raise CampaignConfigError(str(exc)) from None


def load_campaign(path, overrides=None):
    with open(path) as fh:
        settings = parse_config_text(fh.read())
    settings.update(overrides or {})
    return campaign_from_mapping(settings)


def _run_trial(campaign, trial):
    inst = campaign.generator.generate(trial)
    planted = residual(inst.problem, inst.x_star)
    records = []
    for name in campaign.solvers:
        rep = solve(inst.problem, name, campaign.config)
        records.append(TrialRecord(trial, name, rep.status, rep.iterations, rep.wallclock,
                                   rep.final_residual, planted, rep.failed_iteration,
                                   rep.phase_iters))
    log.info("trial %d: %s", trial, "; ".join(
        f"{r.solver} {r.status.value} it={r.iterations} res={r.final_residual:.3g}" for r in records))
    return records


def run_trials(campaign):
    """Run every trial and return the records in trial order, then solver order."""
    trials = range(campaign.trials)
    if campaign.jobs == 1:
        per_trial = [_run_trial(campaign, k) for k in trials]
    else:
        with ThreadPoolExecutor(max_workers=campaign.jobs) as pool:
            per_trial = list(pool.map(lambda k: _run_trial(campaign, k), trials))
    return [rec for recs in per_trial for rec in recs]


def summarize(campaign, records):
    rows = []
    for name in campaign.solvers:
        mine = [r for r in records if r.solver == name]
        ok = [r for r in mine if r.status is Status.CONVERGED]
        breakdown = {}
        for r in mine:
            if r.status is not Status.CONVERGED:
                breakdown[r.status] = breakdown.get(r.status, 0) + 1
        avg_t = sum(r.wallclock for r in ok) / len(ok) if ok else math.nan
        avg_k = sum(r.iterations for r in ok) / len(ok) if ok else math.nan
        rows.append(CampaignRow(name, len(mine), len(ok), avg_t, avg_k, breakdown))
    return rows


def run_campaign(campaign):
    return summarize(campaign, run_trials(campaign))


def rows_to_csv(rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        writer.writerow(row.csv_values())
    return buf.getvalue()


def rows_to_markdown(rows):
    lines = ["| " + " | ".join(CSV_COLUMNS) + " |", "|" + "---|" * len(CSV_COLUMNS)]
    lines += ["| " + " | ".join(row.csv_values()) + " |" for row in rows]
    return "\n".join(lines) + "\n"
