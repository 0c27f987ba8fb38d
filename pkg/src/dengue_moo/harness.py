"""Experiment campaigns and analysis exports.

A campaign runs each requested algorithm ``runs`` times with seeds
``base_seed + run_index`` and writes, under the output directory::

    <algorithm>/run_00_front.csv   f1,f2 sorted by f1
    <algorithm>/run_00_x.csv       decision vectors, same row order
    <algorithm>/run_00_log.csv     gen,funEval,pop_size,n_leaders,hv
    statistics.csv                 one row per algorithm

Output bytes depend only on the configuration, whether runs execute
sequentially or in worker processes.
"""

from __future__ import annotations

import csv
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import ddmoa2
from .baselines import gde3, ibea, moead, nsga2, smpso
from .core import FrontArchive, RunResult, dominates, make_rng, read_front_csv, write_front_csv
from .metrics import DEFAULT_REF_POINT, aggregate_runs, hypervolume_2d, total_hypervolume, write_statistics_csv
from .model import (
    DEFAULT_PARAMETERS,
    HORIZON_DAYS,
    N_STEPS,
    ModelParameters,
    ScalarCostWeights,
    evaluate_many,
    evaluate_objectives,
    integrate_rk4,
    scalar_cost,
    validate_control,
    write_trajectory_csv,
)
from .problems import DengueProblem

log = logging.getLogger(__name__)

ALGORITHMS = ("ddmoa2", "nsga2", "ibea", "gde3", "moead", "smpso")

PROFILES = {
    "paper": {"runs": 30, "max_eval": 100_000, "pop_size": 100},
    "desk": {"runs": 5, "max_eval": 20_000, "pop_size": 100},
}

# f2 targets (days of full-strength spraying) for the four showcased trade-offs,
# from the spraying-heavy end to no spraying at all.
DEFAULT_CASE_TARGETS = (60.0, 20.0, 5.0, 0.0)


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    algorithms: tuple[str, ...] = ("ddmoa2",)
    runs: int = 30
    seed: int = 1
    pop_size: int = 100
    max_eval: int = 100_000
    params: dict = field(default_factory=dict)
    ref_point: tuple[float, float] = DEFAULT_REF_POINT
    out_dir: str = "results"
    jobs: int = 1

    def __post_init__(self):
        unknown = [a for a in self.algorithms if a not in ALGORITHMS]
        if unknown:
            raise ConfigError(f"unknown algorithm(s): {', '.join(unknown)}; choose from {', '.join(ALGORITHMS)}")
        if not self.algorithms:
            raise ConfigError("no algorithm selected")
        if self.runs < 1:
            raise ConfigError("runs must be >= 1")
        if self.pop_size < 4 or self.pop_size % 2:
            raise ConfigError("pop_size must be an even number >= 4")
        if self.max_eval < self.pop_size:
            raise ConfigError("max_eval must be at least pop_size")
        if self.jobs < 1:
            raise ConfigError("jobs must be >= 1")
        try:
            self.model_parameters()
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def model_parameters(self) -> ModelParameters:
        return DEFAULT_PARAMETERS.replace(**self.params)


@dataclass
class CampaignResult:
    fronts: dict[str, list[FrontArchive]]
    hypervolumes: dict[str, list[float]]
    statistics_path: Path


def algorithm_config(name: str, pop_size: int, max_eval: int):
    if name == "ddmoa2":
        return ddmoa2.DdmoaConfig(mu=pop_size, max_eval=max_eval)
    if name == "nsga2":
        return nsga2.Nsga2Config(pop_size=pop_size, max_eval=max_eval)
    if name == "ibea":
        return ibea.IbeaConfig(pop_size=pop_size, max_eval=max_eval)
    if name == "gde3":
        return gde3.Gde3Config(pop_size=pop_size, max_eval=max_eval)
    if name == "moead":
        return moead.MoeadConfig(pop_size=pop_size, T=min(20, pop_size), max_eval=max_eval)
    if name == "smpso":
        return smpso.SmpsoConfig(swarm_size=pop_size, max_eval=max_eval)
    raise ConfigError(f"unknown algorithm {name!r}")


_RUNNERS = {
    "ddmoa2": ddmoa2.run,
    "nsga2": nsga2.run,
    "ibea": ibea.run,
    "gde3": gde3.run,
    "moead": moead.run,
    "smpso": smpso.run,
}


def run_algorithm(name: str, problem, pop_size: int, max_eval: int, seed: int, ref_point=DEFAULT_REF_POINT) -> RunResult:
    config = algorithm_config(name, pop_size, max_eval)
    return _RUNNERS[name](problem, config, make_rng(seed), ref_point=np.asarray(ref_point, dtype=np.float64))


def _run_task(task) -> RunResult:
    name, config, run_index = task
    problem = DengueProblem(config.model_parameters())
    return run_algorithm(name, problem, config.pop_size, config.max_eval, config.seed + run_index, config.ref_point)


def write_log_csv(rows, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(ddmoa2.LOG_HEADER)
        for gen, fun_eval, pop_size, n_leaders, hv in rows:
            writer.writerow([gen, fun_eval, pop_size, n_leaders, repr(float(hv))])


def run_campaign(config: ExperimentConfig) -> CampaignResult:
    """Run every (algorithm, run) pair and write fronts, logs and statistics."""
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    tasks = [(name, config, i) for name in config.algorithms for i in range(config.runs)]
    if config.jobs > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            results = list(pool.map(_run_task, tasks))
    else:
        results = []
        for task in tasks:
            log.info("running %s, run %d", task[0], task[2])
            results.append(_run_task(task))

    fronts: dict[str, list[FrontArchive]] = {name: [] for name in config.algorithms}
    hvs: dict[str, list[float]] = {name: [] for name in config.algorithms}
    for (name, _, i), result in zip(tasks, results):
        alg_dir = out / name
        alg_dir.mkdir(exist_ok=True)
        write_front_csv(result.front, alg_dir / f"run_{i:02d}_front.csv", alg_dir / f"run_{i:02d}_x.csv")
        write_log_csv(result.log, alg_dir / f"run_{i:02d}_log.csv")
        fronts[name].append(result.front)
        hvs[name].append(hypervolume_2d(result.front.F, config.ref_point))

    rows = [
        (name, aggregate_runs(hvs[name]), total_hypervolume([f.F for f in fronts[name]], config.ref_point))
        for name in config.algorithms
    ]
    stats_path = out / "statistics.csv"
    write_statistics_csv(rows, stats_path)
    return CampaignResult(fronts=fronts, hypervolumes=hvs, statistics_path=stats_path)


def sample_random_mapping(
    count: int,
    seed: int,
    params: ModelParameters = DEFAULT_PARAMETERS,
    draw=None,
    batch: int = 1000,
) -> np.ndarray:
    """Objectives of ``count`` controls drawn i.i.d. uniformly from the unit hypercube.

    ``draw(rng, shape)`` replaces the uniform sampler when given.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    rng = make_rng(seed)
    draw = draw or (lambda g, shape: g.random(shape))
    out = np.empty((count, 2))
    for start in range(0, count, batch):
        stop = min(start + batch, count)
        controls = np.asarray(draw(rng, (stop - start, N_STEPS + 1)), dtype=np.float64)
        out[start:stop] = evaluate_many(controls, params)
    return out


def write_objectives_csv(F: np.ndarray, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["f1", "f2"])
        for f1, f2 in F:
            writer.writerow([repr(float(f1)), repr(float(f2))])


def select_cases(F: np.ndarray, targets) -> list[int]:
    """Index of the member with ``f2`` nearest each target (first one on ties)."""
    targets = [float(t) for t in targets]
    for t in targets:
        if not 0.0 <= t <= HORIZON_DAYS:
            raise ValueError(f"case target {t} outside [0, {HORIZON_DAYS}]")
    return [int(np.argmin(np.abs(F[:, 1] - t))) for t in targets]


def export_cases(
    front_path: str | Path,
    x_path: str | Path | None,
    targets=DEFAULT_CASE_TARGETS,
    out_dir: str | Path = ".",
    params: ModelParameters = DEFAULT_PARAMETERS,
) -> list[Path]:
    """Re-simulate the front members nearest each target ``f2``; one trajectory CSV per case."""
    if x_path is None or not Path(x_path).exists():
        raise FileNotFoundError(f"decision-vector sidecar not found: {x_path}")
    front = read_front_csv(front_path, x_path)
    if len(front) == 0:
        raise ValueError("front file is empty")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    for label, idx in zip("ABCDEFGHIJKLMNOPQRSTUVWXYZ", select_cases(front.F, targets)):
        traj = integrate_rk4(params, np.clip(front.X[idx], 0.0, 1.0))
        path = out_dir / f"case_{label}.csv"
        write_trajectory_csv(traj, path)
        paths.append(path)
    return paths


def read_control_file(path: str | Path, steps: int = N_STEPS) -> np.ndarray:
    """One control value per line; blank lines are ignored."""
    values = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            text = line.strip()
            if not text:
                continue
            try:
                values.append(float(text))
            except ValueError:
                raise ValueError(f"{path}:{lineno}: not a number: {text!r}") from None
    return validate_control(np.array(values), steps)


def evaluate_reference_solution(
    control_path: str | Path,
    weights: ScalarCostWeights = ScalarCostWeights(),
    params: ModelParameters = DEFAULT_PARAMETERS,
) -> tuple[float, float, float]:
    """``(f1, f2, J)`` of an externally computed control schedule."""
    control = read_control_file(control_path)
    f1, f2 = evaluate_objectives(control, params)
    return f1, f2, scalar_cost(control, weights, params)


@dataclass(frozen=True)
class DominanceReport:
    dominating: int  # front members dominating the reference
    dominated: int  # front members dominated by the reference
    incomparable: int


def dominance_report(point, F: np.ndarray) -> DominanceReport:
    point = np.asarray(point, dtype=np.float64)
    dominating = sum(dominates(f, point) for f in F)
    dominated = sum(dominates(point, f) for f in F)
    return DominanceReport(dominating, dominated, len(F) - dominating - dominated)


def merge_config(base: ExperimentConfig, **changes) -> ExperimentConfig:
    return replace(base, **{k: v for k, v in changes.items() if v is not None})
