"""Command-line entry point: ``dengue-moo <command> ...``.

Exit codes: 0 success, 2 configuration error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from .core import read_front_csv
from .harness import (
    ALGORITHMS,
    DEFAULT_CASE_TARGETS,
    PROFILES,
    ConfigError,
    ExperimentConfig,
    dominance_report,
    evaluate_reference_solution,
    export_cases,
    run_campaign,
    sample_random_mapping,
    write_objectives_csv,
)
from .model import DEFAULT_PARAMETERS, ScalarCostWeights, constant_control, integrate_rk4, write_trajectory_csv

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3


def _float_pair(text: str) -> tuple[float, float]:
    try:
        a, b = (float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'f1,f2', got {text!r}") from None
    return a, b


def _float_list(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _model_overrides(items) -> dict:
    overrides = {}
    for item in items or ():
        name, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"--param expects NAME=VALUE, got {item!r}")
        try:
            overrides[name.strip()] = float(value)
        except ValueError:
            raise ConfigError(f"--param {name}: not a number: {value!r}") from None
    return overrides


def read_config_file(path: str | Path) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment.

    Keys mirror the long flags (``max-evals`` or ``max_evals``); model
    parameters are given as ``param.<name> = value``.
    """
    settings: dict = {}
    params: dict = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
            key = key.strip().replace("-", "_")
            value = value.strip()
            if key.startswith("param."):
                params.update(_model_overrides([f"{key[6:]}={value}"]))
            else:
                settings[key] = value
    known = {"algorithm", "runs", "seed", "max_evals", "pop_size", "ref_point", "out", "profile", "jobs"}
    unknown = set(settings) - known
    if unknown:
        raise ConfigError(f"{path}: unknown keys {sorted(unknown)}")
    if params:
        settings["params"] = params
    return settings


def build_experiment(args) -> ExperimentConfig:
    file_settings = read_config_file(args.config) if args.config else {}
    profile = args.profile or file_settings.get("profile", "paper")
    if profile not in PROFILES:
        raise ConfigError(f"unknown profile {profile!r}")
    values = dict(PROFILES[profile])

    def pick(flag_value, key, convert):
        if flag_value is not None:
            return flag_value
        if key in file_settings:
            try:
                return convert(file_settings[key])
            except (ValueError, argparse.ArgumentTypeError) as exc:
                raise ConfigError(f"config key {key}: {exc}") from None
        return None

    algorithm = pick(args.algorithm, "algorithm", str) or "ddmoa2"
    names = ALGORITHMS if algorithm == "all" else tuple(a.strip() for a in algorithm.split(","))
    runs = pick(args.runs, "runs", int)
    max_eval = pick(args.max_evals, "max_evals", lambda v: int(float(v)))
    pop_size = pick(args.pop_size, "pop_size", int)
    params = dict(file_settings.get("params", {}))
    params.update(_model_overrides(args.param))
    return ExperimentConfig(
        algorithms=names,
        runs=runs if runs is not None else values["runs"],
        seed=pick(args.seed, "seed", int) or 1,
        pop_size=pop_size if pop_size is not None else values["pop_size"],
        max_eval=max_eval if max_eval is not None else values["max_eval"],
        params=params,
        ref_point=pick(args.ref_point, "ref_point", _float_pair) or (3.0, 80.0),
        out_dir=pick(args.out, "out", str) or "results",
        jobs=pick(args.jobs, "jobs", int) or 1,
    )


def cmd_run(args) -> int:
    config = build_experiment(args)
    result = run_campaign(config)
    for name in config.algorithms:
        hv = np.median(result.hypervolumes[name])
        print(f"{name:8s} runs={config.runs} median_hv={hv:.6g}")
    print(f"statistics: {result.statistics_path}")
    return EXIT_OK


def cmd_sample(args) -> int:
    if args.count < 1:
        raise ConfigError("--count must be >= 1")
    F = sample_random_mapping(args.count, args.seed, DEFAULT_PARAMETERS.replace(**_model_overrides(args.param)))
    write_objectives_csv(F, args.out)
    print(f"wrote {len(F)} samples to {args.out}")
    return EXIT_OK


def cmd_export_cases(args) -> int:
    x_path = args.x or str(args.front).replace("_front.csv", "_x.csv")
    paths = export_cases(args.front, x_path, args.targets, args.out, DEFAULT_PARAMETERS.replace(**_model_overrides(args.param)))
    for p in paths:
        print(p)
    return EXIT_OK


def cmd_evaluate_control(args) -> int:
    params = DEFAULT_PARAMETERS.replace(**_model_overrides(args.param))
    try:
        weights = ScalarCostWeights(args.gamma_d, args.gamma_s)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    f1, f2, J = evaluate_reference_solution(args.control, weights, params)
    print(f"f1={f1!r}")
    print(f"f2={f2!r}")
    print(f"J={J!r}")
    if args.front:
        report = dominance_report((f1, f2), read_front_csv(args.front).F)
        print(f"front members dominating it: {report.dominating}")
        print(f"front members it dominates: {report.dominated}")
        print(f"incomparable: {report.incomparable}")
    return EXIT_OK


def cmd_simulate(args) -> int:
    params = DEFAULT_PARAMETERS.replace(**_model_overrides(args.param))
    if not 0.0 <= args.level <= 1.0:
        raise ConfigError("--level must lie in [0, 1]")
    write_trajectory_csv(integrate_rk4(params, constant_control(args.level)), args.out)
    print(f"wrote {args.out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dengue-moo", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="seeded multi-run campaign")
    run.add_argument("--config", help="key = value settings file")
    run.add_argument("--algorithm", help=f"one of {', '.join(ALGORITHMS)}, a comma list, or 'all'")
    run.add_argument("--runs", type=int)
    run.add_argument("--seed", type=int)
    run.add_argument("--max-evals", type=int)
    run.add_argument("--pop-size", type=int)
    run.add_argument("--ref-point", type=_float_pair)
    run.add_argument("--out")
    run.add_argument("--profile", choices=sorted(PROFILES))
    run.add_argument("--jobs", type=int)
    run.add_argument("--param", action="append", metavar="NAME=VALUE")
    run.set_defaults(func=cmd_run)

    sample = sub.add_parser("sample", help="objective image of uniform random controls")
    sample.add_argument("--count", type=int, default=100_000)
    sample.add_argument("--seed", type=int, default=1)
    sample.add_argument("--out", default="random_mapping.csv")
    sample.add_argument("--param", action="append", metavar="NAME=VALUE")
    sample.set_defaults(func=cmd_sample)

    cases = sub.add_parser("export-cases", help="trajectories of selected trade-off solutions")
    cases.add_argument("front", help="front CSV (f1,f2)")
    cases.add_argument("--x", help="decision sidecar; defaults to the *_x.csv next to the front")
    cases.add_argument("--targets", type=_float_list, default=DEFAULT_CASE_TARGETS, help="f2 targets, e.g. 60,20,5,0")
    cases.add_argument("--out", default="cases")
    cases.add_argument("--param", action="append", metavar="NAME=VALUE")
    cases.set_defaults(func=cmd_export_cases)

    ev = sub.add_parser("evaluate-control", help="objectives and quadratic cost of an external control")
    ev.add_argument("control", help="file with one control value per line")
    ev.add_argument("--gamma-d", type=float, default=1.0)
    ev.add_argument("--gamma-s", type=float, default=1.0)
    ev.add_argument("--front", help="front CSV to compare against by dominance")
    ev.add_argument("--param", action="append", metavar="NAME=VALUE")
    ev.set_defaults(func=cmd_evaluate_control)

    sim = sub.add_parser("simulate", help="trajectory under a constant control level")
    sim.add_argument("--level", type=float, default=0.0)
    sim.add_argument("--out", default="trajectory.csv")
    sim.add_argument("--param", action="append", metavar="NAME=VALUE")
    sim.set_defaults(func=cmd_simulate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
