"""Command-line front end for the experiment pipeline.

Exit codes: 0 success, 2 configuration error, 3 numerical failure,
4 completed with partial results.
"""

import argparse
import csv
import json
import sys
from importlib import resources
from pathlib import Path

import numpy as np

from sehs.errors import ConfigError, DomainError, NumericalError, SehsError
from sehs.pipeline.config import ExperimentConfig, load_config
from sehs.pipeline import phases

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_PARTIAL = 4


def resolve_config(spec: str) -> ExperimentConfig:
    """Load a YAML config from a path, or a named bundled preset."""
    path = Path(spec)
    if path.exists():
        return load_config(path)
    preset = resources.files("sehs.presets") / f"{spec}.yaml"
    if preset.is_file():
        with resources.as_file(preset) as real:
            return load_config(real)
    raise ConfigError(f"config not found: {spec!r} is neither a file nor a "
                      "bundled preset")


def list_presets():
    return sorted(p.name[:-5] for p in resources.files("sehs.presets").iterdir()
                  if p.name.endswith(".yaml"))


def _add_run_args(parser):
    parser.add_argument("--config", "-c", required=True,
                        help="YAML config path or bundled preset name")
    parser.add_argument("--run-dir", "-o", required=True,
                        help="run directory for artifacts and manifests")


def cmd_simulate(args):
    config = resolve_config(args.config)
    result = phases.run_phase1(config, args.run_dir)
    print(f"simulate: {result['n_passages']} passages, "
          f"{len(result['quarantined'])} quarantined -> "
          f"{result['energy_table']}")
    return EXIT_OK


def cmd_dataset(args):
    config = resolve_config(args.config)
    result = phases.run_phase2(config, args.run_dir)
    print(f"dataset: {result['n_images']} images, "
          f"{len(result['excluded'])} excluded")
    return EXIT_OK


def cmd_train(args):
    config = resolve_config(args.config)
    result = phases.run_phase3_train(config, args.run_dir)
    print(f"train: {result['n_checkpoints']} checkpoints, "
          f"{len(result['failed'])} failed runs")
    return EXIT_PARTIAL if result["failed"] else EXIT_OK


def cmd_evaluate(args):
    config = resolve_config(args.config)
    result = phases.run_phase3_evaluate(config, args.run_dir)
    print(f"evaluate: wrote {result['s_table']} and {result['di_table']}")
    return EXIT_OK


def cmd_optimize(args):
    config = resolve_config(args.config)
    result = phases.run_phase4(config, args.run_dir)
    print(f"optimize: front of {result['front_size']} designs -> "
          f"{result['pareto']}")
    return EXIT_OK


def cmd_report(args):
    config = resolve_config(args.config)
    result = phases.report(config, args.run_dir)
    print(f"report: {len(result['bundle'])} artifacts -> "
          f"{result['summary']}")
    if result["gaps"]:
        print("missing: " + ", ".join(result["gaps"]))
        return EXIT_PARTIAL
    return EXIT_OK


def cmd_power_budget(args):
    budget = phases.PowerBudget(p_sensing_uw=args.p_sensing,
                                p_sample_uw=args.p_sample,
                                p_sleep_uw=args.p_sleep,
                                t_sample_s=args.t_sample,
                                t_sleep_s=args.t_sleep)
    energy = phases.energy_consumption(budget)
    payload = {"p_sensing_uw": args.p_sensing, "p_sample_uw": args.p_sample,
               "p_sleep_uw": args.p_sleep, "t_sample_s": args.t_sample,
               "t_sleep_s": args.t_sleep, "energy_j": energy}
    if args.output:
        Path(args.output).write_text(json.dumps(payload, indent=2))
    print(f"energy per cycle: {energy:.6g} J")
    return EXIT_OK


def cmd_freq_map(args):
    from sehs.peh import fundamental_frequency_map

    lengths = [float(v) for v in args.lengths.split(",")]
    ratios = [float(v) for v in args.aspect_ratios.split(",")]
    grid = fundamental_frequency_map(lengths, ratios, tip_mass=args.tip_mass)
    out = Path(args.output)
    with out.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["length_m"] + [f"f1_hz_r{r:g}" for r in ratios])
        for length, row in zip(lengths, grid):
            writer.writerow([f"{length:.9g}"] + [f"{v:.9g}" for v in row])
    print(f"freq-map: {len(lengths)}x{len(ratios)} grid -> {out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sehs",
        description="Bridge-harvester simulation, detection, and design "
                    "optimization pipeline.",
        epilog="bundled presets: " + ", ".join(list_presets()))
    sub = parser.add_subparsers(dest="command", required=True)

    for name, func, help_text in (
            ("simulate", cmd_simulate,
             "phase 1: vehicle passages, voltages, energy table"),
            ("dataset", cmd_dataset,
             "phase 2: time-frequency images from phase-1 traces"),
            ("train", cmd_train,
             "phase 3a: train detectors per design and seed"),
            ("evaluate", cmd_evaluate,
             "phase 3b: calibrate thresholds and score test sets"),
            ("optimize", cmd_optimize,
             "phase 4: surrogates and bi-objective design search"),
            ("report", cmd_report,
             "bundle result tables and a JSON summary")):
        p = sub.add_parser(name, help=help_text)
        _add_run_args(p)
        p.set_defaults(func=func)

    p = sub.add_parser("power-budget",
                       help="energy per acquisition cycle for a node "
                            "power profile")
    p.add_argument("--p-sensing", type=float, required=True,
                   help="sensing power [uW]; negative for net harvesting")
    p.add_argument("--p-sample", type=float, required=True,
                   help="sampling/processing power [uW]")
    p.add_argument("--p-sleep", type=float, required=True,
                   help="sleep power [uW]")
    p.add_argument("--t-sample", type=float, required=True,
                   help="active time per cycle [s]")
    p.add_argument("--t-sleep", type=float, required=True,
                   help="sleep time per cycle [s]")
    p.add_argument("--output", help="optional JSON output path")
    p.set_defaults(func=cmd_power_budget)

    p = sub.add_parser("freq-map",
                       help="first-frequency grid over harvester lengths "
                            "and aspect ratios")
    p.add_argument("--lengths", required=True,
                   help="comma-separated lengths [m]")
    p.add_argument("--aspect-ratios", default="1.0",
                   help="comma-separated width/length ratios")
    p.add_argument("--tip-mass", type=float, default=0.0,
                   help="tip mass [kg]")
    p.add_argument("--output", required=True, help="output CSV path")
    p.set_defaults(func=cmd_freq_map)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, DomainError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except SehsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
