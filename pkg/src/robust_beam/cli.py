"""Command-line front end: robust-beam solve|sweep|montecarlo."""

import argparse
import logging
import os
import sys
from typing import Callable, Dict, List, Optional

from robust_beam.rblib.exceptions import ConfigError, SamplingExhaustedError
from robust_beam.rblib.experiment_config import ExperimentConfig
from robust_beam.rblib.experiments.MonteCarlo import MonteCarlo
from robust_beam.rblib.experiments.RobustSolve import RobustSolve
from robust_beam.rblib.experiments.WorstCaseSweep import WorstCaseSweep
from robust_beam.rblib.util import bps_to_gbps, rad_to_murad
from robust_beam.scheme_names import SolveStatus

LOG_ENV = "ROBUST_BEAM_LOG"
EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_INCOMPLETE = 2


def cmd_solve(experiment_config: ExperimentConfig) -> int:
    """Solve the robust angle for solve_T; exit 2 if the solver did not converge."""
    solve = RobustSolve(experiment_config)
    solve.write(experiment_config.out_dir)
    result = solve.result
    print(
        f"{result.status.value}: T={solve.T} theta*={rad_to_murad(result.theta_star):.6e} murad "
        f"UB={bps_to_gbps(result.ub_final):.9e} LB={bps_to_gbps(result.lb_final):.9e} Gbit/s "
        f"after {result.iterations} iterations"
    )
    return EXIT_OK if result.status is SolveStatus.Converged else EXIT_INCOMPLETE


def cmd_sweep(experiment_config: ExperimentConfig) -> int:
    """Worst-case rate of every scheme for every configured T."""
    sweep = WorstCaseSweep(experiment_config)
    (path,) = sweep.write(experiment_config.out_dir)
    print(f"worst-case sweep over T={list(experiment_config.time_slots)} written to {path}")
    return EXIT_OK


def cmd_montecarlo(experiment_config: ExperimentConfig) -> int:
    """Sum rates on sampled scenarios; exit 2 without output if sampling runs dry."""
    try:
        monte_carlo = MonteCarlo(experiment_config)
    except SamplingExhaustedError as error:
        print(
            f"sampling exhausted: {error.attempts} attempts with seed {error.seed}; "
            "no results written. Uniform rejection rarely accepts at long horizons; "
            "set \"sampler\": \"sequential\" in the config file",
            file=sys.stderr,
        )
        return EXIT_INCOMPLETE
    paths = monte_carlo.write(experiment_config.out_dir)
    raw, projected = monte_carlo.guarantee_violations()
    print(
        f"{len(monte_carlo.outcomes)} scenarios at T={monte_carlo.T}; robust guarantee "
        f"violations raw={raw} projected={projected}; written to {', '.join(map(str, paths))}"
    )
    return EXIT_OK


COMMANDS: Dict[str, Callable[[ExperimentConfig], int]] = {
    "solve": cmd_solve,
    "sweep": cmd_sweep,
    "montecarlo": cmd_montecarlo,
}


def build_parser() -> argparse.ArgumentParser:
    """Parser with one sub-command per experiment, all sharing the same options."""
    parser = argparse.ArgumentParser(
        prog="robust-beam",
        description="Robust divergence angle of an inter-satellite laser link.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "solve": "Solve the robust angle and write its convergence trace.",
        "sweep": "Worst-case rate of RA, SA and AA over the configured horizons.",
        "montecarlo": "Sum rates of RA, SA and AA on randomly sampled scenarios.",
    }
    for name, text in helps.items():
        s = sub.add_parser(name, help=text)
        s.add_argument("--config", required=True, help="JSON configuration file.")
        s.add_argument("--seed", type=int, default=None, help="Override the base seed.")
        s.add_argument("--out-dir", default=None, help="Output directory (default: cwd).")
        s.add_argument("--threads", type=int, default=None, help="Worker count.")
        s.add_argument(
            "--dump-graph",
            action="store_true",
            help="Write every adversary graph as CSV under <out-dir>/graphs.",
        )
    return parser


def configure_logging() -> None:
    """Log to stderr at the level named by ROBUST_BEAM_LOG (default WARNING)."""
    name = os.environ.get(LOG_ENV, "WARNING").upper()
    level = logging.getLevelName(name)
    if not isinstance(level, int):
        level = logging.WARNING
    logging.basicConfig(
        level=level, format="%(asctime)s %(levelname)s %(name)s: %(message)s"
    )


def main(argv: Optional[List[str]] = None) -> int:
    """Run the command line and return its exit code."""
    args = build_parser().parse_args(argv)
    configure_logging()
    try:
        experiment_config = ExperimentConfig.from_json(args.config).with_overrides(
            seed=args.seed,
            out_dir=args.out_dir,
            threads=args.threads,
            dump_graph=args.dump_graph or None,
        )
        return COMMANDS[args.command](experiment_config)
    except ConfigError as error:
        print(f"error: {error}", file=sys.stderr)
        return EXIT_CONFIG
