"""
Command-line front end.

    python cli.py simulate --game rps.json --lambda 1 --z0 1,0.5,0 --t-end 50
    python cli.py equilibrium --game rps.json --lambda 1
    python cli.py verify --n 2,3,5,10 --lambda 0.1,1,10 --samples 10000 --seed 7
    python cli.py replicator --x 0.2,0.3,0.5 --u 1,0,0 --lambda 1

Exit codes: 0 success, 1 numerical failure (non-convergence, divergence),
2 usage or configuration error.
"""

import argparse
import logging
import sys
from typing import Callable, Optional, Sequence

import numpy as np
from pydantic import ValidationError

from config.logger import setup_logging
from config.settings import settings
from core.exceptions import (
    IntegrationDivergedError,
    InvalidInputError,
    NotConvergedError,
    SolverDivergedError,
)
from dependencies import (
    get_equilibrium_service,
    get_game_repo,
    get_game_service,
    get_report_repo,
    get_simulation_service,
    get_trajectory_repo,
)
from models.models import (
    IntegratorConfig,
    ReplicatorResponse,
    RunManifest,
    SolverConfig,
    Subcommand,
)
from services.dynamics_service import replicator_field
from services.property_service import run_suite

logger = logging.getLogger("cli")

EXIT_OK = 0
EXIT_NUMERICAL = 1
EXIT_USAGE = 2


class UsageError(Exception):
    pass


def _floats(text: str) -> list[float]:
    try:
        return [float(item) for item in text.split(",") if item.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def _ints(text: str) -> list[int]:
    try:
        return [int(item) for item in text.split(",") if item.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


VECTOR_FLAGS = ("--lambda", "--z0", "--x", "--u")


def _join_vector_flags(argv: Sequence[str]) -> list[str]:
    """Rewrite `--z0 -1,0` as `--z0=-1,0` so argparse does not read the value as an option."""
    joined: list[str] = []
    tokens = iter(argv)
    for token in tokens:
        if token in VECTOR_FLAGS:
            value = next(tokens, None)
            joined.append(token if value is None else f"{token}={value}")
        else:
            joined.append(token)
    return joined


def _fmt(values: Sequence[float]) -> str:
    return ",".join("%.17g" % v for v in values)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--game", help="game file (JSON)")
    common.add_argument("--lambda", dest="lambdas", type=_floats, help="inverse temperature(s)")
    common.add_argument("--z0", type=_floats, help="initial scores, comma-separated")
    common.add_argument("--dt", type=float)
    common.add_argument("--t-end", dest="t_end", type=float)
    common.add_argument("--record-every", dest="record_every", type=int)
    common.add_argument("--tol", type=float)
    common.add_argument("--max-iter", dest="max_iter", type=int)
    common.add_argument("--damping", type=float)
    common.add_argument("--samples", type=int)
    common.add_argument("--n", dest="dimensions", type=_ints, help="dimensions, comma-separated")
    common.add_argument("--seed", type=int)
    common.add_argument("--out", help="output file")
    common.add_argument("--log-level", dest="log_level", default=None)

    parser = argparse.ArgumentParser(
        prog="softmax-toolkit",
        description="Softmax / log-sum-exp operators and score-dynamics simulator",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)
    sub.add_parser("simulate", parents=[common], help="integrate the score dynamics")
    sub.add_parser("equilibrium", parents=[common], help="solve for the logit equilibrium")
    sub.add_parser("verify", parents=[common], help="run the operator property suite")
    replicator = sub.add_parser(
        "replicator", parents=[common], help="evaluate the replicator vector field"
    )
    replicator.add_argument("--x", type=_floats, required=True, help="mixed strategy")
    replicator.add_argument("--u", type=_floats, required=True, help="payoff vector")
    return parser


def _pick(value, default):
    return default if value is None else value


def manifest_from_args(args: argparse.Namespace) -> RunManifest:
    integrator = IntegratorConfig(
        dt=_pick(args.dt, settings.DEFAULT_DT),
        t_end=_pick(args.t_end, settings.DEFAULT_T_END),
        record_every=_pick(args.record_every, settings.DEFAULT_RECORD_EVERY),
    )
    solver = SolverConfig(
        tol=_pick(args.tol, settings.SOLVER_TOL),
        max_iter=_pick(args.max_iter, settings.SOLVER_MAX_ITER),
        damping=_pick(args.damping, settings.SOLVER_DAMPING),
    )
    subcommand = Subcommand(args.subcommand)
    default_lambdas = (
        settings.ENSEMBLE_LAMBDAS
        if subcommand == Subcommand.VERIFY
        else [settings.DEFAULT_LAMBDA]
    )
    manifest = RunManifest(
        subcommand=subcommand,
        game=args.game,
        lambdas=_pick(args.lambdas, default_lambdas),
        z0=args.z0,
        x=getattr(args, "x", None),
        u=getattr(args, "u", None),
        integrator=integrator,
        solver=solver,
        samples=_pick(args.samples, settings.ENSEMBLE_SAMPLES),
        dimensions=_pick(args.dimensions, settings.ENSEMBLE_DIMENSIONS),
        seed=_pick(args.seed, settings.DEFAULT_SEED),
        out=args.out,
    )
    if subcommand != Subcommand.VERIFY and len(manifest.lambdas) != 1:
        raise UsageError(f"{subcommand.value} takes a single --lambda value")
    if subcommand in (Subcommand.SIMULATE, Subcommand.EQUILIBRIUM) and not manifest.game:
        raise UsageError(f"{subcommand.value} requires --game")
    return manifest


# ---------------------- SUBCOMMANDS ----------------------


def cmd_simulate(manifest: RunManifest) -> int:
    game = get_game_service(get_game_repo()).load(manifest.game)
    out = manifest.out or "trajectory.csv"
    try:
        _, summary = get_simulation_service(get_trajectory_repo()).simulate(
            game,
            manifest.lam,
            manifest.z0,
            manifest.integrator,
            manifest.solver,
            out=out,
        )
    except IntegrationDivergedError as exc:
        print(f"integration diverged: {exc}; partial trajectory kept in {out}", file=sys.stderr)
        return EXIT_NUMERICAL

    print(f"final_x: {_fmt(summary.final_x)}")
    print(f"final_z: {_fmt(summary.final_z)}")
    print(f"final_V: {'n/a' if summary.final_v is None else '%.17g' % summary.final_v}")
    print(f"rest_point_residual: {summary.rest_point_residual:.17g}")
    print(f"trajectory: {out}")
    return EXIT_OK


def cmd_equilibrium(manifest: RunManifest) -> int:
    game = get_game_service(get_game_repo()).load(manifest.game)
    out = manifest.out or "equilibrium.json"
    try:
        record = get_equilibrium_service(get_report_repo()).solve_and_save(
            game, manifest.lam, manifest.z0, manifest.solver, out
        )
    except SolverDivergedError as exc:
        print(f"solver diverged: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL

    print(f"x_star: {_fmt(record.x_star)}")
    print(f"converged: {str(record.converged).lower()}")
    print(f"iterations: {record.iterations}")
    print(f"certified_contraction: {str(record.certified_contraction).lower()}")
    if not record.converged:
        print(f"not converged: residual {record.residual:.17g}", file=sys.stderr)
        return EXIT_NUMERICAL
    print(f"residual: {record.residual:.17g}")
    return EXIT_OK


def cmd_verify(manifest: RunManifest) -> int:
    report = run_suite(
        manifest.dimensions,
        manifest.lambdas,
        manifest.samples,
        manifest.seed,
        lo=settings.ENSEMBLE_LOW,
        hi=settings.ENSEMBLE_HIGH,
    )
    out = manifest.out or "verify.json"
    get_report_repo().save(out, report)
    for item in report.reports:
        if not item.passed:
            print(
                f"{item.status.value}: {item.property} n={item.dimension} "
                f"lambda={item.lam} violations={item.violations}"
            )
    print(f"checks: {len(report.reports)} passed: {str(report.passed).lower()} report: {out}")
    return EXIT_OK if report.passed else EXIT_NUMERICAL


def cmd_replicator(manifest: RunManifest) -> int:
    field = replicator_field(np.asarray(manifest.x), np.asarray(manifest.u), manifest.lam)
    print(f"field: {_fmt(field)}")
    if manifest.out:
        get_report_repo().save(manifest.out, ReplicatorResponse(field=field.tolist()))
    return EXIT_OK


COMMANDS: dict[Subcommand, Callable[[RunManifest], int]] = {
    Subcommand.SIMULATE: cmd_simulate,
    Subcommand.EQUILIBRIUM: cmd_equilibrium,
    Subcommand.VERIFY: cmd_verify,
    Subcommand.REPLICATOR: cmd_replicator,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(_join_vector_flags(sys.argv[1:] if argv is None else argv))
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    setup_logging(args.log_level)

    try:
        manifest = manifest_from_args(args)
        logger.debug("%s manifest: %s", manifest.subcommand.value, manifest.model_dump_json())
        return COMMANDS[manifest.subcommand](manifest)
    except (UsageError, ValidationError, InvalidInputError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NotConvergedError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
