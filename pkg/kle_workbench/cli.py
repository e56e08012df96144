# ABOUTME: Command-line entry point: attack, sweep, verify, grover and predict subcommands.
# ABOUTME: Configures logging and optional Sentry, maps outcomes to exit codes 0 / 2 / 1.
import argparse
import asyncio
import json
import logging
import math
import sys
from pathlib import Path

import numpy as np
from pydantic import ValidationError

from . import config as _config
from .attacks import ATTACKS
from .engine.cost_model import KNOWN_ATTACKS, ledger_predict
from .engine.grover import AUTO, SearchSpace, closed_form_probability, grover_statevector
from .errors import WorkbenchError
from .models import ExperimentConfig, PredictedExponents
from .runner import run_attack, run_sweep, write_sweep_csv
from .verification import Suite, run_suite

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 2
EXIT_USAGE = 1


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        raise UsageError(f"{self.prog}: {message}")


def configure() -> None:
    logging.basicConfig(
        level=getattr(logging, _config.LOG_LEVEL, logging.INFO),
        format="%(asctime)s %(levelname)s [%(name)s] %(message)s",
        stream=sys.stderr,
    )

    if _config.SENTRY_DSN:
        try:
            import sentry_sdk
            sentry_sdk.init(dsn=_config.SENTRY_DSN, traces_sample_rate=0.1)
        except Exception:
            logging.warning("Sentry initialization failed; error tracking disabled")


def _int_list(text: str) -> list[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _iterations(text: str):
    if text == AUTO:
        return AUTO
    try:
        return int(text)
    except ValueError:
        raise argparse.ArgumentTypeError("iterations must be 'auto' or an integer") from None


def _add_experiment_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path, help="JSON file with experiment fields; flags override it")
    parser.add_argument("--name", dest="attack", help=f"attack id: {', '.join(ATTACKS)}")
    parser.add_argument("--kappa", type=int)
    parser.add_argument("--n", type=int)
    parser.add_argument("--scheme")
    parser.add_argument("--middle", dest="middle_kind")
    parser.add_argument("--share-ciphers", action="store_const", const=True, default=None)
    parser.add_argument("--outer")
    parser.add_argument("--distinguisher", help="SITM distinguisher kind; defaults to the middle layer's")
    parser.add_argument("--r", type=int)
    parser.add_argument("--t", type=int)
    parser.add_argument("--backend")
    parser.add_argument("--model")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--out", type=Path)
    parser.add_argument("--timings", action="store_const", const=True, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="kle-workbench", description="Quantum MITM and SITM attack workbench")
    sub = parser.add_subparsers(dest="command", required=True)

    attack = sub.add_parser("attack", help="run one seeded attack and write its JSON report")
    _add_experiment_flags(attack)

    sweep = sub.add_parser("sweep", help="run trials over a parameter grid into a CSV table")
    _add_experiment_flags(sweep)
    sweep.add_argument("--trials", type=int)
    sweep.add_argument("--kappa-values", type=_int_list)
    sweep.add_argument("--n-values", type=_int_list)
    sweep.add_argument("--r-values", type=_int_list)

    verify = sub.add_parser("verify", help="run ground-truth verification suites")
    verify.add_argument("--suite", choices=[s.value for s in Suite], default=Suite.ALL.value)
    verify.add_argument("--trials", type=int, default=100)
    verify.add_argument("--seed", type=int, default=0)

    grover = sub.add_parser("grover", help="statevector Grover demo")
    grover.add_argument("--width", type=int, required=True)
    grover.add_argument("--marked", type=int, default=1)
    grover.add_argument("--iterations", type=_iterations, default=AUTO)
    grover.add_argument("--shots", type=int, default=1000)
    grover.add_argument("--seed", type=int, default=0)
    grover.add_argument("--full-vector", action="store_true")

    predict = sub.add_parser("predict", help="predicted exponents of every attack at (kappa, n)")
    predict.add_argument("--kappa", type=int, required=True)
    predict.add_argument("--n", type=int, required=True)
    predict.add_argument("--r", type=int)
    return parser


def _experiment(args: argparse.Namespace, *extra: str) -> ExperimentConfig:
    fields = [
        "attack", "kappa", "n", "scheme", "middle_kind", "share_ciphers", "outer", "distinguisher", "r", "t",
        "backend", "model", "seed", "out", "timings", *extra,
    ]
    return ExperimentConfig.from_sources(args.config, **{name: getattr(args, name) for name in fields})


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        print(text)
        return
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(text + "\n")


def cmd_attack(args: argparse.Namespace) -> int:
    config = _experiment(args)
    report = run_attack(config)
    _emit(report.model_dump_json(indent=2), config.out)
    return EXIT_OK if report.success else EXIT_FAILED


def cmd_sweep(args: argparse.Namespace) -> int:
    config = _experiment(args, "trials", "kappa_values", "n_values", "r_values")
    if config.out is None:
        raise UsageError("sweep needs --out (or 'out' in the config file) for the CSV table")
    groups = asyncio.run(run_sweep(config))
    write_sweep_csv(groups, config.out)
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    results = run_suite(args.suite, args.trials, args.seed)
    for result in results:
        print(result.line())
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAILED


def cmd_grover(args: argparse.Namespace) -> int:
    size = 1 << args.width
    if not 1 <= args.marked <= size:
        raise UsageError(f"--marked must lie in 1..{size}")
    rng = np.random.default_rng(args.seed)
    marked = np.sort(rng.choice(size, size=args.marked, replace=False)).astype(np.uint64)
    space = SearchSpace(args.width, lambda xs: np.isin(xs, marked), expected_marked=args.marked)
    outcome = grover_statevector(
        space, args.iterations, rng=rng, shots=args.shots, full_vector=args.full_vector
    )
    hits = int(np.isin(np.array(outcome.samples, dtype=np.uint64), marked).sum())
    expected = closed_form_probability(size, args.marked, outcome.iterations)
    print(json.dumps({
        "width": args.width,
        "marked": args.marked,
        "iterations": outcome.iterations,
        "success_probability": round(outcome.success_probability, 12),
        "closed_form_probability": round(expected, 12),
        "max_error": abs(outcome.success_probability - expected),
        "shots": args.shots,
        "hit_frequency": hits / args.shots if args.shots else math.nan,
        "max_norm_drift": outcome.max_norm_drift,
    }, indent=2))
    return EXIT_OK


def cmd_predict(args: argparse.Namespace) -> int:
    table = {}
    for attack_id in KNOWN_ATTACKS:
        prediction = ledger_predict(attack_id, args.kappa, args.n, args.r)
        table[attack_id] = PredictedExponents.from_prediction(prediction).model_dump(mode="json")
    print(json.dumps(table, indent=2))
    return EXIT_OK


_COMMANDS = {
    "attack": cmd_attack,
    "sweep": cmd_sweep,
    "verify": cmd_verify,
    "grover": cmd_grover,
    "predict": cmd_predict,
}


def main(argv: list[str] | None = None) -> int:
    configure()
    try:
        args = build_parser().parse_args(argv)
        return _COMMANDS[args.command](args)
    except (UsageError, ValidationError, WorkbenchError, FileNotFoundError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
