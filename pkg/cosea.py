""" Command-line front end

    python -m cosea check FILE [--suite NAME ...] [--samples N] [--seed S] [--tol NAME=VAL ...] [--out PATH]
    python -m cosea decompose FILE
    python -m cosea spectrum FILE EFFECT
    python -m cosea condition FILE STATE EFFECT
    python -m cosea represent FILE [--anchor CONTEXT]
    python -m cosea audit-inverse FILE [A B] [--samples N]

Exit status: 0 when every check passes, 1 on a failed check or a module error, 2 on bad input.
"""
import argparse
import logging
import os
import sys

from hydra import compose, initialize_config_dir
from omegaconf import DictConfig
from omegaconf.errors import OmegaConfBaseException
from rich.console import Console

from src.effects import errors
from src.effects.core import DEFAULT_TOLERANCE
from src.cli import emit_report, parse_algebra_file, run_command
from src.cli.commands import INPUT_ERRORS
from src.utils import registry
from src.utils.config import to_container
from src.utils.run import get_logger, print_config, process_config, setup_logging

log = get_logger("src.cosea")

CONFIG_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), "configs")


def parse_tolerances(items):
    """--tol NAME=VAL flags as a dict"""
    tolerances = {}
    for item in items or []:
        name, sep, value = item.partition("=")
        if not sep:
            raise errors.ValidationError(f"--tol expects NAME=VAL, got '{item}'", name="tol")
        if name not in DEFAULT_TOLERANCE:
            raise errors.UnknownName(f"unknown tolerance '{name}' (one of {sorted(DEFAULT_TOLERANCE)})", name=name)
        try:
            tolerances[name] = float(value)
        except ValueError:
            raise errors.ValidationError(f"--tol {name} needs a number, got '{value}'", name="tol")
    return tolerances


def validate_seed(value, source):
    """A seed is a non-negative integer; booleans and strings are rejected"""
    if isinstance(value, bool) or not isinstance(value, int) or value < 0:
        raise errors.ValidationError(f"{source} must be a non-negative integer, got {value!r}", name="seed")
    return value


def load_config(args) -> DictConfig:
    """Compose configs/config.yaml with the flags as overrides, once per requested suite"""
    overrides = []
    if args.samples is not None:
        overrides.append(f"audit.samples={args.samples}")
    if args.format is not None:
        overrides.append(f"report.format={args.format}")
    if args.verbose:
        overrides += ["debug=true", "print_config=true"]
    suites = args.suite or [None]
    for name in suites:
        if name is not None and name not in registry.suite:
            raise errors.UnknownName(f"unknown suite '{name}' (one of {sorted(registry.suite)})", name=name)

    with initialize_config_dir(config_dir=CONFIG_DIR, version_base=None):
        composed = [
            compose(config_name="config.yaml", overrides=overrides + ([f"suite={name}"] if name else []))
            for name in suites
        ]
    try:
        seed = composed[0].seed
    except OmegaConfBaseException as e:
        raise errors.ValidationError(f"COSEA_SEED does not decode: {e}", name="seed")
    seed = validate_seed(seed, "COSEA_SEED")
    config = process_config(composed[0])
    config.seed = seed
    config.suites = [c.suite for c in composed]
    config.args = list(args.args)
    config.anchor = args.anchor
    return config


def build_parser():
    parser = argparse.ArgumentParser(prog="cosea", description="Audit and analyse convex sequential effect algebras.")
    parser.add_argument("command", choices=list(registry.command), help="Subcommand")
    parser.add_argument("file", help="Algebra document (YAML)")
    parser.add_argument("args", nargs="*", help="Names of effects, states or contexts used by the subcommand")
    parser.add_argument("--suite", action="append", help="Check suite (repeatable)", choices=list(registry.suite))
    parser.add_argument("--samples", type=int, help="Samples per check")
    parser.add_argument("--seed", type=int, help="Seed; defaults to the document's seed, then COSEA_SEED, then 0")
    parser.add_argument("--tol", action="append", metavar="NAME=VAL", help="Tolerance override (repeatable)")
    parser.add_argument("--anchor", help="Context used as the target space of `represent`")
    parser.add_argument("--out", help="Write the machine-readable report to this path")
    parser.add_argument("--format", choices=["yaml", "json"], help="Format of the machine-readable report")
    parser.add_argument("--verbose", action="store_true", help="Debug logs and the composed config")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    setup_logging(logging.DEBUG if args.verbose else logging.INFO)
    try:
        config = load_config(args)
        if config.get("print_config"):
            print_config(config, resolve=True)
        document = parse_algebra_file(
            args.file, defaults=to_container(config.tolerance), overrides=parse_tolerances(args.tol)
        )
        if args.seed is not None:
            config.seed = validate_seed(args.seed, "--seed")
        elif document.seed is not None:
            config.seed = document.seed
        report = run_command(args.command, document, config)
        return emit_report(report, args.out, config.report.format, Console(), timing=bool(config.report.timing))
    except INPUT_ERRORS as e:
        log.error(f"{type(e).__name__}: {e}")
        return 2


if __name__ == "__main__":
    sys.exit(main())
