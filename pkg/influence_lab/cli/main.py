"""
influence-lab command line: `python -m influence_lab <command> [--config FILE] [flags]`

Values come from the optional key=value config file first, then from explicit flags.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

import pydantic
from dotenv import dotenv_values

from influence_lab import __version__
from influence_lab.cli.base import BaseCommand
from influence_lab.cli.commands import bda, dagger, discretize, iscore, text, toy, train
from influence_lab.core.config import settings
from influence_lab.core.exceptions import EXIT_USAGE_ERROR
from influence_lab.schemas.run import GLOBAL_KEYS, RunConfig

logger = logging.getLogger(__name__)

COMMANDS: List[BaseCommand] = [
    iscore.Command(),
    discretize.Command(),
    bda.Command(),
    dagger.Command(),
    toy.Command(),
    text.Command(),
    train.Command(),
]

_NOT_PARAMS = ("command", "handler", "config")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="influence-lab",
        description="Influence-score variable screening, dagger features and gated neural classifiers.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subparsers = parser.add_subparsers(dest="command", required=True)
    for command in COMMANDS:
        sub = subparsers.add_parser(command.name, help=command.help, description=command.help)
        sub.add_argument("--config", help="key=value file with command and global settings")
        sub.add_argument("--out", help="output directory (default out)")
        sub.add_argument("--seed", type=int, help="global seed every random stream derives from")
        sub.add_argument("--log-level", help="DEBUG, INFO, WARNING or ERROR")
        sub.add_argument("--max-workers", type=int, help="threads for independent evaluations")
        command.add_arguments(sub)
        sub.set_defaults(handler=command)
    return parser


def collect_values(args: argparse.Namespace) -> Dict[str, Any]:
    """Config file values overridden by the flags actually given"""
    values: Dict[str, Any] = {}
    if args.config:
        path = Path(args.config)
        if not path.is_file():
            raise FileNotFoundError(path)
        values.update({key: value for key, value in dotenv_values(path).items() if value is not None})
    values.update(
        {key: value for key, value in vars(args).items() if key not in _NOT_PARAMS and value is not None}
    )
    return values


def configure_logging(level: str) -> None:
    logging.basicConfig(
        level=level,
        stream=sys.stderr,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    logging.getLogger().setLevel(level)


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    try:
        values = collect_values(args)
    except FileNotFoundError as e:
        print(f"error: config file not found: {e.args[0]}", file=sys.stderr)
        return EXIT_USAGE_ERROR

    run_values = {
        "seed": settings.DEFAULT_SEED,
        "log_level": settings.LOG_LEVEL,
        "max_workers": settings.MAX_WORKERS,
    }
    run_values.update({key: values.pop(key) for key in GLOBAL_KEYS if key in values})
    try:
        run = RunConfig(**run_values)
    except pydantic.ValidationError as e:
        print(f"error: invalid global settings: {e.errors()[0]['msg']}", file=sys.stderr)
        return EXIT_USAGE_ERROR

    level = run.log_level.upper()
    if level not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
        print(f"error: unknown log level {run.log_level!r}", file=sys.stderr)
        return EXIT_USAGE_ERROR
    configure_logging(level)

    command: BaseCommand = args.handler
    return command.execute(run, values)


if __name__ == "__main__":
    sys.exit(main())
