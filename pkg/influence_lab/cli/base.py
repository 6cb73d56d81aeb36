"""
Management-command base class for the influence-lab command line
"""

import argparse
import logging
import sys
from typing import Any, Dict, Type

import pydantic

from influence_lab.core.exceptions import EXIT_OK, EXIT_USAGE_ERROR, InfluenceLabException, exit_code_for
from influence_lab.schemas.run import CommandParams, RunConfig
from influence_lab.services.report_service import ReportService

logger = logging.getLogger(__name__)


class BaseCommand:
    """
    One subcommand. Subclasses set `name`, `help` and `params_model`, declare their flags in
    `add_arguments` (every flag defaults to None so the config file value survives) and do
    the work in `handle`.
    """

    name: str = ""
    help: str = ""
    params_model: Type[CommandParams] = CommandParams

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        pass

    def handle(self, run: RunConfig, params: Any, reports: ReportService) -> None:
        raise NotImplementedError

    def add_data_arguments(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("--data", help="delimiter-separated dataset, response in the last column")
        parser.add_argument(
            "--no-header",
            dest="has_header",
            action="store_const",
            const=False,
            default=None,
            help="the first row is data, columns are named X1..Xp",
        )

    def execute(self, run: RunConfig, values: Dict[str, Any]) -> int:
        try:
            params = self.params_model(**values)
            logger.info(f"Running {self.name} (seed {run.seed}, out {run.out})")
            self.handle(run, params, ReportService(run.out))
            return EXIT_OK
        except pydantic.ValidationError as e:
            message = "; ".join(f"{'.'.join(str(p) for p in err['loc'])}: {err['msg']}" for err in e.errors())
            logger.error(f"{self.name}: invalid parameters: {message}")
            print(f"error: invalid parameters: {message}", file=sys.stderr)
            return EXIT_USAGE_ERROR
        except InfluenceLabException as e:
            logger.error(f"{self.name} failed: {e.message}")
            print(f"error: {e.message}", file=sys.stderr)
            return exit_code_for(e)
