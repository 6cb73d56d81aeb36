import argparse

from influence_lab.cli.base import BaseCommand
from influence_lab.schemas.run import DiscretizeParams, RunConfig
from influence_lab.services.dataset_service import DatasetService
from influence_lab.services.report_service import ReportService
from influence_lab.services.screening_service import ScreeningService


class Command(BaseCommand):
    name = "discretize"
    help = "Binarize continuous columns at their I-score maximizing thresholds."
    params_model = DiscretizeParams

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        self.add_data_arguments(parser)
        parser.add_argument("--columns", help="comma-separated columns to binarize (default: all)")

    def handle(self, run: RunConfig, params: DiscretizeParams, reports: ReportService) -> None:
        dataset_service = DatasetService()
        screening_service = ScreeningService(max_workers=run.max_workers)

        ds = dataset_service.load_tabular(params.data, has_header=params.has_header)
        columns = dataset_service.resolve_columns(ds, params.columns) if params.columns else None
        rules, binarized = screening_service.discretize_all(ds, columns)

        reports.write_rules(rules)
        reports.write_dataset(binarized, "discretized.csv")
