import argparse

from influence_lab.cli.base import BaseCommand
from influence_lab.core.seeding import derive_seed
from influence_lab.schemas.run import BdaParams, RunConfig
from influence_lab.schemas.screening import BdaConfig
from influence_lab.services.dataset_service import DatasetService
from influence_lab.services.report_service import ReportService
from influence_lab.services.screening_service import ScreeningService


class Command(BaseCommand):
    name = "bda"
    help = "Backward Dropping Algorithm over random initial subsets of a discrete dataset."
    params_model = BdaParams

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        self.add_data_arguments(parser)
        parser.add_argument("--k", type=int, help="initial subset size")
        parser.add_argument("--draws", type=int, help="number of random initial subsets (B)")

    def handle(self, run: RunConfig, params: BdaParams, reports: ReportService) -> None:
        ds = DatasetService().load_tabular(params.data, has_header=params.has_header)
        cfg = BdaConfig(subset_size=params.k, num_draws=params.draws, seed=derive_seed(run.seed, "bda"))
        traces = ScreeningService(max_workers=run.max_workers).bda_search(ds, cfg)

        reports.write_bda_traces(traces, ds.column_names)
        reports.write_bda_best(traces, ds.column_names)
