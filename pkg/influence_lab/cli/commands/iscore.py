import argparse
import logging

import numpy as np

from influence_lab.cli.base import BaseCommand
from influence_lab.schemas.run import IScoreParams, RunConfig
from influence_lab.services.dataset_service import DatasetService
from influence_lab.services.influence_service import InfluenceService
from influence_lab.services.report_service import ReportService
from influence_lab.services.screening_service import ScreeningService

logger = logging.getLogger(__name__)


class Command(BaseCommand):
    name = "iscore"
    help = "Marginal I-score of every column, plus the I-score of an optional column subset."
    params_model = IScoreParams

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        self.add_data_arguments(parser)
        parser.add_argument("--subset", help="comma-separated column names or 1-based positions")

    def handle(self, run: RunConfig, params: IScoreParams, reports: ReportService) -> None:
        dataset_service = DatasetService()
        influence_service = InfluenceService()
        screening_service = ScreeningService(influence_service, max_workers=run.max_workers)

        ds = dataset_service.load_tabular(params.data, has_header=params.has_header)
        constant = {column for column in range(ds.p) if np.unique(ds.features[:, column]).size < 2}
        for column in sorted(constant):
            logger.warning(f"Column {ds.column_names[column]!r} is constant; its I-score is 0")
        reports.write_marginal(screening_service.rank_marginal(ds), constant=constant)

        if params.subset:
            subset = dataset_service.resolve_columns(ds, params.subset)
            result = influence_service.score_subset(ds, subset)
            names = [ds.column_names[c] for c in subset]
            logger.info(f"I-score of {names}: {result.normalized:.4f} over {result.cell_count} cells")
            reports.write_subset_score(names, result)
