import argparse
import logging

import numpy as np

from influence_lab.cli.base import BaseCommand
from influence_lab.core.seeding import derive_seed
from influence_lab.schemas.dataset import SplitSpec
from influence_lab.schemas.run import DaggerParams, RunConfig
from influence_lab.services.dagger_service import DaggerService
from influence_lab.services.dataset_service import DatasetService
from influence_lab.services.influence_service import InfluenceService
from influence_lab.services.metrics_service import MetricsService
from influence_lab.services.report_service import ReportService

logger = logging.getLogger(__name__)

DAGGER_COLUMN = "X_dagger"


class Command(BaseCommand):
    name = "dagger"
    help = "Fit the dagger feature of a column subset on a training split and apply it to every row."
    params_model = DaggerParams

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        self.add_data_arguments(parser)
        parser.add_argument("--subset", help="comma-separated column names or 1-based positions")
        parser.add_argument("--train-fraction", type=float, help="share of rows used to fit (default 0.5)")
        parser.add_argument(
            "--shuffle",
            action="store_const",
            const=True,
            default=None,
            help="shuffle rows before splitting (default: first rows train)",
        )

    def handle(self, run: RunConfig, params: DaggerParams, reports: ReportService) -> None:
        dataset_service = DatasetService()
        influence_service = InfluenceService()
        metrics_service = MetricsService()

        ds = dataset_service.load_tabular(params.data, has_header=params.has_header)
        subset = dataset_service.resolve_columns(ds, params.subset)
        spec = SplitSpec(
            train_fraction=params.train_fraction,
            seed=derive_seed(run.seed, "dagger-split"),
            shuffle=params.shuffle,
        )
        train, test = dataset_service.split(ds, spec)
        dagger_service = DaggerService(influence_service.partition_service)
        dagger_map, (train_values, test_values, all_values) = dagger_service.fit_transform(
            train, [train, test, ds], subset
        )

        summary = []
        for split_name, part, values in (("train", train, train_values), ("test", test, test_values)):
            auc = metrics_service.auc_or_none(part.response, values)
            iscore = None
            if np.var(part.response) > 0:
                iscore = influence_service.iscore_for_column(values, part.response).normalized
            logger.info(f"X_dagger on {split_name}: AUC {auc}, I-score {iscore}")
            summary.append([split_name, part.n, auc, iscore])

        reports.write_dagger_map(dagger_map)
        reports.write_table("dagger_summary.csv", ["split", "n", "auc", "iscore"], summary)
        reports.write_dataset(dataset_service.with_column(ds, DAGGER_COLUMN, all_values), "dagger.csv")
