import argparse
import logging

import numpy as np

from influence_lab.cli.base import BaseCommand
from influence_lab.core.exceptions import ValidationError
from influence_lab.core.seeding import derive_seed
from influence_lab.schemas.dataset import SplitSpec
from influence_lab.schemas.neural import TrainConfig
from influence_lab.schemas.run import RunConfig, TrainParams
from influence_lab.services.dataset_service import DatasetService
from influence_lab.services.metrics_service import MetricsService
from influence_lab.services.neural_service import NeuralService
from influence_lab.services.report_service import ReportService
from influence_lab.services.screening_service import ScreeningService

logger = logging.getLogger(__name__)


class Command(BaseCommand):
    name = "train"
    help = "Train the feed-forward or recurrent classifier on a tabular dataset, optionally I-score gated."
    params_model = TrainParams

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        self.add_data_arguments(parser)
        parser.add_argument("--model", choices=["ffn", "rnn"])
        parser.add_argument("--hidden-width", type=int)
        parser.add_argument("--epochs", type=int)
        parser.add_argument("--eta", type=float, help="learning rate")
        parser.add_argument("--init-scale", type=float, help="uniform initialization half-width")
        parser.add_argument("--train-fraction", type=float, help="training share; the rest splits evenly")
        parser.add_argument("--top-fraction", type=float, help="gate features by marginal I-score")

    def handle(self, run: RunConfig, params: TrainParams, reports: ReportService) -> None:
        dataset_service = DatasetService()
        metrics_service = MetricsService()
        neural_service = NeuralService(metrics_service)

        ds = dataset_service.load_tabular(params.data, has_header=params.has_header)
        if not ds.is_binary:
            raise ValidationError("training needs a binary response")
        train, rest = dataset_service.split(
            ds, SplitSpec(train_fraction=params.train_fraction, seed=derive_seed(run.seed, "train-split"))
        )
        val, test = dataset_service.split(rest, SplitSpec(train_fraction=0.5, shuffle=False))

        columns = list(range(ds.p))
        if params.top_fraction is not None:
            screening_service = ScreeningService(max_workers=run.max_workers)
            gate = screening_service.gate_threshold(screening_service.marginal_scores(train), params.top_fraction)
            columns = gate.kept
            logger.info(f"Gate kept {[ds.column_names[c] for c in columns]}")

        cfg = TrainConfig(
            eta=params.eta,
            epochs=params.epochs,
            seed=derive_seed(run.seed, "train-init"),
            init_scale=params.init_scale,
        )
        if params.model == "ffn":
            select = dataset_service.select_columns
            model, curve = neural_service.train_ffn(select(train, columns), select(val, columns), params.hidden_width, cfg)
            scores = neural_service.ffn_forward(model, select(test, columns).features)
        else:
            mask = np.isin(np.arange(ds.p), columns)
            p0 = neural_service.init_rnn_params(params.hidden_width, 1, seed=cfg.seed, init_scale=cfg.init_scale)
            sequences = neural_service.sequences_from_dataset
            model, curve = neural_service.train_rnn(p0, sequences(train), sequences(val), cfg, mask=mask)
            scores = neural_service.rnn_predict(model, sequences(test), mask=mask)

        predictions = (scores >= 0.5).astype(np.float64)
        report = metrics_service.basic_metrics(metrics_service.confusion(test.response, predictions))
        auc = metrics_service.auc_or_none(test.response, scores)
        logger.info(f"Test AUC {auc}, accuracy {report.accuracy:.4f}, best validation epoch {curve.best_val_epoch}")

        reports.write_curve(curve, "curve.csv")
        reports.write_metrics(report, auc)
