"""
Report service: delimiter-separated result files under one output directory
"""

import csv
import logging
import math
import threading
from pathlib import Path
from typing import Collection, Iterable, List, Optional, Sequence, Union

from influence_lab.core.config import settings
from influence_lab.schemas.dagger import DaggerMap
from influence_lab.schemas.dataset import LabeledDataset
from influence_lab.schemas.influence import IScoreResult
from influence_lab.schemas.metrics import MetricReport
from influence_lab.schemas.neural import LearningCurve
from influence_lab.schemas.screening import BdaTrace, DiscretizationRule, FeatureScore
from influence_lab.schemas.simlab import TextStudyReport, ToyReport
from influence_lab.services.dataset_service import DatasetService

logger = logging.getLogger(__name__)

NA = "NA"
Cell = Union[str, int, float, None]


class ReportService:
    """Writes every report of a run; writes are serialized"""

    def __init__(self, out_dir: Union[str, Path], delimiter: Optional[str] = None, float_format: Optional[str] = None):
        self.out_dir = Path(out_dir)
        self.delimiter = delimiter or settings.DELIMITER
        self.float_format = float_format or settings.REPORT_FLOAT_FORMAT
        self._lock = threading.Lock()

    def format_cell(self, value: Cell) -> str:
        if value is None:
            return NA
        if isinstance(value, bool):
            return str(int(value))
        if isinstance(value, float):
            if math.isinf(value):
                return "inf" if value > 0 else "-inf"
            return format(value, self.float_format)
        return str(value)

    def write_table(self, name: str, header: Sequence[str], rows: Iterable[Sequence[Cell]]) -> Path:
        path = self.out_dir / name
        with self._lock:
            path.parent.mkdir(parents=True, exist_ok=True)
            with open(path, "w", newline="", encoding="utf-8") as handle:
                writer = csv.writer(handle, delimiter=self.delimiter, lineterminator="\n")
                writer.writerow(header)
                count = 0
                for row in rows:
                    writer.writerow([self.format_cell(value) for value in row])
                    count += 1
        logger.info(f"Wrote {path} ({count} rows)")
        return path

    def _names(self, subset: Sequence[int], column_names: Sequence[str]) -> str:
        return self.delimiter.join(column_names[c] for c in subset)

    def write_marginal(
        self, ranked: Sequence[FeatureScore], constant: Collection[int] = (), name: str = "iscore_marginal.csv"
    ) -> Path:
        """`constant` holds the 0-based columns flagged as constant"""
        return self.write_table(
            name,
            ["rank", "column", "name", "score", "constant"],
            (
                [rank, fs.column + 1, fs.name, fs.score, fs.column in constant]
                for rank, fs in enumerate(ranked, start=1)
            ),
        )

    def write_subset_score(
        self, subset_names: Sequence[str], result: IScoreResult, name: str = "iscore_subset.csv"
    ) -> Path:
        return self.write_table(
            name,
            ["subset", "raw", "normalized", "n", "cells"],
            [[self.delimiter.join(subset_names), result.raw, result.normalized, result.n, result.cell_count]],
        )

    def write_rules(self, rules: Sequence[DiscretizationRule], name: str = "rules.csv") -> Path:
        return self.write_table(
            name,
            ["column", "name", "threshold", "iscore"],
            ([rule.column + 1, rule.column_name, rule.threshold, rule.iscore_at_best] for rule in rules),
        )

    def write_bda_traces(
        self, traces: Sequence[BdaTrace], column_names: Sequence[str], name: str = "bda_traces.csv"
    ) -> Path:
        rows: List[List[Cell]] = []
        for trace in sorted(traces, key=lambda t: t.draw):
            for step_index, step in enumerate(trace.steps):
                rows.append([trace.draw, step_index, self._names(step.subset, column_names), step.score])
        return self.write_table(name, ["draw", "step", "subset", "score"], rows)

    def write_bda_best(
        self, traces: Sequence[BdaTrace], column_names: Sequence[str], name: str = "bda_best.csv"
    ) -> Path:
        """Return sets best first, one row per draw"""
        return self.write_table(
            name,
            ["return_set", "return_score"],
            ([self._names(t.return_set, column_names), t.return_score] for t in traces),
        )

    def write_dagger_map(self, dagger_map: DaggerMap, name: str = "dagger_map.csv") -> Path:
        """One row per training cell; the last row holds the fallback for unseen cells"""
        rows: List[List[Cell]] = [[*key, mean] for key, mean in dagger_map.rows()]
        rows.append(["*"] * len(dagger_map.subset) + [dagger_map.fallback])
        return self.write_table(name, [*dagger_map.subset_names, "dagger"], rows)

    def write_toy_report(self, report: ToyReport, name: str = "toy_report.csv") -> Path:
        return self.write_table(
            name,
            ["predictor", "group", "mean_auc", "sd_auc", "mean_iscore", "sd_iscore"],
            ([r.name, r.group, r.mean_auc, r.sd_auc, r.mean_iscore, r.sd_iscore] for r in report.rows),
        )

    def write_curve(self, curve: LearningCurve, name: str) -> Path:
        return self.write_table(
            name,
            ["epoch", "train_loss", "val_loss", "train_auc", "val_auc"],
            ([r.epoch, r.train_loss, r.val_loss, r.train_auc, r.val_auc] for r in curve.records),
        )

    def write_text_report(self, report: TextStudyReport, name: str = "text_report.csv") -> List[Path]:
        paths = [
            self.write_table(
                name,
                ["arm", "n_features", "test_auc", "best_val_epoch"],
                ([a.arm, a.n_features, a.test_auc, a.best_val_epoch] for a in report.arms),
            ),
            self.write_table(
                "text_top_features.csv",
                ["rank", "feature"],
                enumerate(report.top_features, start=1),
            ),
        ]
        for arm in report.arms:
            paths.append(self.write_curve(arm.curve, f"curves/{arm.arm}.csv"))
        return paths

    def write_metrics(self, report: MetricReport, auc: Optional[float], name: str = "metrics.csv") -> Path:
        values = report.model_dump(exclude={"undefined"})
        values["auc"] = auc
        return self.write_table(name, ["metric", "value"], values.items())

    def write_dataset(self, ds: LabeledDataset, name: str) -> Path:
        with self._lock:
            path = DatasetService(self.delimiter).write_tabular(ds, self.out_dir / name)
        logger.info(f"Wrote {path} ({ds.n} rows)")
        return path
