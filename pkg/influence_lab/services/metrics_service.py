"""
Metrics service: confusion tables, rate metrics and ROC/AUC
"""

import logging
from typing import Optional, Sequence

import numpy as np

from influence_lab.core.exceptions import DimensionMismatchError, ValidationError
from influence_lab.schemas.metrics import ConfusionTable, MetricReport, RocCurve

logger = logging.getLogger(__name__)


def _binary_vector(values: Sequence[float], name: str) -> np.ndarray:
    array = np.asarray(values, dtype=np.float64).reshape(-1)
    if not np.all((array == 0.0) | (array == 1.0)):
        raise ValidationError(f"{name} must be binary")
    return array


def _ratio(numerator: float, denominator: float) -> Optional[float]:
    if denominator == 0:
        return None
    return numerator / denominator


class MetricsService:
    """Service for classification metrics"""

    def confusion(self, y: Sequence[float], yhat: Sequence[float]) -> ConfusionTable:
        y = _binary_vector(y, "y")
        yhat = _binary_vector(yhat, "yhat")
        if y.shape != yhat.shape:
            raise DimensionMismatchError(f"y has {y.size} values, yhat has {yhat.size}")
        return ConfusionTable(
            alpha1=int(np.sum((y == 1) & (yhat == 1))),
            alpha2=int(np.sum((y == 1) & (yhat == 0))),
            alpha3=int(np.sum((y == 0) & (yhat == 1))),
            alpha4=int(np.sum((y == 0) & (yhat == 0))),
        )

    def basic_metrics(self, ct: ConfusionTable) -> MetricReport:
        if ct.n == 0:
            raise ValidationError("confusion table is empty")
        a1, a2, a3, a4 = ct.alpha1, ct.alpha2, ct.alpha3, ct.alpha4

        sensitivity = _ratio(a1, a1 + a2)
        specificity = _ratio(a4, a3 + a4)
        precision = _ratio(a1, a1 + a3)
        balanced = None
        if sensitivity is not None and specificity is not None:
            balanced = (sensitivity + specificity) / 2.0
        f1 = None
        if precision is not None and sensitivity is not None and precision + sensitivity > 0:
            f1 = 2.0 * precision * sensitivity / (precision + sensitivity)

        values = {
            "accuracy": (a1 + a4) / ct.n,
            "sensitivity": sensitivity,
            "specificity": specificity,
            "precision": precision,
            "npv": _ratio(a4, a2 + a4),
            "balanced_accuracy": balanced,
            "f1": f1,
        }
        return MetricReport(**values, undefined=[name for name, value in values.items() if value is None])

    def roc_auc(self, y: Sequence[float], scores: Sequence[float]) -> RocCurve:
        """
        Sweep thresholds over distinct scores from high to low. Tied scores move in one step,
        so a tie group contributes a diagonal segment and the trapezoid area equals
        P(s+ > s-) + 0.5 * P(s+ = s-).
        """
        y = _binary_vector(y, "y")
        scores = np.asarray(scores, dtype=np.float64).reshape(-1)
        if y.shape != scores.shape:
            raise DimensionMismatchError(f"y has {y.size} values, scores has {scores.size}")
        positives = int(y.sum())
        negatives = int(y.size - positives)
        if positives == 0 or negatives == 0:
            raise ValidationError("roc_auc needs both classes present")

        order = np.argsort(-scores, kind="mergesort")
        sorted_scores = scores[order]
        sorted_y = y[order]
        tp = np.cumsum(sorted_y)
        fp = np.cumsum(1.0 - sorted_y)
        # last index of every tie group
        group_ends = np.flatnonzero(np.r_[sorted_scores[1:] != sorted_scores[:-1], True])

        tpr = np.r_[0.0, tp[group_ends] / positives]
        fpr = np.r_[0.0, fp[group_ends] / negatives]
        auc = float(np.sum((fpr[1:] - fpr[:-1]) * (tpr[1:] + tpr[:-1]) / 2.0))
        return RocCurve(points=list(zip(fpr.tolist(), tpr.tolist())), auc=auc)

    def pair_auc(self, y: Sequence[float], scores: Sequence[float]) -> float:
        """Mann-Whitney AUC from mid-ranks; ties count one half"""
        y = _binary_vector(y, "y")
        scores = np.asarray(scores, dtype=np.float64).reshape(-1)
        if y.shape != scores.shape:
            raise DimensionMismatchError(f"y has {y.size} values, scores has {scores.size}")
        positives = int(y.sum())
        negatives = int(y.size - positives)
        if positives == 0 or negatives == 0:
            raise ValidationError("pair_auc needs both classes present")

        _, inverse, counts = np.unique(scores, return_inverse=True, return_counts=True)
        upper = np.cumsum(counts)
        mid_ranks = (upper - (counts - 1) / 2.0)[inverse.reshape(-1)]
        rank_sum = float(mid_ranks[y == 1].sum())
        return (rank_sum - positives * (positives + 1) / 2.0) / (positives * negatives)

    def auc_or_none(self, y: Sequence[float], scores: Sequence[float]) -> Optional[float]:
        """AUC, or None when only one class is present"""
        y = np.asarray(y, dtype=np.float64)
        if y.size == 0 or y.min() == y.max():
            return None
        return self.roc_auc(y, scores).auc
