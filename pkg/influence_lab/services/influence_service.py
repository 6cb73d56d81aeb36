"""
Influence service: the I-score in raw, deviation, normalized and confusion-table forms
"""

import logging
import math
from typing import Optional, Sequence

import numpy as np

from influence_lab.core.exceptions import ConstantResponseError, ValidationError
from influence_lab.schemas.dataset import LabeledDataset
from influence_lab.schemas.influence import ConfusionParts, IScoreResult
from influence_lab.schemas.metrics import ConfusionTable
from influence_lab.schemas.partition import PartitionTable
from influence_lab.services.partition_service import PartitionService

logger = logging.getLogger(__name__)


class InfluenceService:
    """
    I = sum_j n_j^2 (Ybar_j - Ybar)^2 over the non-empty cells of a partition.

    Each term is evaluated as (sum_y_j - n_j * Ybar)^2, which is the same quantity and makes
    the binary deviation form [n1(j) - n_j * pi1]^2 agree with it bit for bit. Terms are
    accumulated with math.fsum in key order.
    """

    def __init__(self, partition_service: Optional[PartitionService] = None):
        self.partition_service = partition_service or PartitionService()

    def iscore_raw(self, table: PartitionTable) -> float:
        if len(table) == 0:
            raise ValidationError("partition table is empty")
        deviations = table.sums - table.counts * table.global_mean
        return math.fsum(float(d) * float(d) for d in deviations)

    def iscore_deviation_form(self, table: PartitionTable) -> float:
        if not table.binary:
            raise ValidationError("the deviation form needs a binary response")
        observed = table.sums
        expected = table.expected_n1
        return math.fsum(float(d) * float(d) for d in observed - expected)

    def iscore_normalized(self, table: PartitionTable, response: Optional[np.ndarray] = None) -> IScoreResult:
        """raw / (n * sigma^2) with sigma^2 the population variance of the response"""
        sigma2 = self._population_variance(table, response)
        if sigma2 <= 0.0:
            raise ConstantResponseError("constant response")
        raw = self.iscore_raw(table)
        return IScoreResult(
            raw=raw,
            normalized=raw / (table.n * sigma2),
            n=table.n,
            sigma2=sigma2,
            cell_count=len(table),
        )

    @staticmethod
    def _population_variance(table: PartitionTable, response: Optional[np.ndarray]) -> float:
        if response is not None:
            return float(np.var(np.asarray(response, dtype=np.float64)))
        if table.binary:
            pi1 = table.global_mean
            return pi1 * (1.0 - pi1)
        raise ValidationError("the response is needed to normalize a non-binary table")

    def score_subset(self, ds: LabeledDataset, subset: Sequence[int]) -> IScoreResult:
        table = self.partition_service.build_partitions(ds, subset)
        return self.iscore_normalized(table, ds.response)

    def iscore_for_column(self, values: Sequence[float], response: Sequence[float]) -> IScoreResult:
        """Normalized I-score of a scalar predictor keyed by its distinct values"""
        response = np.asarray(response, dtype=np.float64)
        table = PartitionService.partition_codes(np.asarray(values, dtype=np.float64), response, subset=[0])
        return self.iscore_normalized(table, response)

    def iscore_confusion_parts(self, ct: ConfusionTable) -> ConfusionParts:
        """
        Cell terms of the 2-cell partition by the prediction:
          predicted positive: [(Sens - (a1+a3)/n) / (1/(a1+a2))]^2 = [a1 - (a1+a3)(a1+a2)/n]^2
          predicted negative: [a2 - (a1+a2)(a2+a4)/n]^2
        No approximation in a2 is made.
        """
        n = ct.n
        if n == 0:
            raise ValidationError("confusion table is all zero")
        positives = ct.alpha1 + ct.alpha2
        if positives == 0:
            raise ValidationError("sensitivity is undefined without positive observations")
        sensitivity = ct.alpha1 / positives
        first = (sensitivity - (ct.alpha1 + ct.alpha3) / n) / (1.0 / positives)
        second = ct.alpha2 - positives * (ct.alpha2 + ct.alpha4) / n
        return ConfusionParts(predicted_positive=first * first, predicted_negative=second * second)

    def iscore_from_confusion(self, ct: ConfusionTable) -> float:
        return self.iscore_confusion_parts(ct).total
