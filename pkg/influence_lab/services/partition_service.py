"""
Partition service: cells induced by a subset of discrete variables
"""

import logging
from typing import Optional, Sequence

import numpy as np

from influence_lab.core.config import settings
from influence_lab.core.exceptions import NonDiscreteColumnError, ValidationError
from influence_lab.schemas.dataset import LabeledDataset
from influence_lab.schemas.partition import PartitionTable

logger = logging.getLogger(__name__)


class PartitionService:
    """Builds partition tables; every stored cell is non-empty"""

    def __init__(self, max_levels: Optional[int] = None):
        self.max_levels = max_levels if max_levels is not None else settings.MAX_DISCRETE_LEVELS

    def build_partitions(self, ds: LabeledDataset, subset: Sequence[int]) -> PartitionTable:
        subset = [int(c) for c in subset]
        if not subset:
            raise ValidationError("partition subset is empty")
        for column in subset:
            if not 0 <= column < ds.p:
                raise ValidationError(f"column index {column} out of range for p={ds.p}")
        for column in subset:
            self.check_discrete(ds, column)

        block = ds.features[:, subset]
        return self.partition_codes(block, ds.response, subset=subset, binary=ds.is_binary)

    def check_discrete(self, ds: LabeledDataset, column: int) -> None:
        levels = int(np.unique(ds.features[:, column]).size)
        if levels > self.max_levels:
            raise NonDiscreteColumnError(ds.column_names[column], levels, self.max_levels)

    @staticmethod
    def partition_codes(
        block: np.ndarray,
        response: np.ndarray,
        subset: Sequence[int] = (),
        binary: Optional[bool] = None,
    ) -> PartitionTable:
        """Partition rows of an n x k code block; cells come back in lexicographic key order"""
        block = np.asarray(block, dtype=np.float64)
        if block.ndim == 1:
            block = block.reshape(-1, 1)
        response = np.asarray(response, dtype=np.float64)
        n = int(response.shape[0])
        if binary is None:
            binary = bool(np.all((response == 0.0) | (response == 1.0)))
        if n == 0:
            raise ValidationError("cannot partition an empty dataset")

        keys, inverse = np.unique(block, axis=0, return_inverse=True)
        inverse = inverse.reshape(-1)
        counts = np.bincount(inverse, minlength=keys.shape[0])
        sums = np.bincount(inverse, weights=response, minlength=keys.shape[0])

        return PartitionTable(
            subset=list(subset),
            keys=[tuple(float(v) for v in key) for key in keys],
            counts=counts,
            sums=sums,
            n=n,
            global_mean=float(response.mean()),
            binary=binary,
        )
