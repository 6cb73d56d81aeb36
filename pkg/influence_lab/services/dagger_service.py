"""
Dagger service: partition-retention features from training local means
"""

import logging
from typing import List, Optional, Sequence, Tuple

import numpy as np

from influence_lab.core.exceptions import ValidationError
from influence_lab.schemas.dagger import DaggerMap
from influence_lab.schemas.dataset import LabeledDataset
from influence_lab.services.partition_service import PartitionService

logger = logging.getLogger(__name__)


class DaggerService:
    """Fits X_dagger lookups on training data and applies them to any dataset"""

    def __init__(self, partition_service: Optional[PartitionService] = None):
        self.partition_service = partition_service or PartitionService()

    def fit_dagger(self, train: LabeledDataset, subset: Sequence[int]) -> DaggerMap:
        if not list(subset):
            raise ValidationError("dagger subset is empty")
        if train.n == 0:
            raise ValidationError("training set is empty")
        table = self.partition_service.build_partitions(train, subset)
        means = table.local_means
        dagger_map = DaggerMap(
            subset=tuple(int(c) for c in subset),
            subset_names=tuple(train.column_names[c] for c in subset),
            table={key: float(mean) for key, mean in zip(table.keys, means)},
            fallback=table.global_mean,
            binary_response=table.binary,
        )
        logger.info(f"Fitted dagger map on {list(dagger_map.subset_names)}: {len(dagger_map.table)} cells")
        return dagger_map

    def transform_dagger(self, dagger_map: DaggerMap, ds: LabeledDataset) -> np.ndarray:
        """Training mean of each row's cell; unseen cells get the training global mean"""
        for column in dagger_map.subset:
            if not 0 <= column < ds.p:
                raise ValidationError(f"dataset lacks source column {column}")
        block = ds.features[:, list(dagger_map.subset)]
        lookup = dagger_map.table
        fallback = dagger_map.fallback
        return np.array(
            [lookup.get(tuple(float(v) for v in row), fallback) for row in block],
            dtype=np.float64,
        )

    def fit_transform(
        self, train: LabeledDataset, datasets: Sequence[LabeledDataset], subset: Sequence[int]
    ) -> Tuple[DaggerMap, List[np.ndarray]]:
        dagger_map = self.fit_dagger(train, subset)
        return dagger_map, [self.transform_dagger(dagger_map, ds) for ds in datasets]
