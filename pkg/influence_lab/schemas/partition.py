"""
Partition-related Pydantic schemas
"""

from typing import Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, PrivateAttr, field_validator, model_validator

PartitionKey = Tuple[float, ...]


class PartitionCell(BaseModel):
    """Summary of the response inside one partition element"""

    model_config = ConfigDict(frozen=True)

    n_j: int
    sum_y: float
    n1_j: Optional[int] = None
    local_mean: float


class PartitionTable(BaseModel):
    """
    Non-empty cells of the partition induced by a variable subset.

    Cells are held as parallel arrays sorted by key; `cells` gives the mapping view.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    subset: List[int]
    keys: List[PartitionKey]
    counts: np.ndarray
    sums: np.ndarray
    n: int
    global_mean: float
    binary: bool

    _cells: Optional[Dict[PartitionKey, PartitionCell]] = PrivateAttr(default=None)

    @field_validator("counts", mode="before")
    @classmethod
    def coerce_counts(cls, v) -> np.ndarray:
        return np.array(v, dtype=np.int64)

    @field_validator("sums", mode="before")
    @classmethod
    def coerce_sums(cls, v) -> np.ndarray:
        return np.array(v, dtype=np.float64)

    @model_validator(mode="after")
    def check_mass(self) -> "PartitionTable":
        counts = self.counts
        sums = self.sums
        if counts.shape != (len(self.keys),) or sums.shape != counts.shape:
            raise ValueError("keys, counts and sums must align")
        if np.any(counts < 1):
            raise ValueError("empty cells are not stored")
        if int(counts.sum()) != self.n:
            raise ValueError("cell counts must sum to n")
        counts.setflags(write=False)
        sums.setflags(write=False)
        object.__setattr__(self, "counts", counts)
        object.__setattr__(self, "sums", sums)
        return self

    @property
    def pi1(self) -> Optional[float]:
        """Proportion of response = 1 (binary response only)"""
        return self.global_mean if self.binary else None

    @property
    def local_means(self) -> np.ndarray:
        return self.sums / self.counts

    @property
    def expected_n1(self) -> Optional[np.ndarray]:
        if not self.binary:
            return None
        return self.counts * self.global_mean

    @property
    def cells(self) -> Dict[PartitionKey, PartitionCell]:
        if self._cells is None:
            self._cells = {
                key: PartitionCell(
                    n_j=int(count),
                    sum_y=float(total),
                    n1_j=int(round(total)) if self.binary else None,
                    local_mean=float(total / count),
                )
                for key, count, total in zip(self.keys, self.counts, self.sums)
            }
        return self._cells

    def __len__(self) -> int:
        return len(self.keys)
