"""
Dagger (partition-retention feature) Pydantic schemas
"""

from typing import Dict, List, Tuple

import math

from pydantic import BaseModel, ConfigDict, model_validator

from influence_lab.schemas.partition import PartitionKey


class DaggerMap(BaseModel):
    """Training local means keyed by partition cell, with a global-mean fallback"""

    model_config = ConfigDict(frozen=True)

    subset: Tuple[int, ...]
    subset_names: Tuple[str, ...] = ()
    table: Dict[PartitionKey, float]
    fallback: float
    binary_response: bool = True

    @model_validator(mode="after")
    def check_means(self) -> "DaggerMap":
        if not math.isfinite(self.fallback):
            raise ValueError("fallback must be finite")
        if self.binary_response and any(not 0.0 <= v <= 1.0 for v in self.table.values()):
            raise ValueError("local means of a binary response lie in [0, 1]")
        return self

    def rows(self) -> List[Tuple[PartitionKey, float]]:
        """(key, mean) pairs in key order for audits"""
        return sorted(self.table.items())
