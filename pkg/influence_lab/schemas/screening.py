"""
Screening Pydantic schemas
"""

from typing import List, Tuple

from pydantic import BaseModel, ConfigDict, field_validator, model_validator


class DiscretizationRule(BaseModel):
    """Binary cut 1(X_column > threshold) chosen by maximal I-score"""

    model_config = ConfigDict(frozen=True)

    column: int
    column_name: str = ""
    threshold: float
    iscore_at_best: float


class BdaConfig(BaseModel):
    """Backward Dropping Algorithm search parameters"""

    model_config = ConfigDict(frozen=True)

    subset_size: int = 3
    num_draws: int = 50
    seed: int = 0

    @field_validator("subset_size", "num_draws")
    @classmethod
    def at_least_one(cls, v: int) -> int:
        if v < 1:
            raise ValueError("must be at least 1")
        return v

    @field_validator("seed")
    @classmethod
    def seed_unsigned(cls, v: int) -> int:
        if v < 0:
            raise ValueError("seed must be non-negative")
        return v


class BdaStep(BaseModel):
    """One subset on the dropping trajectory"""

    model_config = ConfigDict(frozen=True)

    subset: Tuple[int, ...]
    score: float


class BdaTrace(BaseModel):
    """Trajectory of one BDA run and its return set"""

    model_config = ConfigDict(frozen=True)

    draw: int = 0
    steps: List[BdaStep]
    return_set: Tuple[int, ...]
    return_score: float

    @model_validator(mode="after")
    def check_trajectory(self) -> "BdaTrace":
        if not self.steps:
            raise ValueError("a trace has at least one step")
        for before, after in zip(self.steps, self.steps[1:]):
            if len(after.subset) != len(before.subset) - 1 or not set(after.subset) < set(before.subset):
                raise ValueError("each step removes exactly one variable")
        if self.return_score != max(step.score for step in self.steps):
            raise ValueError("return_score must be the trajectory maximum")
        return self


class GateMask(BaseModel):
    """Per-feature keep/drop decision from an I-score cutoff"""

    model_config = ConfigDict(frozen=True)

    scores: List[float]
    threshold: float
    quantile: float
    mask: List[bool]

    @model_validator(mode="after")
    def check_lengths(self) -> "GateMask":
        if len(self.scores) != len(self.mask):
            raise ValueError("scores and mask must have equal length")
        return self

    @property
    def kept(self) -> List[int]:
        return [i for i, keep in enumerate(self.mask) if keep]

    @property
    def kept_count(self) -> int:
        return sum(self.mask)


class FeatureScore(BaseModel):
    """Marginal I-score of one column"""

    model_config = ConfigDict(frozen=True)

    column: int
    name: str
    score: float
