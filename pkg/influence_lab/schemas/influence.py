"""
Influence-score Pydantic schemas
"""

from typing import Optional

from pydantic import BaseModel, ConfigDict, field_validator


class IScoreResult(BaseModel):
    """Raw and normalized influence score with the quantities behind them"""

    model_config = ConfigDict(frozen=True)

    raw: float
    normalized: Optional[float] = None
    n: int
    sigma2: float
    cell_count: int

    @field_validator("raw", "normalized")
    @classmethod
    def non_negative(cls, v: Optional[float]) -> Optional[float]:
        if v is not None and v < 0:
            raise ValueError("influence scores are non-negative")
        return v


class ConfusionParts(BaseModel):
    """The two cell terms of the confusion-table form of the I-score"""

    model_config = ConfigDict(frozen=True)

    predicted_positive: float
    predicted_negative: float

    @property
    def total(self) -> float:
        return self.predicted_positive + self.predicted_negative
