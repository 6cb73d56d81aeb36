"""
Classification metric Pydantic schemas
"""

from typing import List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, model_validator


class ConfusionTable(BaseModel):
    """alpha1 = TP, alpha2 = FN, alpha3 = FP, alpha4 = TN"""

    model_config = ConfigDict(frozen=True)

    alpha1: int
    alpha2: int
    alpha3: int
    alpha4: int

    @model_validator(mode="after")
    def check_counts(self) -> "ConfusionTable":
        if min(self.alpha1, self.alpha2, self.alpha3, self.alpha4) < 0:
            raise ValueError("confusion counts must be non-negative")
        return self

    @property
    def n(self) -> int:
        return self.alpha1 + self.alpha2 + self.alpha3 + self.alpha4


class MetricReport(BaseModel):
    """Rate metrics; a metric with a zero denominator is None and listed in `undefined`"""

    model_config = ConfigDict(frozen=True)

    accuracy: Optional[float] = None
    sensitivity: Optional[float] = None
    specificity: Optional[float] = None
    precision: Optional[float] = None
    npv: Optional[float] = None
    balanced_accuracy: Optional[float] = None
    f1: Optional[float] = None
    undefined: List[str] = []


class RocCurve(BaseModel):
    """ROC points (fpr, tpr) from (0, 0) to (1, 1) and the area under them"""

    model_config = ConfigDict(frozen=True)

    points: List[Tuple[float, float]]
    auc: float
