"""
Neural network Pydantic schemas
"""

from enum import Enum
from typing import List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator, model_validator


class Activation(str, Enum):
    """Supported non-linearities"""

    SIGMOID = "sigmoid"
    TANH = "tanh"
    RELU = "relu"


def _finite_array(v) -> np.ndarray:
    array = np.array(v, dtype=np.float64)
    if not np.all(np.isfinite(array)):
        raise ValueError("parameters must be finite")
    return array


class RnnParams(BaseModel):
    """Shared weights of the many-to-one recurrent classifier"""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    W: np.ndarray  # H x H hidden-to-hidden
    U: np.ndarray  # H x D input-to-hidden
    V: np.ndarray  # 1 x H hidden-to-output
    b: np.ndarray  # H
    c: float = 0.0
    hidden_activation: Activation = Activation.RELU
    output_activation: Activation = Activation.SIGMOID

    @field_validator("W", "U", "V", "b", mode="before")
    @classmethod
    def coerce(cls, v) -> np.ndarray:
        return _finite_array(v)

    @model_validator(mode="after")
    def check_dimensions(self) -> "RnnParams":
        hidden = self.W.shape[0] if self.W.ndim == 2 else -1
        if self.W.shape != (hidden, hidden):
            raise ValueError("W must be H x H")
        if self.U.ndim != 2 or self.U.shape[0] != hidden:
            raise ValueError("U must be H x D")
        if self.V.shape != (1, hidden):
            raise ValueError("V must be 1 x H")
        if self.b.shape != (hidden,):
            raise ValueError("b must have length H")
        if self.output_activation != Activation.SIGMOID:
            raise ValueError("the output unit is a sigmoid")
        return self

    @property
    def hidden_size(self) -> int:
        return int(self.W.shape[0])

    @property
    def input_size(self) -> int:
        return int(self.U.shape[1])

    @property
    def parameter_count(self) -> int:
        return self.W.size + self.U.size + self.V.size + self.b.size + 1


class RnnGradients(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    W: np.ndarray
    U: np.ndarray
    V: np.ndarray
    b: np.ndarray
    c: float


class FfnParams(BaseModel):
    """One hidden layer feed-forward classifier"""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    W1: np.ndarray  # H x D
    b1: np.ndarray  # H
    V: np.ndarray  # 1 x H
    c: float = 0.0
    hidden_activation: Activation = Activation.RELU

    @field_validator("W1", "b1", "V", mode="before")
    @classmethod
    def coerce(cls, v) -> np.ndarray:
        return _finite_array(v)

    @model_validator(mode="after")
    def check_dimensions(self) -> "FfnParams":
        if self.W1.ndim != 2:
            raise ValueError("W1 must be H x D")
        hidden = self.W1.shape[0]
        if self.b1.shape != (hidden,) or self.V.shape != (1, hidden):
            raise ValueError("b1 and V must match the hidden width")
        return self

    @property
    def hidden_size(self) -> int:
        return int(self.W1.shape[0])

    @property
    def input_size(self) -> int:
        return int(self.W1.shape[1])


class FfnGradients(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    W1: np.ndarray
    b1: np.ndarray
    V: np.ndarray
    c: float


class TrainConfig(BaseModel):
    """Full-batch gradient descent settings"""

    model_config = ConfigDict(frozen=True)

    eta: float = 0.1
    epochs: int = 100
    seed: int = 0
    init_scale: float = 0.1
    hidden_activation: Activation = Activation.RELU
    # stop once val loss has not improved by min_delta for `patience` epochs; 0 runs every epoch
    patience: int = 0
    min_delta: float = 0.0

    @field_validator("eta", "init_scale")
    @classmethod
    def positive(cls, v: float) -> float:
        if v <= 0:
            raise ValueError("must be positive")
        return v

    @field_validator("min_delta")
    @classmethod
    def delta_non_negative(cls, v: float) -> float:
        if v < 0:
            raise ValueError("must be non-negative")
        return v

    @field_validator("epochs", "seed", "patience")
    @classmethod
    def non_negative(cls, v: int) -> int:
        if v < 0:
            raise ValueError("must be non-negative")
        return v


class SequenceData(BaseModel):
    """Batch of equal-length sequences: inputs N x T x D and binary labels N"""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    inputs: np.ndarray
    labels: np.ndarray

    @field_validator("inputs", "labels", mode="before")
    @classmethod
    def coerce(cls, v) -> np.ndarray:
        return np.array(v, dtype=np.float64)

    @model_validator(mode="after")
    def check_shapes(self) -> "SequenceData":
        if self.inputs.ndim != 3:
            raise ValueError("inputs must be N x T x D")
        if self.labels.shape != (self.inputs.shape[0],):
            raise ValueError("one label per sequence")
        return self

    def __len__(self) -> int:
        return int(self.inputs.shape[0])


class EpochRecord(BaseModel):
    model_config = ConfigDict(frozen=True)

    epoch: int
    train_loss: float
    val_loss: float
    train_auc: Optional[float] = None
    val_auc: Optional[float] = None


class LearningCurve(BaseModel):
    """Per-epoch losses (mean cross-entropy) and AUCs"""

    records: List[EpochRecord] = []

    @property
    def best_val_epoch(self) -> Optional[int]:
        if not self.records:
            return None
        return min(self.records, key=lambda r: (r.val_loss, r.epoch)).epoch

    def __len__(self) -> int:
        return len(self.records)
