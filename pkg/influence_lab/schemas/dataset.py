"""
Dataset-related Pydantic schemas
"""

from typing import List, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator, model_validator


class LabeledDataset(BaseModel):
    """Feature matrix with a response vector; immutable after construction"""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    features: np.ndarray
    column_names: List[str]
    response: np.ndarray
    response_name: str = "Y"

    @field_validator("features", "response", mode="before")
    @classmethod
    def coerce_array(cls, v) -> np.ndarray:
        return np.array(v, dtype=np.float64)

    @model_validator(mode="after")
    def check_shapes(self) -> "LabeledDataset":
        features = self.features
        response = self.response
        if features.ndim != 2:
            raise ValueError("features must be a 2-d matrix")
        if response.ndim != 1:
            raise ValueError("response must be a vector")
        if features.shape[0] != response.shape[0]:
            raise ValueError(
                f"features have {features.shape[0]} rows but response has {response.shape[0]} values"
            )
        if len(self.column_names) != features.shape[1]:
            raise ValueError(f"expected {features.shape[1]} column names, got {len(self.column_names)}")
        if len(set(self.column_names)) != len(self.column_names):
            raise ValueError("column names must be distinct")
        features.setflags(write=False)
        response.setflags(write=False)
        object.__setattr__(self, "features", features)
        object.__setattr__(self, "response", response)
        return self

    @property
    def n(self) -> int:
        return int(self.features.shape[0])

    @property
    def p(self) -> int:
        return int(self.features.shape[1])

    @property
    def is_binary(self) -> bool:
        return bool(np.all((self.response == 0.0) | (self.response == 1.0)))

    def column_index(self, name: str) -> int:
        try:
            return self.column_names.index(name)
        except ValueError:
            raise KeyError(name) from None


class SplitSpec(BaseModel):
    """Train/test split parameters"""

    train_fraction: float = 0.5
    seed: int = 0
    shuffle: bool = True

    @field_validator("train_fraction")
    @classmethod
    def fraction_in_open_interval(cls, v: float) -> float:
        if not 0.0 < v < 1.0:
            raise ValueError("train_fraction must lie strictly between 0 and 1")
        return v

    @field_validator("seed")
    @classmethod
    def seed_unsigned(cls, v: int) -> int:
        if v < 0:
            raise ValueError("seed must be non-negative")
        return v


class TextDocument(BaseModel):
    """One labeled document"""

    model_config = ConfigDict(frozen=True)

    text: str
    label: int
    source: str = ""

    @field_validator("text")
    @classmethod
    def text_not_blank(cls, v: str) -> str:
        if not v.strip():
            raise ValueError("document is empty")
        return v

    @field_validator("label")
    @classmethod
    def label_binary(cls, v: int) -> int:
        if v not in (0, 1):
            raise ValueError("label must be 0 or 1")
        return v


class TextCorpus(BaseModel):
    """Ordered collection of labeled documents"""

    model_config = ConfigDict(frozen=True)

    documents: Tuple[TextDocument, ...]

    @property
    def labels(self) -> np.ndarray:
        return np.array([doc.label for doc in self.documents], dtype=np.float64)

    @property
    def texts(self) -> List[str]:
        return [doc.text for doc in self.documents]

    def __len__(self) -> int:
        return len(self.documents)
