"""
Text feature Pydantic schemas
"""

from typing import Dict, List, Literal, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator, model_validator

UNK_TOKEN = "<unk>"
UNK_INDEX = 0

NGram = Tuple[int, ...]


class Vocabulary(BaseModel):
    """Dense token index with <unk> reserved at 0"""

    model_config = ConfigDict(frozen=True)

    token_to_index: Dict[str, int]
    max_size: int

    @model_validator(mode="after")
    def check_dense(self) -> "Vocabulary":
        if self.token_to_index.get(UNK_TOKEN) != UNK_INDEX:
            raise ValueError("<unk> must map to index 0")
        if sorted(self.token_to_index.values()) != list(range(len(self.token_to_index))):
            raise ValueError("indices must be dense from 0")
        if len(self.token_to_index) > self.max_size:
            raise ValueError("vocabulary exceeds its size cap")
        return self

    @property
    def size(self) -> int:
        return len(self.token_to_index)

    @property
    def index_to_token(self) -> List[str]:
        tokens = [""] * self.size
        for token, index in self.token_to_index.items():
            tokens[index] = token
        return tokens

    def lookup(self, token: str) -> int:
        return self.token_to_index.get(token, UNK_INDEX)


class NGramFeatureSet(BaseModel):
    """Document x n-gram matrix over one gram order"""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    n: int
    columns: List[NGram]
    column_names: List[str]
    matrix: np.ndarray
    labels: np.ndarray
    coding: Literal["presence", "count"] = "presence"

    @field_validator("matrix", "labels", mode="before")
    @classmethod
    def coerce_array(cls, v) -> np.ndarray:
        return np.array(v, dtype=np.float64)

    @model_validator(mode="after")
    def check_columns(self) -> "NGramFeatureSet":
        if any(len(column) != self.n for column in self.columns):
            raise ValueError(f"every column must be a {self.n}-gram")
        if self.matrix.ndim != 2 or self.matrix.shape[1] != len(self.columns):
            raise ValueError("matrix width must equal the number of columns")
        if self.matrix.shape[0] != self.labels.shape[0]:
            raise ValueError("matrix rows must equal the number of documents")
        if self.coding == "presence" and not np.all((self.matrix == 0.0) | (self.matrix == 1.0)):
            raise ValueError("presence coding is binary")
        self.matrix.setflags(write=False)
        return self

    @property
    def num_documents(self) -> int:
        return int(self.matrix.shape[0])
