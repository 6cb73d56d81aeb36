"""
Command-line run configuration schemas
"""

from pathlib import Path
from typing import List, Literal, Optional

from pydantic import BaseModel, ConfigDict, field_validator

GLOBAL_KEYS = ("seed", "out", "log_level", "max_workers")


def _split_csv(v):
    if isinstance(v, str):
        return [item.strip() for item in v.split(",") if item.strip()]
    return v


class RunConfig(BaseModel):
    """Settings shared by every command"""

    model_config = ConfigDict(frozen=True)

    seed: int = 0
    out: Path = Path("out")
    log_level: str = "INFO"
    max_workers: int = 1

    @field_validator("seed")
    @classmethod
    def seed_unsigned(cls, v: int) -> int:
        if v < 0:
            raise ValueError("seed must be non-negative")
        return v


class CommandParams(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class TabularParams(CommandParams):
    data: Path
    has_header: bool = True


class IScoreParams(TabularParams):
    subset: List[str] = []

    @field_validator("subset", mode="before")
    @classmethod
    def split_subset(cls, v):
        return _split_csv(v)


class DiscretizeParams(TabularParams):
    columns: List[str] = []

    @field_validator("columns", mode="before")
    @classmethod
    def split_columns(cls, v):
        return _split_csv(v)


class BdaParams(TabularParams):
    k: int = 3
    draws: int = 50


class DaggerParams(TabularParams):
    subset: List[str]
    train_fraction: float = 0.5
    shuffle: bool = False

    @field_validator("subset", mode="before")
    @classmethod
    def split_subset(cls, v):
        return _split_csv(v)


class ToyParams(CommandParams):
    n: int = 2000
    p: int = 10
    reps: int = 30
    epsilon: float = 1e-5


class TextParams(CommandParams):
    corpus: Optional[Path] = None
    synthetic_docs: int = 2000
    ngram_orders: List[int] = [2]
    vocab_size: int = 5000
    max_features: int = 500
    max_tokens: int = 400
    top_fraction: float = 0.1
    top_k: int = 30
    arms: List[str] = ["full", "gated", "random"]
    classifier: Literal["ffn", "rnn"] = "ffn"
    hidden_width: int = 16
    epochs: int = 300
    eta: float = 2.0
    patience: int = 10

    @field_validator("ngram_orders", "arms", mode="before")
    @classmethod
    def split_lists(cls, v):
        return _split_csv(v)


class TrainParams(TabularParams):
    model: Literal["ffn", "rnn"] = "ffn"
    hidden_width: int = 8
    epochs: int = 100
    eta: float = 0.1
    init_scale: float = 0.1
    train_fraction: float = 0.6
    top_fraction: Optional[float] = None
