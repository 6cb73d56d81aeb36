"""
Simulation and study Pydantic schemas
"""

from enum import Enum
from typing import Dict, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, field_validator

from influence_lab.schemas.neural import LearningCurve


class ToyConfig(BaseModel):
    """XOR toy simulation: Y = (X1 + X2) mod 2 over p Bernoulli(0.5) columns"""

    model_config = ConfigDict(frozen=True)

    n: int = 2000
    p: int = 10
    reps: int = 30
    epsilon: float = 1e-5
    seed: int = 0

    @field_validator("n")
    @classmethod
    def n_even(cls, v: int) -> int:
        if v < 2 or v % 2:
            raise ValueError("n must be an even number >= 2")
        return v

    @field_validator("p")
    @classmethod
    def p_at_least_two(cls, v: int) -> int:
        if v < 2:
            raise ValueError("p must be at least 2")
        return v

    @field_validator("reps")
    @classmethod
    def reps_positive(cls, v: int) -> int:
        if v < 1:
            raise ValueError("reps must be at least 1")
        return v

    @field_validator("seed")
    @classmethod
    def seed_unsigned(cls, v: int) -> int:
        if v < 0:
            raise ValueError("seed must be non-negative")
        return v


class GuessedModel(str, Enum):
    SUM = "sum"
    DIFF = "diff"
    PROD = "prod"
    RATIO = "ratio"
    DAGGER = "dagger"
    PAIR_SET = "pair_set"
    TRUE_MODEL = "true_model"


GUESSED_MODEL_LABELS: Dict[GuessedModel, str] = {
    GuessedModel.SUM: "model (i): X1+X2",
    GuessedModel.DIFF: "model (ii): X1-X2",
    GuessedModel.PROD: "model (iii): X1*X2",
    GuessedModel.RATIO: "model (iv): X1/(X2+eps)",
    GuessedModel.DAGGER: "X_dagger",
    GuessedModel.PAIR_SET: "{X1,X2}",
    GuessedModel.TRUE_MODEL: "true model: (X1+X2) mod 2",
}


class ToyRow(BaseModel):
    """One predictor's aggregated AUC and I-score; AUC is None where not applicable"""

    model_config = ConfigDict(frozen=True)

    name: str
    group: Literal["important", "noisy", "guessed", "true"]
    mean_auc: Optional[float] = None
    sd_auc: Optional[float] = None
    mean_iscore: float
    sd_iscore: float


class ToyReport(BaseModel):
    config: ToyConfig
    rows: List[ToyRow]
    rep_iscores: Dict[str, List[float]]
    rep_aucs: Dict[str, List[float]]

    def row(self, name: str) -> ToyRow:
        for row in self.rows:
            if row.name == name:
                return row
        raise KeyError(name)


ArmName = Literal["full", "gated", "random", "topk", "discretized", "dagger"]


class TextStudyConfig(BaseModel):
    """Parameters of the n-gram screening study"""

    model_config = ConfigDict(frozen=True)

    ngram_orders: List[int] = [2]
    vocab_size: int = 5000
    max_features: int = 500
    max_tokens: int = 400
    top_fraction: float = 0.1
    top_k: int = 30
    arms: List[ArmName] = ["full", "gated", "random"]
    classifier: Literal["ffn", "rnn"] = "ffn"
    hidden_width: int = 16
    epochs: int = 300
    eta: float = 2.0
    init_scale: float = 0.5
    patience: int = 10
    min_delta: float = 1e-3
    row_norm: Literal["l2", "none"] = "l2"
    dagger_subset_size: int = 3
    dagger_draws: int = 50
    dagger_sets: int = 10
    seed: int = 0

    @field_validator("ngram_orders", "arms", mode="before")
    @classmethod
    def split_csv(cls, v):
        if isinstance(v, str):
            return [item.strip() for item in v.split(",") if item.strip()]
        return v

    @field_validator("top_fraction")
    @classmethod
    def fraction_range(cls, v: float) -> float:
        if not 0.0 < v <= 1.0:
            raise ValueError("top_fraction must lie in (0, 1]")
        return v


class ArmResult(BaseModel):
    """Outcome of training one classifier on one feature selection"""

    arm: str
    n_features: int
    feature_names: List[str]
    test_auc: Optional[float] = None
    best_val_epoch: Optional[int] = None
    curve: LearningCurve


class TextStudyReport(BaseModel):
    config: TextStudyConfig
    n_documents: int
    n_candidate_features: int
    top_features: List[str]
    arms: List[ArmResult]

    def arm(self, name: str) -> ArmResult:
        for result in self.arms:
            if result.arm == name:
                return result
        raise KeyError(name)
