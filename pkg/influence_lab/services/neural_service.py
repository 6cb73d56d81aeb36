"""
Neural service: activations, the gated many-to-one RNN, a one-hidden-layer network,
cross-entropy, analytic gradients and full-batch gradient descent
"""

import logging
import math
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from influence_lab.core.config import settings
from influence_lab.core.exceptions import DimensionMismatchError, TrainingDivergedError, ValidationError
from influence_lab.schemas.dataset import LabeledDataset
from influence_lab.schemas.neural import (
    Activation,
    EpochRecord,
    FfnGradients,
    FfnParams,
    LearningCurve,
    RnnGradients,
    RnnParams,
    SequenceData,
    TrainConfig,
)
from influence_lab.schemas.screening import GateMask
from influence_lab.services.metrics_service import MetricsService
from influence_lab.services.screening_service import ScreeningService

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]
Mask = Optional[Union[GateMask, Sequence[bool], np.ndarray]]


def _sigmoid(x: np.ndarray) -> np.ndarray:
    return 0.5 * (1.0 + np.tanh(0.5 * x))


class EarlyStopping:
    """Patience counter over validation loss; a patience of 0 never stops"""

    def __init__(self, patience: int = 0, min_delta: float = 0.0):
        self.patience = patience
        self.min_delta = min_delta
        self.best = math.inf
        self.wait = 0

    def update(self, val_loss: float) -> bool:
        """Record one epoch; True once training should stop"""
        if val_loss < self.best - self.min_delta:
            self.best = val_loss
            self.wait = 0
            return False
        self.wait += 1
        return 0 < self.patience <= self.wait


def activation_value_and_derivative(kind: Activation, x: ArrayLike) -> Tuple[ArrayLike, ArrayLike]:
    """
    sigmoid: 1/(1+e^-x),  derivative e^-x/(e^-x+1)^2 = s(1-s)
    tanh:    tanh x,      derivative 4e^2x/(e^2x+1)^2 = 1-tanh^2
    relu:    max(0, x),   derivative 1(x > 0); 0 at x = 0
    """
    kind = Activation(kind)
    array = np.asarray(x, dtype=np.float64)
    if kind == Activation.SIGMOID:
        value = _sigmoid(array)
        derivative = value * (1.0 - value)
    elif kind == Activation.TANH:
        value = np.tanh(array)
        derivative = 1.0 - value * value
    else:
        value = np.maximum(array, 0.0)
        derivative = (array > 0.0).astype(np.float64)
    if np.ndim(x) == 0:
        return float(value), float(derivative)
    return value, derivative


def _as_mask(mask: Mask, length: int, what: str) -> np.ndarray:
    if mask is None:
        return np.ones(length, dtype=np.float64)
    values = mask.mask if isinstance(mask, GateMask) else mask
    array = np.asarray(values, dtype=bool).astype(np.float64)
    if array.shape != (length,):
        raise DimensionMismatchError(f"{what} mask has length {array.size}, expected {length}")
    return array


class NeuralService:
    """Small numpy networks trained by plain gradient descent"""

    def __init__(
        self,
        metrics_service: Optional[MetricsService] = None,
        loss_clamp: Optional[float] = None,
    ):
        self.metrics_service = metrics_service or MetricsService()
        self.loss_clamp = settings.LOSS_CLAMP if loss_clamp is None else loss_clamp

    # -- building blocks -----------------------------------------------------------------

    def gamma_gate(self, value: Sequence[float], iscore: float, threshold: float) -> np.ndarray:
        """value * 1(iscore > threshold)"""
        value = np.asarray(value, dtype=np.float64)
        if iscore > threshold:
            return value.copy()
        return np.zeros_like(value)

    def cross_entropy(self, y: Sequence[float], yhat: Sequence[float]) -> float:
        """Summed binary cross-entropy with yhat clamped to [eps, 1 - eps]"""
        y = np.asarray(y, dtype=np.float64).reshape(-1)
        yhat = np.asarray(yhat, dtype=np.float64).reshape(-1)
        if y.shape != yhat.shape:
            raise DimensionMismatchError(f"y has {y.size} values, yhat has {yhat.size}")
        clamped = np.clip(yhat, self.loss_clamp, 1.0 - self.loss_clamp)
        return float(-np.sum(y * np.log(clamped) + (1.0 - y) * np.log(1.0 - clamped)))

    # -- recurrent network ---------------------------------------------------------------

    def init_rnn_params(
        self,
        hidden_size: int,
        input_size: int,
        seed: int = 0,
        init_scale: float = 0.1,
        hidden_activation: Activation = Activation.RELU,
    ) -> RnnParams:
        rng = np.random.default_rng(seed)
        draw = lambda *shape: rng.uniform(-init_scale, init_scale, size=shape)
        return RnnParams(
            W=draw(hidden_size, hidden_size),
            U=draw(hidden_size, input_size),
            V=draw(1, hidden_size),
            b=draw(hidden_size),
            c=float(draw(1)[0]),
            hidden_activation=hidden_activation,
        )

    def _rnn_forward_batch(
        self, p: RnnParams, inputs: np.ndarray, mask: Mask = None, hidden_mask: Mask = None
    ) -> Tuple[List[np.ndarray], List[np.ndarray], List[np.ndarray], np.ndarray]:
        """Returns (hidden states h_0..h_T, pre-activations a_1..a_T, gated inputs, yhat)"""
        if inputs.ndim != 3 or inputs.shape[1] == 0:
            raise DimensionMismatchError("inputs must be a non-empty N x T x D batch")
        count, steps, width = inputs.shape
        if width != p.input_size:
            raise DimensionMismatchError(f"inputs have D={width}, parameters expect D={p.input_size}")
        gate = _as_mask(mask, steps, "input")
        keep = _as_mask(hidden_mask, p.hidden_size, "hidden")

        h = np.zeros((count, p.hidden_size))
        hidden, pre, gated = [h], [], []
        for t in range(steps):
            x_t = inputs[:, t, :] * gate[t]
            a_t = h @ p.W.T + x_t @ p.U.T + p.b
            h, _ = activation_value_and_derivative(p.hidden_activation, a_t)
            h = h * keep
            hidden.append(h)
            pre.append(a_t)
            gated.append(x_t)
        z = h @ p.V.T + p.c
        yhat = _sigmoid(z).reshape(-1)
        return hidden, pre, gated, yhat

    def rnn_forward(
        self, p: RnnParams, x: Sequence, mask: Mask = None, hidden_mask: Mask = None
    ) -> Tuple[np.ndarray, float]:
        """One sequence (T x D) -> (hidden states h_1..h_T as T x H, yhat)"""
        sequence = np.asarray(x, dtype=np.float64)
        if sequence.ndim == 1:
            sequence = sequence.reshape(-1, 1)
        if sequence.ndim != 2 or sequence.shape[0] == 0:
            raise DimensionMismatchError("a sequence is a non-empty T x D array")
        hidden, _, _, yhat = self._rnn_forward_batch(p, sequence[None, :, :], mask, hidden_mask)
        return np.vstack([h[0] for h in hidden[1:]]), float(yhat[0])

    def rnn_predict(self, p: RnnParams, data: SequenceData, mask: Mask = None, hidden_mask: Mask = None) -> np.ndarray:
        return self._rnn_forward_batch(p, data.inputs, mask, hidden_mask)[3]

    def bptt_gradients(
        self, p: RnnParams, batch: SequenceData, mask: Mask = None, hidden_mask: Mask = None
    ) -> RnnGradients:
        """Gradients of the summed cross-entropy through the unrolled recurrence"""
        if len(batch) == 0:
            raise ValidationError("empty batch")
        hidden, pre, gated, yhat = self._rnn_forward_batch(p, batch.inputs, mask, hidden_mask)
        keep = _as_mask(hidden_mask, p.hidden_size, "hidden")

        delta = (yhat - batch.labels).reshape(-1, 1)
        grad_V = delta.T @ hidden[-1]
        grad_c = float(delta.sum())
        grad_W = np.zeros_like(p.W)
        grad_U = np.zeros_like(p.U)
        grad_b = np.zeros_like(p.b)

        grad_h = delta @ p.V
        for t in range(len(pre) - 1, -1, -1):
            _, slope = activation_value_and_derivative(p.hidden_activation, pre[t])
            grad_a = grad_h * keep * slope
            grad_W += grad_a.T @ hidden[t]
            grad_U += grad_a.T @ gated[t]
            grad_b += grad_a.sum(axis=0)
            grad_h = grad_a @ p.W
        return RnnGradients(W=grad_W, U=grad_U, V=grad_V, b=grad_b, c=grad_c)

    def gd_step(self, p: RnnParams, grads: RnnGradients, eta: float) -> RnnParams:
        if eta <= 0:
            raise ValidationError("learning rate must be positive")
        # re-validated, so a non-finite update raises
        return RnnParams(
            W=p.W - eta * grads.W,
            U=p.U - eta * grads.U,
            V=p.V - eta * grads.V,
            b=p.b - eta * grads.b,
            c=p.c - eta * grads.c,
            hidden_activation=p.hidden_activation,
            output_activation=p.output_activation,
        )

    def sequences_from_dataset(self, ds: LabeledDataset) -> SequenceData:
        """Each feature becomes one time step with D = 1"""
        return SequenceData(inputs=ds.features[:, :, None], labels=ds.response)

    def train_rnn(
        self,
        p0: RnnParams,
        train: SequenceData,
        val: SequenceData,
        cfg: TrainConfig,
        mask: Mask = None,
        hidden_mask: Mask = None,
    ) -> Tuple[RnnParams, LearningCurve]:
        if len(train) == 0 or len(val) == 0:
            raise ValidationError("training and validation data must be non-empty")
        params = p0
        curve = LearningCurve()
        stopper = EarlyStopping(cfg.patience, cfg.min_delta)
        for epoch in range(1, cfg.epochs + 1):
            grads = self.bptt_gradients(params, train, mask, hidden_mask)
            scale = cfg.eta / len(train)
            try:
                params = self.gd_step(params, grads, scale)
            except ValueError:
                logger.error(f"RNN parameters became non-finite at epoch {epoch}")
                raise TrainingDivergedError(epoch) from None
            record = self._record(
                epoch,
                train.labels,
                self.rnn_predict(params, train, mask, hidden_mask),
                val.labels,
                self.rnn_predict(params, val, mask, hidden_mask),
            )
            curve.records.append(record)
            if stopper.update(record.val_loss):
                logger.info(f"Early stop at epoch {epoch}; best val loss {stopper.best:.5f}")
                break
        return params, curve

    def hidden_gate_mask(
        self,
        p: RnnParams,
        data: SequenceData,
        top_fraction: float,
        screening_service: Optional[ScreeningService] = None,
        mask: Mask = None,
    ) -> GateMask:
        """
        Gate hidden units by the I-score of their final activation. Each unit's h_T is
        binarized with the I-score threshold search first; constant units score 0.
        """
        screening_service = screening_service or ScreeningService()
        hidden, _, _, _ = self._rnn_forward_batch(p, data.inputs, mask)
        final = hidden[-1]
        units = LabeledDataset(
            features=final,
            column_names=[f"h{j + 1}" for j in range(p.hidden_size)],
            response=data.labels,
        )
        scores = []
        for j in range(p.hidden_size):
            if np.unique(final[:, j]).size < 2:
                scores.append(0.0)
            else:
                scores.append(screening_service.discretize(units, j).iscore_at_best)
        return screening_service.gate_threshold(scores, top_fraction)

    # -- feed-forward network ------------------------------------------------------------

    def init_ffn_params(
        self,
        hidden_size: int,
        input_size: int,
        seed: int = 0,
        init_scale: float = 0.1,
        hidden_activation: Activation = Activation.RELU,
    ) -> FfnParams:
        rng = np.random.default_rng(seed)
        return FfnParams(
            W1=rng.uniform(-init_scale, init_scale, size=(hidden_size, input_size)),
            b1=rng.uniform(-init_scale, init_scale, size=hidden_size),
            V=rng.uniform(-init_scale, init_scale, size=(1, hidden_size)),
            c=float(rng.uniform(-init_scale, init_scale)),
            hidden_activation=hidden_activation,
        )

    def _ffn_forward(self, p: FfnParams, features: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        if features.ndim != 2 or features.shape[1] != p.input_size:
            raise DimensionMismatchError(f"features must be N x {p.input_size}")
        pre = features @ p.W1.T + p.b1
        hidden, _ = activation_value_and_derivative(p.hidden_activation, pre)
        yhat = _sigmoid(hidden @ p.V.T + p.c).reshape(-1)
        return pre, hidden, yhat

    def ffn_forward(self, p: FfnParams, features: Sequence) -> np.ndarray:
        return self._ffn_forward(p, np.asarray(features, dtype=np.float64))[2]

    def ffn_gradients(self, p: FfnParams, features: Sequence, labels: Sequence[float]) -> FfnGradients:
        """Gradients of the summed cross-entropy"""
        features = np.asarray(features, dtype=np.float64)
        labels = np.asarray(labels, dtype=np.float64).reshape(-1)
        pre, hidden, yhat = self._ffn_forward(p, features)
        delta = (yhat - labels).reshape(-1, 1)
        _, slope = activation_value_and_derivative(p.hidden_activation, pre)
        grad_pre = (delta @ p.V) * slope
        return FfnGradients(
            W1=grad_pre.T @ features,
            b1=grad_pre.sum(axis=0),
            V=delta.T @ hidden,
            c=float(delta.sum()),
        )

    def train_ffn(
        self,
        train: LabeledDataset,
        val: LabeledDataset,
        hidden_width: int,
        cfg: TrainConfig,
    ) -> Tuple[FfnParams, LearningCurve]:
        if train.n == 0 or val.n == 0:
            raise ValidationError("training and validation data must be non-empty")
        if not train.is_binary or not val.is_binary:
            raise ValidationError("feed-forward training needs binary labels")
        params = self.init_ffn_params(
            hidden_width, train.p, seed=cfg.seed, init_scale=cfg.init_scale, hidden_activation=cfg.hidden_activation
        )
        curve = LearningCurve()
        stopper = EarlyStopping(cfg.patience, cfg.min_delta)
        scale = cfg.eta / train.n
        for epoch in range(1, cfg.epochs + 1):
            grads = self.ffn_gradients(params, train.features, train.response)
            try:
                params = FfnParams(
                    W1=params.W1 - scale * grads.W1,
                    b1=params.b1 - scale * grads.b1,
                    V=params.V - scale * grads.V,
                    c=params.c - scale * grads.c,
                    hidden_activation=params.hidden_activation,
                )
            except ValueError:
                logger.error(f"Feed-forward parameters became non-finite at epoch {epoch}")
                raise TrainingDivergedError(epoch) from None
            record = self._record(
                epoch,
                train.response,
                self.ffn_forward(params, train.features),
                val.response,
                self.ffn_forward(params, val.features),
            )
            curve.records.append(record)
            if stopper.update(record.val_loss):
                logger.info(f"Early stop at epoch {epoch}; best val loss {stopper.best:.5f}")
                break
        return params, curve

    # -- shared ---------------------------------------------------------------------------

    def _record(
        self,
        epoch: int,
        train_y: np.ndarray,
        train_yhat: np.ndarray,
        val_y: np.ndarray,
        val_yhat: np.ndarray,
    ) -> EpochRecord:
        train_loss = self.cross_entropy(train_y, train_yhat) / len(train_y)
        val_loss = self.cross_entropy(val_y, val_yhat) / len(val_y)
        if not (math.isfinite(train_loss) and math.isfinite(val_loss)) or np.isnan(train_yhat).any():
            logger.error(f"Non-finite loss at epoch {epoch}")
            raise TrainingDivergedError(epoch)
        record = EpochRecord(
            epoch=epoch,
            train_loss=train_loss,
            val_loss=val_loss,
            train_auc=self.metrics_service.auc_or_none(train_y, train_yhat),
            val_auc=self.metrics_service.auc_or_none(val_y, val_yhat),
        )
        logger.debug(
            f"epoch {epoch}: train_loss={train_loss:.5f} val_loss={val_loss:.5f} val_auc={record.val_auc}"
        )
        return record
