"""Adam optimization, the training loop, and classification helpers."""

from __future__ import annotations

import logging
import math
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from ..numerics import RngState, RngStream
from .network import (
    NetworkSpec,
    Parameters,
    backward,
    forward,
    init_parameters,
    loss,
)

log = logging.getLogger(__name__)

EVAL_BATCH = 65536


class TrainingDivergedError(RuntimeError):
    """The training loss became non-finite."""


@dataclass(frozen=True)
class TrainerConfig:
    learning_rate: float = 1e-3
    batch_size: int = 1024
    epochs: int = 10
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_epsilon: float = 1e-8
    validation_fraction: float = 0.05
    seed: int = 0

    def __post_init__(self):
        if not (self.learning_rate > 0 and self.batch_size > 0 and self.epochs > 0):
            raise ValueError("learning rate, batch size and epochs must be positive")
        if not (0 < self.adam_beta1 < 1 and 0 < self.adam_beta2 < 1 and self.adam_epsilon > 0):
            raise ValueError("Adam betas must lie in (0, 1) and epsilon must be positive")
        if not 0.0 <= self.validation_fraction <= 0.5:
            raise ValueError("validation_fraction must lie in [0, 0.5]")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class TrainReport:
    final_train_loss: float
    validation_error: list[float] = field(default_factory=list)
    train_loss: list[float] = field(default_factory=list)
    best_epoch: int = 0
    duration_s: float = 0.0
    checksum: str = ""

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class AdamState:
    m: list[np.ndarray]
    v: list[np.ndarray]
    t: int = 0

    @classmethod
    def zeros_like(cls, params: Parameters) -> "AdamState":
        return cls([np.zeros_like(a) for a in params], [np.zeros_like(a) for a in params])


def adam_step(params: Parameters, grads, state: AdamState, config: TrainerConfig) -> None:
    """One bias-corrected Adam update, applied to ``params`` and ``state`` in place."""
    state.t += 1
    b1, b2 = config.adam_beta1, config.adam_beta2
    c1 = 1.0 - b1**state.t
    c2 = 1.0 - b2**state.t
    for w, g, m, v in zip(params.arrays, grads, state.m, state.v):
        m *= b1
        m += (1.0 - b1) * g
        v *= b2
        v += (1.0 - b2) * (g * g)
        w -= config.learning_rate * (m / c1) / (np.sqrt(v / c2) + config.adam_epsilon)


def predict_proba(spec: NetworkSpec, params: Parameters, x) -> np.ndarray:
    """Out-of-control probability for each row of ``x``, evaluated in chunks."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim == 1:
        return forward(spec, params, x)[1:]
    out = np.empty(len(x))
    for start in range(0, len(x), EVAL_BATCH):
        out[start:start + EVAL_BATCH] = forward(spec, params, x[start:start + EVAL_BATCH])[:, 1]
    return out


def classify(spec: NetworkSpec, params: Parameters, x):
    """Reject (True) when the out-of-control probability exceeds 0.5.

    A single tuple gives a bool, an ``(N, n)`` array gives a boolean vector.
    """
    x = np.asarray(x, dtype=np.float64)
    decision = predict_proba(spec, params, x) > 0.5
    return bool(decision[0]) if x.ndim == 1 else decision


def misclassification_rate(spec: NetworkSpec, params: Parameters, dataset) -> float:
    """Fraction of tuples whose classification differs from the label."""
    if len(dataset) == 0:
        raise ValueError("cannot score an empty dataset")
    return float(np.mean(classify(spec, params, dataset.values) != dataset.label))


class NetworkClassifier:
    """Callable wrapper turning a trained network into a QC function."""

    def __init__(self, spec: NetworkSpec, params: Parameters):
        params.check(spec)
        self.spec = spec
        self.params = params
        self.n = spec.n

    def __call__(self, x) -> np.ndarray:
        return np.atleast_1d(classify(self.spec, self.params, np.atleast_2d(x)))


def train(spec: NetworkSpec, data, config: TrainerConfig, init: Parameters | None = None):
    """Fit the network to a training batch with Adam on mean cross-entropy.

    The last ``validation_fraction`` of ``data`` is held out; the parameters of
    the epoch with the lowest validation misclassification are returned, ties
    going to the lower validation cross-entropy.
    Substream 0 of the seed initializes the weights, substream ``1 + e`` orders
    epoch ``e``.  Raises :class:`TrainingDivergedError` on a non-finite loss.
    """
    if data.n != spec.n:
        raise ValueError(f"training data has n={data.n}, network expects n={spec.n}")
    started = time.perf_counter()
    root = RngStream(RngState(config.seed))
    params = init.copy() if init is not None else init_parameters(spec, root.substream(0))

    total = len(data)
    n_val = int(math.floor(total * config.validation_fraction))
    n_train = total - n_val
    if n_train < 1:
        raise ValueError("no training records left after the validation split")
    x_train = data.values[:n_train]
    y_train = data.label[:n_train].astype(np.int64)
    val = data.take(slice(n_train, total)) if n_val else None

    state = AdamState.zeros_like(params)
    report = TrainReport(final_train_loss=math.nan)
    best = params.copy()
    best_error = (math.inf, math.inf)
    for epoch in range(config.epochs):
        order = root.substream(1 + epoch).permutation(n_train)
        running = 0.0
        for start in range(0, n_train, config.batch_size):
            idx = order[start:start + config.batch_size]
            value, grads = backward(spec, params, x_train[idx], y_train[idx])
            if not math.isfinite(value):
                raise TrainingDivergedError(f"non-finite loss at epoch {epoch}")
            adam_step(params, grads, state, config)
            running += value * len(idx)
        epoch_loss = running / n_train
        report.train_loss.append(epoch_loss)
        if val is not None:
            probs = np.empty((len(val), 2))
            for start in range(0, len(val), EVAL_BATCH):
                probs[start:start + EVAL_BATCH] = forward(spec, params, val.values[start:start + EVAL_BATCH])
            error = float(np.mean((probs[:, 1] > 0.5) != val.label))
            val_loss = loss(probs, val.label)
        else:
            error = val_loss = epoch_loss
        report.validation_error.append(error)
        log.info("epoch %d loss %.6f validation error %.6f", epoch, epoch_loss, error)
        # ties in misclassification go to the lower validation cross-entropy
        if (error, val_loss) < best_error:
            best_error = (error, val_loss)
            best = params.copy()
            report.best_epoch = epoch
    report.final_train_loss = report.train_loss[-1]
    report.duration_s = time.perf_counter() - started
    report.checksum = best.checksum()
    return best, report
