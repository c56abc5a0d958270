from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .data import DataShard
from .objective import SOFTMAX


class DivergenceError(FloatingPointError):
    def __init__(self, epoch: int, owner=None):
        self.epoch = epoch
        self.owner = owner
        where = f" on {owner}" if owner is not None else ""
        super().__init__(f"local training diverged{where} at epoch {epoch} (non-finite weights)")


@dataclass(frozen=True, eq=False)
class ModelState:
    """Flat weights plus the sample count and class histogram they stand for."""

    weights: np.ndarray
    sample_count: int
    class_histogram: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))

    def __post_init__(self) -> None:
        w = np.asarray(self.weights, dtype=float)
        hist = np.asarray(self.class_histogram, dtype=np.int64)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "class_histogram", hist)
        if w.ndim != 1:
            raise ValueError("weights must be a flat vector")
        if not np.all(np.isfinite(w)):
            raise ValueError("weights contain NaN or Inf")
        if hist.size and int(hist.sum()) != self.sample_count:
            raise ValueError(
                f"sample_count {self.sample_count} differs from histogram total {int(hist.sum())}"
            )

    @property
    def dim(self) -> int:
        return self.weights.size


@dataclass(frozen=True)
class TrainingConfig:
    local_epochs: int = 100
    learning_rate: float = 0.001
    batch_size: int = 32
    cycles_per_sample: float = 1e3
    cpu_freq: float = 1e9
    seed: int = 0

    def __post_init__(self) -> None:
        if self.local_epochs < 1:
            raise ValueError(f"local_epochs must be >= 1, got {self.local_epochs}")
        if not self.learning_rate >= 0:
            raise ValueError(f"learning_rate must be >= 0, got {self.learning_rate}")
        if self.batch_size < 1:
            raise ValueError(f"batch_size must be >= 1, got {self.batch_size}")
        if not self.cpu_freq > 0:
            raise ValueError(f"cpu_freq must be > 0, got {self.cpu_freq}")
        if not self.cycles_per_sample >= 0:
            raise ValueError(f"cycles_per_sample must be >= 0, got {self.cycles_per_sample}")


def _weights(model) -> np.ndarray:
    return model.weights if isinstance(model, ModelState) else np.asarray(model, dtype=float)


def local_loss(model, shard: DataShard, objective=SOFTMAX) -> float:
    """Mean per-sample loss of ``model`` on ``shard``."""
    if shard.size == 0:
        raise ValueError(f"shard {shard.owner} is empty")
    return objective.loss(_weights(model), objective.prepare(shard.X), shard.y)


def global_loss(shards: Iterable[DataShard], model, objective=SOFTMAX) -> float:
    """Data-size weighted mean of the local losses."""
    shards = list(shards)
    if not shards:
        raise ValueError("need at least one shard")
    total = sum(s.size for s in shards)
    return math.fsum(s.size / total * local_loss(model, s, objective) for s in shards)


def local_train(model, shard: DataShard, cfg: TrainingConfig, objective=SOFTMAX) -> ModelState:
    """``cfg.local_epochs`` epochs of mini-batch SGD, reshuffled each epoch from ``cfg.seed``."""
    if shard.size == 0:
        raise ValueError(f"shard {shard.owner} is empty")
    w = _weights(model).copy()
    feats = objective.prepare(shard.X)
    y = shard.y
    rng = np.random.default_rng(cfg.seed)
    m, b, lr = shard.size, cfg.batch_size, cfg.learning_rate
    # overflow is caught by the finiteness check below, not by numpy warnings
    with np.errstate(over="ignore", invalid="ignore"):
        for epoch in range(cfg.local_epochs):
            order = rng.permutation(m)
            for start in range(0, m, b):
                batch = order[start : start + b]
                w -= lr * objective.gradient(w, feats[batch], y[batch])
            if not np.all(np.isfinite(w)):
                raise DivergenceError(epoch, shard.owner)
    return ModelState(w, shard.size, shard.histogram)


def num_minibatches(m_k: int, batch_size: int) -> int:
    return math.ceil(m_k / batch_size)


def training_time(m_k: int, cfg: TrainingConfig) -> float:
    """Seconds of onboard compute: I * n_k * b_k * c_k / f_k with n_k = ceil(m_k / b_k)."""
    if m_k < 1:
        raise ValueError(f"m_k must be >= 1, got {m_k}")
    n_k = num_minibatches(m_k, cfg.batch_size)
    return cfg.local_epochs * n_k * cfg.batch_size * cfg.cycles_per_sample / cfg.cpu_freq


def evaluate(model, X: np.ndarray, y: np.ndarray, objective=SOFTMAX) -> float:
    """Fraction of argmax-correct predictions."""
    if len(y) == 0:
        raise ValueError("test set is empty")
    pred = objective.predict(_weights(model), objective.prepare(X))
    return float(np.mean(pred == np.asarray(y)))
