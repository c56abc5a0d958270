"""Pluggable per-sample losses over flat weight vectors."""
from __future__ import annotations

import numpy as np


class SoftmaxRegression:
    """Multinomial logistic regression with a bias term.

    The flat weight vector is a row-major ``(num_features + 1, num_classes)``
    matrix whose last row is the bias.  ``prepare`` appends the constant
    feature once so the SGD inner loop is a single matmul.
    """

    def num_params(self, num_features: int, num_classes: int) -> int:
        return (num_features + 1) * num_classes

    def init_weights(self, num_features: int, num_classes: int) -> np.ndarray:
        return np.zeros(self.num_params(num_features, num_classes))

    def prepare(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        return np.hstack([X, np.ones((X.shape[0], 1))])

    def _matrix(self, w: np.ndarray, feats: np.ndarray) -> np.ndarray:
        rows = feats.shape[1]
        if w.size % rows:
            raise ValueError(f"weight vector of size {w.size} does not fit {rows} feature rows")
        return w.reshape(rows, w.size // rows)

    def _log_probs(self, w: np.ndarray, feats: np.ndarray) -> np.ndarray:
        logits = feats @ self._matrix(w, feats)
        logits = logits - logits.max(axis=1, keepdims=True)
        return logits - np.log(np.exp(logits).sum(axis=1, keepdims=True))

    def loss(self, w: np.ndarray, feats: np.ndarray, y: np.ndarray) -> float:
        logp = self._log_probs(w, feats)
        return float(-logp[np.arange(len(y)), y].mean())

    def gradient(self, w: np.ndarray, feats: np.ndarray, y: np.ndarray) -> np.ndarray:
        probs = np.exp(self._log_probs(w, feats))
        probs[np.arange(len(y)), y] -= 1.0
        return (feats.T @ probs).ravel() / len(y)

    def predict(self, w: np.ndarray, feats: np.ndarray) -> np.ndarray:
        # argmax picks the lowest class index on ties
        return np.argmax(feats @ self._matrix(w, feats), axis=1)


SOFTMAX = SoftmaxRegression()
