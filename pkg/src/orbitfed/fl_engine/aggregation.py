"""Sample-weighted model averaging at the orbit (partial) and GS (global) level."""
from __future__ import annotations

from typing import Mapping, Optional, Sequence

import numpy as np

from .training import ModelState


def _stack(models: Sequence[ModelState]) -> np.ndarray:
    if not models:
        raise ValueError("cannot aggregate an empty list of models")
    dims = {m.dim for m in models}
    if len(dims) != 1:
        raise ValueError(f"dimension mismatch among models: {sorted(dims)}")
    return np.stack([m.weights for m in models])


def _histogram_sum(models: Sequence[ModelState]) -> np.ndarray:
    sizes = {m.class_histogram.size for m in models}
    if len(sizes) != 1:
        raise ValueError("class histograms differ in length")
    return np.sum([m.class_histogram for m in models], axis=0).astype(np.int64)


def weighted_average(models: Sequence[ModelState], coefficients: Optional[np.ndarray] = None) -> ModelState:
    """sum_k (m_k / m) w_k, or explicit coefficients summing to one."""
    stack = _stack(models)
    counts = np.array([m.sample_count for m in models], dtype=float)
    total = counts.sum()
    if coefficients is None:
        if not total > 0:
            raise ValueError("total sample count must be > 0")
        coefficients = counts / total
    weights = coefficients @ stack if len(models) > 1 else coefficients[0] * stack[0]
    return ModelState(weights, int(total), _histogram_sum(models))


def aggregate_partial(models: Sequence[ModelState]) -> ModelState:
    """Partial global model of one orbit."""
    return weighted_average(list(models))


def inverse_frequency_coefficients(partials: Sequence[ModelState]) -> np.ndarray:
    """Each present class contributes equally; a partial's share is its mean class share."""
    hists = np.array([p.class_histogram for p in partials], dtype=float)
    totals = hists.sum(axis=0)
    present = totals > 0
    if not present.any():
        raise ValueError("inverse-frequency reweighting needs class histograms")
    shares = hists[:, present] / totals[present]
    return shares.mean(axis=1)


def aggregate_global(
    partials: Sequence[ModelState] | Mapping[int, ModelState],
    num_orbits: Optional[int] = None,
    reweight: Optional[str] = None,
) -> ModelState:
    """Global model from one partial per orbit.

    ``reweight="inverse_frequency"`` replaces the sample-size weights with
    class-balanced ones built from the piggybacked histograms.
    """
    if isinstance(partials, Mapping):
        if num_orbits is not None:
            missing = sorted(set(range(num_orbits)) - set(partials))
            if missing:
                raise ValueError(f"synchronous round is missing partials from orbits {missing}")
        partials = [partials[l] for l in sorted(partials)]
    partials = list(partials)
    if num_orbits is not None and len(partials) != num_orbits:
        raise ValueError(f"expected {num_orbits} orbit partials, got {len(partials)}")
    if reweight is None:
        return weighted_average(partials)
    if reweight == "inverse_frequency":
        return weighted_average(partials, inverse_frequency_coefficients(partials))
    raise ValueError(f"unknown reweighting mode {reweight!r}")


def fedavg(models: Sequence[ModelState]) -> ModelState:
    """Flat single-level FedAvg over every client."""
    return weighted_average(list(models))
