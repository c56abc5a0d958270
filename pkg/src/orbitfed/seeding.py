"""Sub-seed derivation from the single scenario master seed.

``derive_seed(master, stream, *keys)`` feeds ``[master, STREAMS[stream], *keys]``
to :class:`numpy.random.SeedSequence` and returns its first 64-bit word, so
each (stream, keys) pair gets an independent, reproducible generator seed.
"""
from __future__ import annotations

import numpy as np

STREAMS = {
    "dataset": 1,
    "split": 2,
    "partition": 3,
    "train": 4,
    "aloha": 5,
    "centralized": 6,
}


def derive_seed(master: int, stream: str, *keys: int) -> int:
    if stream not in STREAMS:
        raise KeyError(f"unknown seed stream {stream!r}")
    if master < 0 or any(k < 0 for k in keys):
        raise ValueError("seeds and keys must be non-negative")
    seq = np.random.SeedSequence([int(master), STREAMS[stream], *map(int, keys)])
    return int(seq.generate_state(1, dtype=np.uint64)[0])
