"""
Datasets, per-satellite shards, and the IID / non-IID partitioning.

The default corpus is a seeded Gaussian-blob generator.  MNIST-style IDX
files can be loaded instead with :func:`load_idx_dataset`.
"""
from __future__ import annotations

import math
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..orbital_mechanics import ConstellationSpec

_IDX_DTYPES = {
    0x08: np.dtype(">u1"),
    0x09: np.dtype(">i1"),
    0x0B: np.dtype(">i2"),
    0x0C: np.dtype(">i4"),
    0x0D: np.dtype(">f4"),
    0x0E: np.dtype(">f8"),
}


@dataclass(frozen=True)
class Dataset:
    X: np.ndarray
    y: np.ndarray
    num_classes: int

    def __post_init__(self) -> None:
        if self.X.ndim != 2:
            raise ValueError(f"features must be 2-D, got shape {self.X.shape}")
        if len(self.X) != len(self.y):
            raise ValueError("features and labels differ in length")
        if len(self.y) and (self.y.min() < 0 or self.y.max() >= self.num_classes):
            raise ValueError(f"labels must lie in [0, {self.num_classes})")

    def __len__(self) -> int:
        return len(self.y)

    @property
    def num_features(self) -> int:
        return self.X.shape[1]

    def subset(self, idx: np.ndarray) -> "Dataset":
        return Dataset(self.X[idx], self.y[idx], self.num_classes)


@dataclass(frozen=True)
class DataShard:
    owner: tuple[int, int]
    X: np.ndarray
    y: np.ndarray
    num_classes: int

    def __post_init__(self) -> None:
        if self.X.ndim != 2 or len(self.X) != len(self.y):
            raise ValueError(f"shard {self.owner}: features must be 2-D and match labels")
        if len(self.y) and (self.y.min() < 0 or self.y.max() >= self.num_classes):
            raise ValueError(f"shard {self.owner}: labels must lie in [0, {self.num_classes})")

    @property
    def size(self) -> int:
        return len(self.y)

    @property
    def histogram(self) -> np.ndarray:
        return np.bincount(self.y, minlength=self.num_classes).astype(np.int64)


def synthetic_blobs(
    num_samples: int = 5000,
    num_features: int = 16,
    num_classes: int = 10,
    separation: float = 3.0,
    seed: int = 0,
) -> Dataset:
    """Class-balanced Gaussian blobs: unit-variance noise around random centres."""
    if num_samples < 1 or num_features < 1 or num_classes < 2:
        raise ValueError("need num_samples >= 1, num_features >= 1, num_classes >= 2")
    rng = np.random.default_rng(seed)
    centres = rng.normal(size=(num_classes, num_features)) * separation
    y = rng.permutation(np.arange(num_samples) % num_classes)
    X = centres[y] + rng.normal(size=(num_samples, num_features))
    return Dataset(X, y.astype(np.int64), num_classes)


def train_test_split(data: Dataset, test_fraction: float, seed: int) -> tuple[Dataset, Dataset]:
    if not 0 < test_fraction < 1:
        raise ValueError(f"test_fraction must lie in (0, 1), got {test_fraction}")
    perm = np.random.default_rng(seed).permutation(len(data))
    n_test = max(1, int(round(test_fraction * len(data))))
    return data.subset(np.sort(perm[n_test:])), data.subset(np.sort(perm[:n_test]))


def read_idx(path: str | Path) -> np.ndarray:
    raw = Path(path).read_bytes()
    if len(raw) < 4 or raw[0] != 0 or raw[1] != 0:
        raise ValueError(f"{path}: not an IDX file (bad magic)")
    code, ndim = raw[2], raw[3]
    if code not in _IDX_DTYPES:
        raise ValueError(f"{path}: unknown IDX element type 0x{code:02x}")
    header = 4 + 4 * ndim
    dims = struct.unpack(f">{ndim}I", raw[4:header])
    dtype = _IDX_DTYPES[code]
    count = math.prod(dims)
    if len(raw) - header != count * dtype.itemsize:
        raise ValueError(f"{path}: payload size does not match dimensions {dims}")
    return np.frombuffer(raw, dtype=dtype, count=count, offset=header).reshape(dims)


def write_idx(path: str | Path, array: np.ndarray) -> None:
    array = np.asarray(array)
    for code, dtype in _IDX_DTYPES.items():
        if dtype.kind == array.dtype.kind and dtype.itemsize == array.dtype.itemsize:
            break
    else:
        raise ValueError(f"dtype {array.dtype} has no IDX encoding")
    header = bytes([0, 0, code, array.ndim]) + struct.pack(f">{array.ndim}I", *array.shape)
    Path(path).write_bytes(header + array.astype(dtype).tobytes())


def load_idx_dataset(images: str | Path, labels: str | Path, num_classes: int = 10) -> Dataset:
    X = read_idx(images)
    y = read_idx(labels)
    X = X.reshape(len(X), -1).astype(float)
    if X.size and X.max() > 1.0:
        X = X / 255.0
    return Dataset(X, y.astype(np.int64), num_classes)


def non_iid_groups(num_orbits: int, num_classes: int) -> list[tuple[list[int], list[int]]]:
    """(orbits, classes) pairs: the first ceil(0.4 L) orbits get the first floor(0.4 C) classes."""
    n_orbits = math.ceil(0.4 * num_orbits)
    n_classes = math.floor(0.4 * num_classes)
    first = (list(range(n_orbits)), list(range(n_classes)))
    rest = (list(range(n_orbits, num_orbits)), list(range(n_classes, num_classes)))
    if not (first[0] and first[1] and rest[0] and rest[1]):
        return [(list(range(num_orbits)), list(range(num_classes)))]
    return [first, rest]


def _deal(idx: np.ndarray, y: np.ndarray, owners: list[tuple[int, int]], rng: np.random.Generator) -> dict:
    # shuffle, then deal class-sorted samples round-robin so each owner sees every class
    idx = rng.permutation(idx)
    idx = idx[np.argsort(y[idx], kind="stable")]
    return {owner: np.sort(idx[i :: len(owners)]) for i, owner in enumerate(owners)}


def partition_data(
    data: Dataset,
    spec: ConstellationSpec,
    mode: str = "iid",
    seed: int = 0,
) -> dict[tuple[int, int], DataShard]:
    """Split ``data`` into one disjoint shard per satellite, keyed ``(orbit, slot)``."""
    sats = spec.satellites()
    if len(data) < len(sats):
        raise ValueError(f"dataset of {len(data)} samples is smaller than the {len(sats)} satellites")
    rng = np.random.default_rng(seed)
    if mode == "iid":
        groups = [(list(range(spec.num_orbits)), list(range(data.num_classes)))]
    elif mode in ("non-iid", "non_iid", "noniid"):
        groups = non_iid_groups(spec.num_orbits, data.num_classes)
    else:
        raise ValueError(f"unknown partition mode {mode!r}; expected 'iid' or 'non-iid'")

    assignment: dict[tuple[int, int], np.ndarray] = {}
    for orbits, classes in groups:
        owners = [(l, k) for l in orbits for k in range(spec.sats_per_orbit)]
        idx = np.nonzero(np.isin(data.y, classes))[0]
        if len(idx) < len(owners):
            raise ValueError(f"classes {classes} hold {len(idx)} samples for {len(owners)} satellites")
        assignment.update(_deal(idx, data.y, owners, rng))
    return {
        sat: DataShard(sat, data.X[assignment[sat]], data.y[assignment[sat]], data.num_classes)
        for sat in sats
    }


def pooled(shards) -> Dataset:
    shards = list(shards)
    return Dataset(
        np.concatenate([s.X for s in shards]),
        np.concatenate([s.y for s in shards]),
        shards[0].num_classes,
    )
