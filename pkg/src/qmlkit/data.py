"""Dataset ingestion (IDX), preprocessing, splitting, batching and evaluation."""
from __future__ import annotations

import gzip
import os
import struct
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

IDX_IMAGES = 2051
IDX_LABELS = 2049


class IdxFormatError(ValueError):
    pass


def parse_idx(raw: bytes) -> np.ndarray:
    """Decode an IDX file with magic 2049 (labels, 1-D) or 2051 (images, 3-D).

    The u8 payload is returned as float64 with the declared extents.
    """
    if len(raw) < 4:
        raise IdxFormatError("truncated header")
    (magic,) = struct.unpack(">i", raw[:4])
    if magic == IDX_LABELS:
        ndim = 1
    elif magic == IDX_IMAGES:
        ndim = 3
    else:
        raise IdxFormatError(f"bad magic number {magic}")
    header = 4 + 4 * ndim
    if len(raw) < header:
        raise IdxFormatError("truncated header")
    dims = struct.unpack(f">{ndim}i", raw[4:header])
    if any(d < 0 for d in dims):
        raise IdxFormatError(f"negative extent in {dims}")
    n = int(np.prod(dims))
    if len(raw) - header < n:
        raise IdxFormatError(f"payload holds {len(raw) - header} bytes, header declares {n}")
    if len(raw) - header > n:
        raise IdxFormatError("trailing bytes after payload")
    payload = np.frombuffer(raw, dtype=np.uint8, count=n, offset=header)
    return payload.astype(float).reshape(dims)


def write_idx(array, path=None) -> bytes:
    """Encode a u8-valued array as IDX (1-D labels or 3-D images)."""
    a = np.asarray(array)
    if a.ndim == 1:
        magic = IDX_LABELS
    elif a.ndim == 3:
        magic = IDX_IMAGES
    else:
        raise ValueError("IDX writer supports 1-D labels or 3-D images")
    raw = struct.pack(">i", magic) + struct.pack(f">{a.ndim}i", *a.shape) + a.astype(np.uint8).tobytes()
    if path is not None:
        with open(path, "wb") as fh:
            fh.write(raw)
    return raw


def load_idx(path: str | os.PathLike) -> np.ndarray:
    path = os.fspath(path)
    if not os.path.exists(path):
        raise FileNotFoundError(f"IDX file not found: {path}")
    opener = gzip.open if path.endswith(".gz") else open
    with opener(path, "rb") as fh:
        return parse_idx(fh.read())


def standardize(x) -> np.ndarray:
    """Per-sample (row) zero mean and unit std; constant rows are only centered."""
    x = np.asarray(x, dtype=float)
    flat = x.reshape(len(x), -1) if x.ndim > 1 else x.reshape(1, -1)
    mu = flat.mean(axis=1, keepdims=True)
    sd = flat.std(axis=1, keepdims=True)
    out = (flat - mu) / np.where(sd > 0, sd, 1.0)
    return out.reshape(x.shape)


def one_hot(labels, k: int) -> np.ndarray:
    labels = np.asarray(labels, dtype=int)
    if labels.size and (labels.min() < 0 or labels.max() >= k):
        raise ValueError(f"labels must lie in [0, {k})")
    out = np.zeros((labels.size, k))
    out[np.arange(labels.size), labels] = 1.0
    return out


@dataclass(frozen=True)
class Dataset:
    features: np.ndarray
    labels: np.ndarray
    n_classes: int

    def __post_init__(self):
        if len(self.features) != len(self.labels):
            raise ValueError("feature and label counts differ")
        lab = np.asarray(self.labels)
        if lab.size and (lab.min() < 0 or lab.max() >= self.n_classes):
            raise ValueError("labels out of range")

    def __len__(self):
        return len(self.labels)

    def subset(self, idx) -> "Dataset":
        return Dataset(self.features[idx], self.labels[idx], self.n_classes)


@dataclass(frozen=True)
class Split:
    train: Dataset
    validation: Dataset
    test: Dataset


def split_sizes(n: int, fractions: Sequence[float]) -> list[int]:
    """Sizes rounded to nearest; the remainder goes to the first (train) part."""
    sizes = [int(round(f * n)) for f in fractions]
    sizes[0] = n - sum(sizes[1:])
    return sizes


def split_dataset(d: Dataset, fractions: Sequence[float] = (0.8, 0.1, 0.1), rng=None) -> Split:
    if len(d) == 0:
        raise ValueError("cannot split an empty dataset")
    fractions = tuple(float(f) for f in fractions)
    if len(fractions) != 3 or any(f < 0 for f in fractions) or abs(sum(fractions) - 1.0) > 1e-9:
        raise ValueError("need three non-negative fractions summing to 1")
    rng = np.random.default_rng() if rng is None else rng
    perm = rng.permutation(len(d))
    a, b, _ = split_sizes(len(d), fractions)
    return Split(d.subset(perm[:a]), d.subset(perm[a : a + b]), d.subset(perm[a + b :]))


def batches(n: int, batch_size: int, rng=None) -> Iterator[np.ndarray]:
    """Index batches covering ``range(n)`` exactly once, shuffled when ``rng`` is given."""
    if batch_size < 1:
        raise ValueError("batch size must be positive")
    order = np.arange(n) if rng is None else rng.permutation(n)
    for i in range(0, n, batch_size):
        yield order[i : i + batch_size]


def confusion_and_accuracy(preds, labels, k: int) -> tuple[np.ndarray, float]:
    """Row-normalized confusion matrix C[pred, true] and its mean diagonal.

    Rows with no predictions stay zero and are left out of the mean.
    """
    preds = np.asarray(preds, dtype=int)
    labels = np.asarray(labels, dtype=int)
    if preds.shape != labels.shape:
        raise ValueError("preds and labels must have equal length")
    for arr in (preds, labels):
        if arr.size and (arr.min() < 0 or arr.max() >= k):
            raise ValueError(f"class index out of range [0, {k})")
    counts = np.zeros((k, k))
    np.add.at(counts, (preds, labels), 1.0)
    totals = counts.sum(axis=1, keepdims=True)
    c = np.divide(counts, totals, out=np.zeros_like(counts), where=totals > 0)
    support = totals[:, 0] > 0
    acc = float(np.diag(c)[support].mean()) if support.any() else 0.0
    return c, acc


def fraction_correct(preds, labels) -> float:
    preds = np.asarray(preds)
    labels = np.asarray(labels)
    return float((preds == labels).mean()) if labels.size else 0.0
