"""Labeled image dataset container and seeded batching."""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from ..numerics import Rng


class DataError(ValueError):
    pass


@dataclass
class Dataset:
    images: np.ndarray  # (N, H, W) float64 in [0, 1]
    labels: np.ndarray  # (N,) integer class ids
    class_count: int
    split: str = "train"

    def __post_init__(self):
        self.images = np.asarray(self.images, dtype=np.float64)
        self.labels = np.asarray(self.labels, dtype=np.int64)
        if self.images.ndim != 3:
            raise DataError(f"images must be (N, H, W), got {self.images.shape}")
        if len(self.images) != len(self.labels):
            raise DataError(f"{len(self.images)} images vs {len(self.labels)} labels")
        if len(self.images) == 0:
            raise DataError("empty dataset")
        if self.images.min() < 0.0 or self.images.max() > 1.0:
            raise DataError("pixel values outside [0, 1]")
        if self.labels.min() < 0 or self.labels.max() >= self.class_count:
            raise DataError(f"labels outside [0, {self.class_count})")

    def __len__(self):
        return len(self.images)

    @property
    def side(self) -> int:
        return self.images.shape[1]

    def take(self, n: int) -> "Dataset":
        """First-n truncation; preserves order."""
        if n >= len(self):
            return self
        return replace(self, images=self.images[:n], labels=self.labels[:n])

    def subset(self, idx) -> "Dataset":
        return replace(self, images=self.images[idx], labels=self.labels[idx])

    def flat(self) -> np.ndarray:
        return self.images.reshape(len(self), -1)


def batches(ds: Dataset, size: int, rng: Rng):
    """Seeded-shuffle minibatches; the last batch may be short."""
    if size < 1:
        raise DataError(f"batch size must be >= 1, got {size}")
    order = rng.permutation(len(ds))
    for start in range(0, len(ds), size):
        idx = order[start:start + size]
        yield ds.images[idx], ds.labels[idx]
