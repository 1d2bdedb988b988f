"""Deterministic randomness on a counter-based generator.

Every random draw in the workbench flows through an Rng; nothing reads
ambient entropy. A stream is identified by (seed, stream path), so
per-image substreams reproduce identically regardless of scheduling.
"""

from __future__ import annotations

import numpy as np


class Rng:
    def __init__(self, seed: int, stream: tuple = ()):
        self.seed = int(seed)
        self.stream = tuple(int(s) for s in stream)
        ss = np.random.SeedSequence(entropy=self.seed, spawn_key=self.stream)
        self._gen = np.random.Generator(np.random.Philox(ss))

    def __repr__(self):
        return f"Rng(seed={self.seed}, stream={self.stream})"

    def substream(self, index: int) -> "Rng":
        """Independent child stream; deterministic in (seed, stream, index)."""
        return Rng(self.seed, self.stream + (int(index),))

    def uniform(self, a: float, b: float, shape=()) -> np.ndarray:
        if a > b:
            raise ValueError(f"uniform bounds reversed: [{a}, {b}]")
        return a + (b - a) * self._gen.random(shape)

    def gaussian(self, shape=()) -> np.ndarray:
        return self._gen.standard_normal(shape)

    def bernoulli(self, p: float, shape=()) -> np.ndarray:
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"bernoulli p must be in [0, 1], got {p}")
        return (self._gen.random(shape) < p).astype(np.float64)

    def permutation(self, n: int) -> np.ndarray:
        return self._gen.permutation(n)

    def dropout_mask(self, p: float, shape) -> np.ndarray:
        """Inverted-dropout mask: 0 with probability p, else 1/(1-p)."""
        if not 0.0 <= p < 1.0:
            raise ValueError(f"dropout rate must be in [0, 1), got {p}")
        if p == 0.0:
            return np.ones(shape)
        keep = self._gen.random(shape) >= p
        return keep.astype(np.float64) / (1.0 - p)


def sample(rng: Rng, kind: str, shape=(), **params) -> np.ndarray:
    """Dispatch helper mirroring the supported draw kinds."""
    if kind == "uniform":
        return rng.uniform(params.get("a", 0.0), params.get("b", 1.0), shape)
    if kind == "gaussian":
        return rng.gaussian(shape)
    if kind == "bernoulli":
        return rng.bernoulli(params["p"], shape)
    raise ValueError(f"unknown sample kind {kind!r}")
