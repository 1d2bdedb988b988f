"""Score combination: quantile-normalize each detector against its clean
calibration scores, then take the max (bagging-style combiner)."""

from __future__ import annotations

import numpy as np


def quantile_normalize(scores, clean_scores, direction: str) -> np.ndarray:
    """Map each score to the fraction of clean calibration scores it beats
    in the adversarial direction, so heterogeneous detectors share a scale."""
    scores = np.asarray(scores, dtype=np.float64)
    clean = np.sort(np.asarray(clean_scores, dtype=np.float64))
    ranks = np.searchsorted(clean, scores, side="left") / len(clean)
    return ranks if direction == "above" else 1.0 - ranks


def max_combine(score_list, clean_list, directions) -> np.ndarray:
    """Elementwise max of quantile-normalized scores; direction is 'above'."""
    normalized = [quantile_normalize(s, c, d)
                  for s, c, d in zip(score_list, clean_list, directions)]
    return np.maximum.reduce(normalized)
