"""Per-layer class centers and distance embeddings for the path detector."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..models import ClassifierParams, hidden_activations
from .reports import DetectError


@dataclass
class ClassCenters:
    centers: list   # per layer: (C, width_l) mean activation of each class
    counts: np.ndarray

    @property
    def layer_count(self) -> int:
        return len(self.centers)

    @property
    def class_count(self) -> int:
        return len(self.centers[0])


def compute_centers(clf: ClassifierParams, images, labels) -> ClassCenters:
    """Centroid activation per (layer, class) over correctly-labeled cleans."""
    labels = np.asarray(labels)
    activations = hidden_activations(clf, images)
    counts = np.bincount(labels, minlength=clf.class_count)
    if (counts == 0).any():
        missing = np.flatnonzero(counts == 0).tolist()
        raise DetectError(f"no examples for classes {missing}")
    centers = []
    for act in activations:
        layer_centers = np.stack([act[labels == c].mean(axis=0)
                                  for c in range(clf.class_count)])
        centers.append(layer_centers)
    return ClassCenters(centers=centers, counts=counts)


def distance_embedding(x, clf: ClassifierParams, centers: ClassCenters) -> np.ndarray:
    """Concatenated per-layer vectors of L2 distances to every class center."""
    activations = hidden_activations(clf, x)
    if len(activations) != centers.layer_count:
        raise DetectError(f"layer count mismatch: model has {len(activations)}, "
                          f"centers built for {centers.layer_count}")
    pieces = []
    for act, layer_centers in zip(activations, centers.centers):
        if act.shape[1] != layer_centers.shape[1]:
            raise DetectError(f"layer width mismatch: {act.shape[1]} vs {layer_centers.shape[1]}")
        diff = act[:, None, :] - layer_centers[None, :, :]
        pieces.append(np.sqrt((diff * diff).sum(axis=2)))
    return np.concatenate(pieces, axis=1)
