"""Learned detectors: binary adversarial-vs-clean networks (separate-input
and hidden-feature flavors), the distance-path MLP, and the (C+1)-class
classifier with an adversarial class node.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..data import Dataset
from ..models import (
    ClassifierParams,
    flatten_images,
    forward_layers,
    init_mlp_weights,
    train_classifier,
)
from ..numerics import Adam, Rng, Tensor, bce_with_logits, sigmoid
from .reports import DetectError

# re-exported for feature construction on the classifier side
from ..models.classifier import wrap_weights  # noqa: F401


def _binary_logit_t(weights: dict, sizes, feat_t: Tensor, wt: dict = None) -> Tensor:
    wt = wt or {k: Tensor(v) for k, v in weights.items()}
    h = feat_t
    last = len(sizes) - 2
    for i in range(len(sizes) - 1):
        h = (h @ wt[f"w{i}"]) + wt[f"b{i}"]
        if i < last:
            h = h.relu()
    return h


def _train_binary_mlp(features: np.ndarray, labels: np.ndarray, epochs: int,
                      rng: Rng, lr: float = 1e-3, hidden=(64,), batch_size: int = 128):
    labels = np.asarray(labels, dtype=np.float64)
    if len(np.unique(labels)) < 2:
        raise DetectError("binary detector needs both classes in its training set")
    sizes = (features.shape[1], *hidden, 1)
    weights = init_mlp_weights(sizes, rng.substream(0))
    opt = Adam(weights, alpha=lr)
    n = len(features)
    for epoch in range(epochs):
        order = rng.substream(epoch + 1).permutation(n)
        for start in range(0, n, batch_size):
            idx = order[start:start + batch_size]
            wt = {k: Tensor(v) for k, v in weights.items()}
            logit = _binary_logit_t(weights, sizes, Tensor(features[idx]), wt)
            loss = bce_with_logits(logit[:, 0], labels[idx]).mean()
            loss.backward()
            opt.step({k: (t.grad if t.grad is not None else np.zeros_like(t.data))
                      for k, t in wt.items()})
    return weights, sizes


@dataclass
class BinaryDetector:
    """Adversarial-probability model over a chosen feature source.

    feature_source: "input" (a fully separate network) or "hidden:<i>"
    (reads the frozen classifier's i-th layer, 0-based; gradients flow
    through the classifier trunk back to the pixels).
    """

    weights: dict
    sizes: tuple
    feature_source: str
    classifier: ClassifierParams = None
    meta: dict = field(default_factory=dict)

    def _features_t(self, x_t: Tensor) -> Tensor:
        if self.feature_source == "input":
            return x_t
        kind, _, idx = self.feature_source.partition(":")
        if kind != "hidden" or not idx.isdigit():
            raise DetectError(f"bad feature_source {self.feature_source!r}")
        if self.classifier is None:
            raise DetectError("hidden feature source needs the classifier")
        return forward_layers(self.classifier, x_t)[int(idx)]

    def logit(self, x) -> np.ndarray:
        flat = flatten_images(np.asarray(x, dtype=np.float64))
        return _binary_logit_t(self.weights, self.sizes, self._features_t(Tensor(flat))).data[:, 0]

    def adv_prob(self, x) -> np.ndarray:
        return sigmoid(Tensor(self.logit(x))).data

    def input_grad_toward_clean(self, flat: np.ndarray) -> np.ndarray:
        """Gradient whose ascent lowers the adversarial probability."""
        x_t = Tensor(flat)
        logit = _binary_logit_t(self.weights, self.sizes, self._features_t(x_t))
        (-logit.sum()).backward()
        return x_t.grad if x_t.grad is not None else np.zeros_like(flat)


def train_binary_net(clf: ClassifierParams, clean_images, adv_images,
                     feature_source: str = "input", epochs: int = 20,
                     rng: Rng = None, lr: float = 1e-3, hidden=(64,)) -> BinaryDetector:
    """Binary detector on clean (0) vs pre-generated adversarial (1) data,
    with the classifier weights frozen."""
    rng = rng or Rng(0)
    clean = flatten_images(np.asarray(clean_images, dtype=np.float64))
    adv = flatten_images(np.asarray(adv_images, dtype=np.float64))
    labels = np.concatenate([np.zeros(len(clean)), np.ones(len(adv))])
    stacked = np.concatenate([clean, adv])
    probe = BinaryDetector(weights={}, sizes=(), feature_source=feature_source, classifier=clf)
    features = probe._features_t(Tensor(stacked)).data
    weights, sizes = _train_binary_mlp(features, labels, epochs, rng, lr, hidden)
    return BinaryDetector(weights=weights, sizes=sizes, feature_source=feature_source,
                          classifier=clf, meta={"seed": rng.seed, "epochs": epochs})


@dataclass
class PathDetector:
    """Binary MLP over concatenated distance embeddings."""

    weights: dict
    sizes: tuple
    meta: dict = field(default_factory=dict)

    def adv_prob(self, embeddings) -> np.ndarray:
        e = np.asarray(embeddings, dtype=np.float64)
        logit = _binary_logit_t(self.weights, self.sizes, Tensor(e))
        return sigmoid(logit[:, 0]).data


def train_path_detector(embeddings, labels, epochs: int = 30, rng: Rng = None,
                        lr: float = 1e-3, hidden=(64,)) -> PathDetector:
    rng = rng or Rng(0)
    e = np.asarray(embeddings, dtype=np.float64)
    weights, sizes = _train_binary_mlp(e, np.asarray(labels), epochs, rng, lr, hidden)
    return PathDetector(weights=weights, sizes=sizes,
                        meta={"seed": rng.seed, "epochs": epochs})


def train_plus_one(clean_data: Dataset, adv_images, smoothing: float = 0.0,
                   epochs: int = 10, rng: Rng = None, **train_kw) -> ClassifierParams:
    """(C+1)-way classifier: cleans keep their labels, adversaries get the
    extra class node; detection is argmax == C."""
    rng = rng or Rng(0)
    adv = np.asarray(adv_images, dtype=np.float64)
    if adv.ndim == 2:
        adv = adv.reshape(-1, *clean_data.images.shape[1:])
    images = np.concatenate([clean_data.images, adv])
    labels = np.concatenate([clean_data.labels,
                             np.full(len(adv), clean_data.class_count, dtype=np.int64)])
    combined = Dataset(images, labels, class_count=clean_data.class_count + 1,
                       split=clean_data.split)
    loss_kind = "label_smooth" if smoothing > 0 else "ce"
    params, _ = train_classifier(combined, loss_kind=loss_kind, epochs=epochs,
                                 rng=rng, smoothing=smoothing, **train_kw)
    return params


def plus_one_score(plus_one: ClassifierParams, x) -> np.ndarray:
    """Probability mass on the adversarial class node."""
    from ..models import classify

    _, probs = classify(plus_one, x)
    return probs[:, -1]


def plus_one_flag(plus_one: ClassifierParams, x) -> np.ndarray:
    from ..models import predict

    return predict(plus_one, x) == plus_one.class_count - 1
