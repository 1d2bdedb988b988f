"""Decoder that reconstructs the input image from classifier logits.

Clean inputs decode back cleanly; adversarial inputs decode noisier, which
is what the logit-reconstruction detector scores.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..data import Dataset, batches
from ..numerics import Adam, Rng, Tensor, bce_with_logits, sigmoid
from .classifier import ClassifierParams, classify, collect_grads, flatten_images, init_mlp_weights


@dataclass
class LogitDecoderParams:
    weights: dict
    sizes: tuple  # (class_count, hidden..., out_dim)
    meta: dict = field(default_factory=dict)


def decode_logits_t(dec: LogitDecoderParams, z_t: Tensor, wt: dict = None) -> Tensor:
    wt = wt or {k: Tensor(v) for k, v in dec.weights.items()}
    h = z_t
    last = len(dec.sizes) - 2
    for i in range(len(dec.sizes) - 1):
        h = (h @ wt[f"w{i}"]) + wt[f"b{i}"]
        if i < last:
            h = h.relu()
    return h


def decode(dec: LogitDecoderParams, logits) -> np.ndarray:
    """Sigmoid image reconstruction from a logits batch."""
    return sigmoid(decode_logits_t(dec, Tensor(np.asarray(logits, dtype=np.float64)))).data


def train_logit_decoder(classifier: ClassifierParams, data: Dataset, epochs: int = 30,
                        rng: Rng = None, lr: float = 1e-3, batch_size: int = 128,
                        hidden=(128,)):
    """Fit the decoder to a frozen classifier's logits on clean data."""
    rng = rng or Rng(0)
    in_dim = int(np.prod(data.images.shape[1:]))
    sizes = (classifier.class_count, *hidden, in_dim)
    dec = LogitDecoderParams(
        weights=init_mlp_weights(sizes, rng.substream(0)),
        sizes=sizes,
        meta={"seed": rng.seed, "epochs": epochs},
    )
    opt = Adam(dec.weights, alpha=lr)
    history = []
    for epoch in range(epochs):
        losses = []
        for imgs, _ in batches(data, batch_size, rng.substream(epoch + 1)):
            flat = flatten_images(imgs)
            z, _ = classify(classifier, flat)
            wt = {k: Tensor(v) for k, v in dec.weights.items()}
            out = decode_logits_t(dec, Tensor(z), wt)
            loss = bce_with_logits(out, flat).sum(axis=1).mean()
            loss.backward()
            opt.step(collect_grads(wt))
            losses.append(float(loss.data))
        history.append(float(np.mean(losses)))
    return dec, history
