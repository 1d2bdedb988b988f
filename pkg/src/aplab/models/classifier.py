"""MLP classifier: forward passes, the three training losses, evaluation.

Loss kinds: standard cross-entropy, reverse cross-entropy (trained against
reversed labels, served with negated logits) and label smoothing. The
reversed-logit rule means an RCE model predicts the class whose raw logit
is LOWEST.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..data import Dataset, batches
from ..numerics import Adam, Rng, Tensor, dropout_apply, log_softmax

LOSS_KINDS = ("ce", "rce", "label_smooth")


@dataclass
class ClassifierParams:
    weights: dict
    sizes: tuple  # (in_dim, hidden..., class_count)
    loss_kind: str = "ce"
    smoothing: float = 0.0
    p_drop: float = 0.5
    reversed_logits: bool = False
    meta: dict = field(default_factory=dict)

    @property
    def class_count(self) -> int:
        return self.sizes[-1]

    @property
    def in_dim(self) -> int:
        return self.sizes[0]

    @property
    def layer_count(self) -> int:
        return len(self.sizes) - 1


def flatten_images(x) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    return x.reshape(len(x), -1) if x.ndim == 3 else x


def init_mlp_weights(sizes, rng: Rng, prefix: str = "") -> dict:
    """He-scaled gaussian weights, zero biases."""
    weights = {}
    for i, (fan_in, fan_out) in enumerate(zip(sizes[:-1], sizes[1:])):
        weights[f"{prefix}w{i}"] = rng.gaussian((fan_in, fan_out)) * np.sqrt(2.0 / fan_in)
        weights[f"{prefix}b{i}"] = np.zeros(fan_out)
    return weights


def wrap_weights(weights: dict) -> dict:
    return {k: Tensor(v) for k, v in weights.items()}


def forward_layers(params: ClassifierParams, x_t: Tensor, dropout_mask=None,
                   weight_tensors: dict = None) -> list:
    """All layer outputs [h1, ..., h_last, logits]; mask hits the last hidden."""
    wt = weight_tensors if weight_tensors is not None else wrap_weights(params.weights)
    h = x_t
    outs = []
    last = params.layer_count - 1
    for i in range(params.layer_count):
        z = (h @ wt[f"w{i}"]) + wt[f"b{i}"]
        if i < last:
            h = z.relu()
            if i == last - 1 and dropout_mask is not None:
                h = dropout_apply(h, dropout_mask)
            outs.append(h)
        else:
            outs.append(z)
    return outs


def logits_t(params: ClassifierParams, x_t: Tensor, dropout_mask=None,
             weight_tensors: dict = None) -> Tensor:
    return forward_layers(params, x_t, dropout_mask, weight_tensors)[-1]


def classify(params: ClassifierParams, x, mode: str = "deterministic", rng: Rng = None):
    """(logits, probs); probs = softmax(-logits) for reversed-logit models.

    Stochastic mode applies a seeded dropout mask to the last hidden layer.
    """
    flat = flatten_images(x)
    if flat.shape[1] != params.in_dim:
        raise ValueError(f"input width {flat.shape[1]} != model width {params.in_dim}")
    mask = None
    if mode == "stochastic":
        if rng is None:
            raise ValueError("stochastic mode needs an rng")
        mask = rng.dropout_mask(params.p_drop, (len(flat), params.sizes[-2]))
    elif mode != "deterministic":
        raise ValueError(f"unknown mode {mode!r}")
    z = logits_t(params, Tensor(flat), mask).data
    scores = -z if params.reversed_logits else z
    probs = Tensor(scores).softmax(axis=-1).data
    return z, probs


def hidden_activations(params: ClassifierParams, x) -> list:
    """Deterministic per-layer activations [h1, ..., logits] as arrays."""
    return [o.data for o in forward_layers(params, Tensor(flatten_images(x)))]


def predict(params: ClassifierParams, x) -> np.ndarray:
    _, probs = classify(params, x)
    return probs.argmax(axis=1)


def accuracy(params: ClassifierParams, images, labels) -> float:
    return float((predict(params, images) == np.asarray(labels)).mean())


def onehot(labels, class_count: int) -> np.ndarray:
    return np.eye(class_count)[np.asarray(labels, dtype=np.int64)]


def smoothed_targets(labels, class_count: int, rho: float) -> np.ndarray:
    """True class gets 1-rho, the rest spread uniformly; rho=0 is one-hot."""
    if not 0.0 <= rho < 1.0:
        raise ValueError(f"smoothing must be in [0, 1), got {rho}")
    base = np.full((len(labels), class_count), rho / (class_count - 1))
    base[np.arange(len(labels)), np.asarray(labels, dtype=np.int64)] = 1.0 - rho
    return base


def reversed_targets(labels, class_count: int) -> np.ndarray:
    """0 at the true class, 1/(C-1) elsewhere."""
    base = np.full((len(labels), class_count), 1.0 / (class_count - 1))
    base[np.arange(len(labels)), np.asarray(labels, dtype=np.int64)] = 0.0
    return base


def training_targets(labels, class_count: int, loss_kind: str, smoothing: float = 0.0) -> np.ndarray:
    if loss_kind == "ce":
        return onehot(labels, class_count)
    if loss_kind == "label_smooth":
        return smoothed_targets(labels, class_count, smoothing)
    if loss_kind == "rce":
        return reversed_targets(labels, class_count)
    raise ValueError(f"unknown loss_kind {loss_kind!r} (expected one of {LOSS_KINDS})")


def nll_loss_t(z: Tensor, targets: np.ndarray) -> Tensor:
    """Mean over the batch of -sum(targets * log_softmax(z))."""
    return (-(log_softmax(z, axis=-1) * Tensor(targets)).sum(axis=1)).mean()


def collect_grads(weight_tensors: dict) -> dict:
    return {k: (t.grad if t.grad is not None else np.zeros_like(t.data))
            for k, t in weight_tensors.items()}


def train_classifier(data: Dataset, loss_kind: str = "ce", epochs: int = 5,
                     rng: Rng = None, lr: float = 1e-3, batch_size: int = 128,
                     hidden=(256, 128), smoothing: float = 0.1,
                     p_drop: float = 0.5, sizes=None):
    """Adam-trained MLP; returns (params, per-epoch mean loss history)."""
    if loss_kind not in LOSS_KINDS:
        raise ValueError(f"unknown loss_kind {loss_kind!r} (expected one of {LOSS_KINDS})")
    rng = rng or Rng(0)
    in_dim = int(np.prod(data.images.shape[1:]))
    sizes = tuple(sizes) if sizes else (in_dim, *hidden, data.class_count)
    params = ClassifierParams(
        weights=init_mlp_weights(sizes, rng.substream(0)),
        sizes=sizes,
        loss_kind=loss_kind,
        smoothing=smoothing if loss_kind == "label_smooth" else 0.0,
        p_drop=p_drop,
        reversed_logits=(loss_kind == "rce"),
        meta={"seed": rng.seed, "epochs": epochs, "loss_kind": loss_kind},
    )
    opt = Adam(params.weights, alpha=lr)
    history = []
    for epoch in range(epochs):
        epoch_rng = rng.substream(epoch + 1)
        losses = []
        for b, (imgs, labs) in enumerate(batches(data, batch_size, epoch_rng.substream(0))):
            flat = flatten_images(imgs)
            mask = None
            if p_drop > 0:
                mask = epoch_rng.substream(b + 1).dropout_mask(p_drop, (len(flat), sizes[-2]))
            wt = wrap_weights(params.weights)
            z = logits_t(params, Tensor(flat), mask, weight_tensors=wt)
            loss = nll_loss_t(z, training_targets(labs, data.class_count, loss_kind, smoothing))
            loss.backward()
            opt.step(collect_grads(wt))
            losses.append(float(loss.data))
        history.append(float(np.mean(losses)))
    return params, history
