"""Variational autoencoder purifier: ELBO training and reconstruction.

Encoder 784 -> hidden -> (mu, log sigma^2); decoder z -> hidden -> 784 with
sigmoid output. Per-example loss is pixel-summed binary cross-entropy plus
the analytic KL to the unit gaussian prior.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..data import Dataset, batches
from ..numerics import Adam, Rng, Tensor, bce_with_logits, exp, log, sigmoid, square
from .classifier import collect_grads, flatten_images


@dataclass
class VaeParams:
    weights: dict
    z_dim: int
    hidden: int = 400
    in_dim: int = 784
    meta: dict = field(default_factory=dict)


def _wrap(weights: dict) -> dict:
    return {k: Tensor(v) for k, v in weights.items()}


def init_vae_weights(in_dim: int, hidden: int, z_dim: int, rng: Rng) -> dict:
    def dense(r, fan_in, fan_out, scale=None):
        s = scale if scale is not None else np.sqrt(2.0 / fan_in)
        return r.gaussian((fan_in, fan_out)) * s

    return {
        "enc_w": dense(rng.substream(0), in_dim, hidden),
        "enc_b": np.zeros(hidden),
        "mu_w": dense(rng.substream(1), hidden, z_dim, scale=0.05),
        "mu_b": np.zeros(z_dim),
        "lv_w": dense(rng.substream(2), hidden, z_dim, scale=0.05),
        "lv_b": np.zeros(z_dim),
        "dec_w": dense(rng.substream(3), z_dim, hidden),
        "dec_b": np.zeros(hidden),
        "out_w": dense(rng.substream(4), hidden, in_dim),
        "out_b": np.zeros(in_dim),
    }


def encode_t(vae: VaeParams, x_t: Tensor, wt: dict = None):
    wt = wt or _wrap(vae.weights)
    h = ((x_t @ wt["enc_w"]) + wt["enc_b"]).relu()
    mu = (h @ wt["mu_w"]) + wt["mu_b"]
    logvar = (h @ wt["lv_w"]) + wt["lv_b"]
    return mu, logvar


def decode_logits_t(vae: VaeParams, z_t: Tensor, wt: dict = None) -> Tensor:
    wt = wt or _wrap(vae.weights)
    h = ((z_t @ wt["dec_w"]) + wt["dec_b"]).relu()
    return (h @ wt["out_w"]) + wt["out_b"]


def reconstruct_t(vae: VaeParams, x_t: Tensor, wt: dict = None) -> Tensor:
    """Mean-latent reconstruction as a differentiable graph (pixels in (0,1))."""
    wt = wt or _wrap(vae.weights)
    mu, _ = encode_t(vae, x_t, wt)
    return sigmoid(decode_logits_t(vae, mu, wt))


def reconstruct(vae: VaeParams, x, mode: str = "mean_latent", rng: Rng = None) -> np.ndarray:
    """Reconstruction with the input's shape; z = mu unless mode='sampled'."""
    arr = np.asarray(x, dtype=np.float64)
    flat = flatten_images(arr)
    mu, logvar = encode_t(vae, Tensor(flat))
    if mode == "mean_latent":
        z = mu
    elif mode == "sampled":
        if rng is None:
            raise ValueError("sampled mode needs an rng")
        noise = rng.gaussian(mu.data.shape)
        z = mu + exp(logvar * 0.5) * Tensor(noise)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    out = sigmoid(decode_logits_t(vae, z)).data
    return out.reshape(arr.shape)


def recon_error(x, y) -> np.ndarray:
    """Per-example mean over pixels of squared differences."""
    xf = flatten_images(np.asarray(x, dtype=np.float64))
    yf = flatten_images(np.asarray(y, dtype=np.float64))
    if xf.shape != yf.shape:
        raise ValueError(f"shape mismatch: {xf.shape} vs {yf.shape}")
    d = xf - yf
    return (d * d).mean(axis=1)


def recon_error_t(x_t: Tensor, y_t: Tensor) -> Tensor:
    """Differentiable per-example mean squared reconstruction error."""
    return square(x_t - y_t).mean(axis=1)


def kl_terms(mu: np.ndarray, logvar: np.ndarray) -> np.ndarray:
    """Elementwise sigma^2 + mu^2 - 1 - log sigma^2 (each term >= 0)."""
    return np.exp(logvar) + mu * mu - 1.0 - logvar


def elbo_loss_t(vae: VaeParams, flat: np.ndarray, noise: np.ndarray, wt: dict) -> Tensor:
    x_t = Tensor(flat)
    mu, logvar = encode_t(vae, x_t, wt)
    z = mu + exp(logvar * 0.5) * Tensor(noise)
    dec_logits = decode_logits_t(vae, z, wt)
    bce = bce_with_logits(dec_logits, flat).sum(axis=1)
    kl = (exp(logvar) + square(mu) - 1.0 - logvar).sum(axis=1) * 0.5
    return (bce + kl).mean()


def train_vae(data: Dataset, z_dim: int = 20, epochs: int = 30, rng: Rng = None,
              lr: float = 1e-3, batch_size: int = 128, hidden: int = 400):
    """ELBO training on clean images only; returns (params, loss history)."""
    if z_dim < 1:
        raise ValueError(f"z_dim must be >= 1, got {z_dim}")
    rng = rng or Rng(0)
    in_dim = int(np.prod(data.images.shape[1:]))
    vae = VaeParams(
        weights=init_vae_weights(in_dim, hidden, z_dim, rng.substream(0)),
        z_dim=z_dim,
        hidden=hidden,
        in_dim=in_dim,
        meta={"seed": rng.seed, "epochs": epochs},
    )
    opt = Adam(vae.weights, alpha=lr)
    history = []
    for epoch in range(epochs):
        epoch_rng = rng.substream(epoch + 1)
        losses = []
        for b, (imgs, _) in enumerate(batches(data, batch_size, epoch_rng.substream(0))):
            flat = flatten_images(imgs)
            noise = epoch_rng.substream(b + 1).gaussian((len(flat), z_dim))
            wt = _wrap(vae.weights)
            loss = elbo_loss_t(vae, flat, noise, wt)
            loss.backward()
            opt.step(collect_grads(wt))
            losses.append(float(loss.data))
        history.append(float(np.mean(losses)))
    return vae, history
