"""Iterative input-space purification against the autoencoder's
reconstruction error: the update-rule family A-H.

A  fixed step on the raw reconstruction error
B  A with an exponential-moving-average (momentum) step
C  B with the step size scaled by 1 - exp(-((r - mu)/sigma)^2)
D  loss |r - mu| / sigma (pull the error toward the clean mean)
E  loss max(r - mu, 0) / sigma (dead zone: cleans are left alone)
F  E with the update direction evaluated at a noise-jittered point
G  E with the update direction evaluated at a resized/rotated point
H  F and G composed

For F/G/H only the gradient-evaluation point is perturbed; the stored
iterate is updated in place, so gamma=0 and identity transform ranges
reproduce E bit-for-bit.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..data import resize_rotate
from ..models import VaeParams, flatten_images, reconstruct, reconstruct_t, recon_error
from ..numerics import Rng, Tensor, absolute, relu, square
from .calibrate import CalibrationStats

VARIANTS = ("A", "B", "C", "D", "E", "F", "G", "H", "mnist")


@dataclass
class PurifySpec:
    variant: str = "E"
    n_iter: int = 15
    alpha: float = 0.05
    beta: float = 0.9
    gamma: float = 0.01
    c: float = 0.1  # weight of the |delta|^2 penalty in the mnist objective
    factor_range: tuple = (0.9, 1.1)
    theta_range: tuple = (-np.pi / 18.0, np.pi / 18.0)  # +-10 degrees
    stats: CalibrationStats = None
    adam_lr: float = 0.05  # mnist-objective optimizer step

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown purify variant {self.variant!r}")
        if self.n_iter < 1:
            raise ValueError("n_iter must be >= 1")
        if self.alpha <= 0:
            raise ValueError("alpha must be positive")
        if not 0.0 <= self.beta < 1.0:
            raise ValueError("beta must be in [0, 1)")
        if self.gamma < 0:
            raise ValueError("gamma must be nonnegative")
        if self.variant in ("C", "D", "E", "F", "G", "H") and self.stats is None:
            raise ValueError(f"variant {self.variant} requires calibration stats")


def purify_direct(x, vae: VaeParams) -> np.ndarray:
    """Baseline: feed the mean-latent reconstruction straight to the classifier."""
    return reconstruct(vae, x)


def _loss_grad_and_error(vae: VaeParams, eval_flat: np.ndarray, spec: PurifySpec):
    """Per-example loss gradient at eval_flat, plus the evaluation point's
    reconstruction error (used by variant C's step scaling).
    """
    x_t = Tensor(eval_flat)
    recon = reconstruct_t(vae, x_t)
    r_t = square(x_t - recon).mean(axis=1)
    if spec.variant in ("A", "B", "C"):
        loss_vec = r_t
    elif spec.variant == "D":
        loss_vec = absolute(r_t - spec.stats.mu) * (1.0 / spec.stats.sigma)
    else:  # E, F, G, H share the hinge loss
        loss_vec = relu(r_t - spec.stats.mu) * (1.0 / spec.stats.sigma)
    loss_vec.sum().backward()
    grad = x_t.grad if x_t.grad is not None else np.zeros_like(eval_flat)
    return grad, r_t.data


def purify(x, vae: VaeParams, spec: PurifySpec, rng: Rng = None) -> np.ndarray:
    """Run the requested variant for n_iter steps; every iterate is box-clipped."""
    if spec.variant == "mnist":
        from .objective import purify_mnist
        return purify_mnist(x, vae, spec, rng)
    arr = np.asarray(x, dtype=np.float64)
    flat = flatten_images(arr)
    side_shape = arr.shape
    n, dim = flat.shape
    needs_rng = spec.variant in ("F", "G", "H")
    if needs_rng and rng is None:
        raise ValueError(f"variant {spec.variant} needs an rng")

    velocity = np.zeros_like(flat)
    cur = flat.copy()
    for i in range(spec.n_iter):
        eval_point = cur
        if spec.variant in ("F", "H"):
            noise = _stacked_draws(rng, n, i, 0, lambda r: r.gaussian(dim))
            eval_point = eval_point + spec.gamma * noise
        if spec.variant in ("G", "H"):
            imgs = eval_point.reshape(side_shape)
            transformed = np.empty_like(imgs)
            for j in range(n):
                sub = rng.substream(j).substream(i).substream(1)
                f = float(sub.uniform(*spec.factor_range))
                theta = float(sub.uniform(*spec.theta_range))
                transformed[j] = resize_rotate(imgs[j], f, theta)
            eval_point = flatten_images(transformed)
        grad, errors = _loss_grad_and_error(vae, eval_point, spec)
        if spec.variant == "A":
            step = spec.alpha * grad
        else:
            velocity = spec.beta * velocity + (1.0 - spec.beta) * grad
            if spec.variant == "C":
                z = (errors - spec.stats.mu) / spec.stats.sigma
                step_scale = spec.alpha * (1.0 - np.exp(-z * z))
                step = step_scale[:, None] * velocity
            else:
                step = spec.alpha * velocity
        cur = np.clip(cur - step, 0.0, 1.0)
    return cur.reshape(side_shape)


def _stacked_draws(rng: Rng, n: int, step: int, slot: int, draw) -> np.ndarray:
    """Per-image substreams so outputs don't depend on scheduling."""
    return np.stack([draw(rng.substream(j).substream(step).substream(slot)) for j in range(n)])
