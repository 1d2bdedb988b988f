"""The square-penalty purification objective used for MNIST:

    minimize over delta:  c * |delta|^2 + |X + delta - recon(X + delta)|^2

optimized with Adam for a fixed number of iterations per image; the
purified image is the box-clipped X + delta.
"""

from __future__ import annotations

import numpy as np

from ..models import VaeParams, flatten_images, reconstruct_t
from ..numerics import Rng, Tensor, init_adam, adam_update, square


def purify_mnist(x, vae: VaeParams, spec, rng: Rng = None) -> np.ndarray:
    arr = np.asarray(x, dtype=np.float64)
    flat = flatten_images(arr)
    delta = np.zeros_like(flat)
    state = init_adam(delta, alpha=spec.adam_lr)
    for _ in range(spec.n_iter):
        d_t = Tensor(delta)
        z = Tensor(flat) + d_t
        recon = reconstruct_t(vae, z)
        loss = (spec.c * square(d_t).sum(axis=1) + square(z - recon).sum(axis=1)).sum()
        loss.backward()
        grad = d_t.grad if d_t.grad is not None else np.zeros_like(delta)
        delta, state = adam_update(delta, grad, state)
    return np.clip(flat + delta, 0.0, 1.0).reshape(arr.shape)
