"""Image transforms: the two feature squeezers plus resize/rotate.

All outputs stay in [0, 1]; transforms clamp after interpolation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view


@dataclass(frozen=True)
class SqueezerSpec:
    kind: str  # "bit_depth" | "median_filter"
    param: int  # bits (1..8) or odd window size (>= 3)

    def __post_init__(self):
        if self.kind == "bit_depth":
            if not 1 <= self.param <= 8:
                raise ValueError(f"bit depth must be in [1, 8], got {self.param}")
        elif self.kind == "median_filter":
            if self.param < 3 or self.param % 2 == 0:
                raise ValueError(f"median window must be odd and >= 3, got {self.param}")
        else:
            raise ValueError(f"unknown squeezer kind {self.kind!r}")

    def apply(self, x: np.ndarray) -> np.ndarray:
        if self.kind == "bit_depth":
            return bit_depth_reduce(x, self.param)
        return median_filter(x, self.param)


def bit_depth_reduce(x, bits: int) -> np.ndarray:
    """Quantize to an i-bit grid: round(x * (2^i - 1)) / (2^i - 1); idempotent."""
    if not 1 <= bits <= 8:
        raise ValueError(f"bit depth must be in [1, 8], got {bits}")
    x = np.asarray(x, dtype=np.float64)
    levels = float(2 ** bits - 1)
    return np.rint(x * levels) / levels


def median_filter(x, window: int) -> np.ndarray:
    """Window median per pixel with reflect padding (edge sample not repeated)."""
    if window % 2 == 0:
        raise ValueError(f"median window must be odd, got {window}")
    x = np.asarray(x, dtype=np.float64)
    single = x.ndim == 2
    imgs = x[None] if single else x
    pad = window // 2
    padded = np.pad(imgs, ((0, 0), (pad, pad), (pad, pad)), mode="reflect")
    windows = sliding_window_view(padded, (window, window), axis=(1, 2))
    out = np.median(windows, axis=(-2, -1))
    return out[0] if single else out


def resize_rotate(x, factor: float, theta: float, fill: float = 0.0) -> np.ndarray:
    """Scale by `factor` and rotate by `theta` (radians) about the image
    center with bilinear sampling; output keeps the original side, samples
    falling outside the source use `fill`.
    """
    if factor <= 0:
        raise ValueError(f"resize factor must be positive, got {factor}")
    x = np.asarray(x, dtype=np.float64)
    single = x.ndim == 2
    imgs = x[None] if single else x
    n, h, w = imgs.shape
    ci, cj = (h - 1) / 2.0, (w - 1) / 2.0

    ii, jj = np.meshgrid(np.arange(h, dtype=np.float64), np.arange(w, dtype=np.float64), indexing="ij")
    di, dj = ii - ci, jj - cj
    # inverse map: rotate output coords by -theta, then unscale
    cos_t, sin_t = np.cos(theta), np.sin(theta)
    src_i = (cos_t * di + sin_t * dj) / factor + ci
    src_j = (-sin_t * di + cos_t * dj) / factor + cj

    i0 = np.floor(src_i).astype(np.int64)
    j0 = np.floor(src_j).astype(np.int64)
    fi, fj = src_i - i0, src_j - j0

    corners = ((i0, j0, (1 - fi) * (1 - fj)), (i0, j0 + 1, (1 - fi) * fj),
               (i0 + 1, j0, fi * (1 - fj)), (i0 + 1, j0 + 1, fi * fj))
    acc = np.zeros((n, h, w))
    weight_in = np.zeros((h, w))
    for pi, pj, wgt in corners:
        valid = (pi >= 0) & (pi < h) & (pj >= 0) & (pj < w)
        pi_c, pj_c = np.clip(pi, 0, h - 1), np.clip(pj, 0, w - 1)
        contrib = imgs[:, pi_c, pj_c] * wgt
        acc += np.where(valid, contrib, 0.0)
        weight_in += np.where(valid, wgt, 0.0)
    out = acc + fill * (1.0 - weight_in)
    out = np.clip(out, 0.0, 1.0)
    return out[0] if single else out
