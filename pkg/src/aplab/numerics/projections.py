"""Box and norm-ball projections used by every attack and purifier loop."""

from __future__ import annotations

import numpy as np


def project_box(x, lo: float, hi: float) -> np.ndarray:
    """Elementwise clamp to [lo, hi]; idempotent."""
    if not lo < hi:
        raise ValueError(f"need lo < hi, got [{lo}, {hi}]")
    x = np.asarray(x, dtype=np.float64)
    if not np.isfinite(x).all():
        raise ValueError("project_box: non-finite input")
    return np.clip(x, lo, hi)


def project_norm_ball(x, center, eps: float, k) -> np.ndarray:
    """Project x onto the eps-ball around center under the L-k norm (k in {2, inf}).

    k=inf clamps each coordinate into [center-eps, center+eps]; k=2 rescales
    the offset radially when its norm exceeds eps.
    """
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    x = np.asarray(x, dtype=np.float64)
    center = np.asarray(center, dtype=np.float64)
    if x.shape != center.shape:
        raise ValueError(f"shape mismatch: {x.shape} vs {center.shape}")
    if k in ("inf", np.inf, float("inf")):
        return np.clip(x, center - eps, center + eps)
    if k == 2:
        delta = x - center
        norm = float(np.sqrt(np.sum(delta * delta)))
        # relative slack keeps the projection idempotent despite rounding
        if norm <= eps * (1.0 + 1e-12):
            return x.copy()
        return center + delta * (eps / norm)
    raise ValueError(f"unsupported norm order {k!r} (use 2 or inf)")


def project_norm_ball_rows(x, center, eps: float, k) -> np.ndarray:
    """Per-row ball projection for batched flat data (each row its own ball)."""
    x = np.asarray(x, dtype=np.float64)
    center = np.asarray(center, dtype=np.float64)
    if k in ("inf", np.inf, float("inf")):
        return np.clip(x, center - eps, center + eps)
    if k == 2:
        delta = x - center
        norms = np.sqrt(np.sum(delta * delta, axis=1, keepdims=True))
        scale = np.divide(eps, norms, out=np.ones_like(norms), where=norms > 0)
        # rows already inside the ball are returned untouched (bit-exact)
        return np.where(norms > eps * (1.0 + 1e-12), center + delta * scale, x)
    raise ValueError(f"unsupported norm order {k!r} (use 2 or inf)")
