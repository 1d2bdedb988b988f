"""Clean reconstruction-error calibration (mu, sigma) for variants C-H."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..models import VaeParams, recon_error, reconstruct


class CalibrationError(ValueError):
    pass


@dataclass(frozen=True)
class CalibrationStats:
    mu: float
    sigma: float
    count: int

    def __post_init__(self):
        if self.sigma <= 0:
            raise CalibrationError(f"sigma must be positive, got {self.sigma}")


def calibrate(vae: VaeParams, clean_images) -> CalibrationStats:
    """Mean/std of per-example mean-latent reconstruction errors on cleans."""
    images = np.asarray(clean_images, dtype=np.float64)
    if len(images) < 2:
        raise CalibrationError(f"need at least 2 clean samples, got {len(images)}")
    errors = recon_error(images, reconstruct(vae, images))
    sigma = float(errors.std())
    if sigma < 1e-12:
        raise CalibrationError("degenerate calibration: reconstruction errors have ~zero spread")
    return CalibrationStats(mu=float(errors.mean()), sigma=sigma, count=len(images))
