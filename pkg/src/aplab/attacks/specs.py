"""Attack configuration and result containers."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

METHODS = ("random", "fgsm", "rfgsm", "pgd", "cw", "deepfool",
           "detector_blend", "counter_a", "counter_b")


@dataclass
class AttackSpec:
    method: str = "fgsm"
    eps: float = 0.1
    norm: object = "inf"  # 2 or "inf"
    alpha: float = 0.01
    n_iter: int = None  # None lets iterative methods derive it
    random_start: bool = False
    # Carlini-Wagner
    cw_c_range: tuple = (1e-3, 1e2)
    cw_steps: int = 5
    cw_inner_iter: int = 100
    cw_lr: float = 5e-3
    kappa: float = 0.0
    # DeepFool
    max_iter: int = 50
    overshoot: float = 0.02
    # adaptive attacks
    beta: float = 1.0
    blend_range: tuple = (0.0, 1.0)
    equation_literal: bool = False

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown attack method {self.method!r}")
        if self.eps < 0:
            raise ValueError("eps must be nonnegative")
        if self.alpha <= 0:
            raise ValueError("alpha must be positive")
        if self.n_iter is not None and self.n_iter < 1:
            raise ValueError("n_iter must be >= 1")
        if self.norm not in (2, "inf", np.inf, float("inf")):
            raise ValueError(f"norm must be 2 or inf, got {self.norm!r}")
        if self.beta < 0:
            raise ValueError("beta must be nonnegative")

    @property
    def linf(self) -> bool:
        return self.norm in ("inf", np.inf, float("inf"))

    def iterations(self) -> int:
        """Explicit count, else the floor(2*eps/alpha + 2) rule."""
        if self.n_iter is not None:
            return self.n_iter
        return int(np.floor(2.0 * self.eps / self.alpha + 2.0))


@dataclass
class AttackResult:
    x_adv: np.ndarray
    success: np.ndarray          # prediction differs from the true label
    norms: dict                  # per-example l0/l2/linf of the perturbation
    iterations: int
    flagged: np.ndarray = field(default=None)  # rows where the method degenerated

    @property
    def success_rate(self) -> float:
        return float(self.success.mean())


def perturbation_norms(x, x_adv) -> dict:
    delta = (np.asarray(x_adv, dtype=np.float64) - np.asarray(x, dtype=np.float64)).reshape(len(x), -1)
    return {
        "l0": (delta != 0.0).sum(axis=1).astype(np.float64),
        "l2": np.sqrt((delta * delta).sum(axis=1)),
        "linf": np.abs(delta).max(axis=1),
    }
