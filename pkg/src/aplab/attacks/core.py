"""Shared attack machinery: input-gradient builders and the clipped
sign-ascent driver every iterative white-box method reuses.
"""

from __future__ import annotations

import numpy as np

from ..models import (
    ClassifierParams,
    flatten_images,
    logits_t,
    predict,
    training_targets,
)
from ..numerics import Tensor, log_softmax, project_norm_ball_rows
from .specs import AttackResult, perturbation_norms


def classifier_loss_t(clf: ClassifierParams, x_t: Tensor, y) -> Tensor:
    """Summed per-example training loss (white-box: the model's own loss)."""
    targets = training_targets(y, clf.class_count, clf.loss_kind, clf.smoothing)
    z = logits_t(clf, x_t)
    return (-(log_softmax(z, axis=-1) * Tensor(targets)).sum(axis=1)).sum()


def input_grad(build_loss, flat: np.ndarray) -> np.ndarray:
    """Gradient of a scalar loss builder w.r.t. the flat input batch."""
    x_t = Tensor(flat)
    build_loss(x_t).backward()
    return x_t.grad if x_t.grad is not None else np.zeros_like(flat)


def classifier_input_grad(clf: ClassifierParams, flat: np.ndarray, y) -> np.ndarray:
    return input_grad(lambda x_t: classifier_loss_t(clf, x_t, y), flat)


def sign_ascent(x0: np.ndarray, grad_fn, eps: float, alpha: float, n: int,
                linf: bool = True) -> np.ndarray:
    """n clipped ascent steps: step, ball projection, box clip.

    grad_fn(x, i) returns the loss gradient at iterate x on step i.
    """
    norm = "inf" if linf else 2
    x = x0.copy()
    for i in range(n):
        g = grad_fn(x, i)
        if linf:
            step = alpha * np.sign(g)
        else:
            norms = np.sqrt((g * g).sum(axis=1, keepdims=True))
            step = alpha * np.divide(g, norms, out=np.zeros_like(g), where=norms > 0)
        x = x + step
        x = project_norm_ball_rows(x, x0, eps, norm)
        x = np.clip(x, 0.0, 1.0)
    return x


def finalize(clf: ClassifierParams, x, x_adv_flat: np.ndarray, y,
             iterations: int, flagged=None) -> AttackResult:
    """Package an attack output with success flags and perturbation norms."""
    x = np.asarray(x, dtype=np.float64)
    x_adv = x_adv_flat.reshape(x.shape)
    success = predict(clf, x_adv) != np.asarray(y)
    return AttackResult(
        x_adv=x_adv,
        success=success,
        norms=perturbation_norms(x, x_adv),
        iterations=iterations,
        flagged=flagged,
    )
