"""Defense-aware attacks: the detector-blended iteration and the two
purifier counter-attacks (differentiate through the autoencoder; jointly
target classifier loss and reconstruction error).
"""

from __future__ import annotations

import numpy as np

from ..models import (
    ClassifierParams,
    VaeParams,
    flatten_images,
    logits_t,
    reconstruct_t,
    training_targets,
)
from ..numerics import Rng, Tensor, log_softmax, square
from .core import classifier_input_grad, classifier_loss_t, finalize, input_grad, sign_ascent
from .specs import AttackResult, AttackSpec


def detector_blend_attack(x, y, clf: ClassifierParams, detector, spec: AttackSpec,
                          rng: Rng) -> AttackResult:
    """Per step, blend the classifier-loss sign with the sign that drives the
    detector toward 'clean', with a weight drawn uniformly each iteration.

    `detector` must expose input_grad_toward_clean(flat) -> gradient whose
    ascent direction lowers the detector's adversarial probability.
    """
    flat = flatten_images(x)
    lo, hi = spec.blend_range
    n = spec.iterations()

    def grad_fn(cur, i):
        w = float(rng.uniform(lo, hi))
        g_cls = np.sign(classifier_input_grad(clf, cur, y))
        g_det = np.sign(detector.input_grad_toward_clean(cur))
        return (1.0 - w) * g_cls + w * g_det

    # signs are pre-applied, so drive with alpha * sign(blend) disabled:
    # reuse the ascent loop but feed the blended direction straight through.
    adv = _blended_ascent(flat, grad_fn, spec)
    return finalize(clf, x, adv, y, iterations=n)


def _blended_ascent(x0, direction_fn, spec: AttackSpec) -> np.ndarray:
    from ..numerics import project_norm_ball_rows

    x = x0.copy()
    for i in range(spec.iterations()):
        d = direction_fn(x, i)
        x = x + spec.alpha * d
        x = project_norm_ball_rows(x, x0, spec.eps, "inf" if spec.linf else 2)
        x = np.clip(x, 0.0, 1.0)
    return x


def counter_attack_a(x, y, clf: ClassifierParams, vae: VaeParams,
                     spec: AttackSpec) -> AttackResult:
    """Sign ascent on the end-to-end loss of classifier(reconstruct(x)):
    the purification step is approximated by the differentiable autoencoder.

    equation_literal drops the purifier term and degenerates to plain BIM.
    """
    flat = flatten_images(x)
    n = spec.iterations()

    if spec.equation_literal:
        grad_fn = lambda cur, i: classifier_input_grad(clf, cur, y)
    else:
        targets = training_targets(y, clf.class_count, clf.loss_kind, clf.smoothing)

        def end_to_end_loss(x_t):
            recon = reconstruct_t(vae, x_t)
            z = logits_t(clf, recon)
            return (-(log_softmax(z, axis=-1) * Tensor(targets)).sum(axis=1)).sum()

        grad_fn = lambda cur, i: input_grad(end_to_end_loss, cur)

    adv = sign_ascent(flat, grad_fn, spec.eps, spec.alpha, n, linf=spec.linf)
    return finalize(clf, x, adv, y, iterations=n)


def counter_attack_b(x, y, clf: ClassifierParams, vae: VaeParams,
                     spec: AttackSpec) -> AttackResult:
    """BIM on a joint objective: raise the classifier loss while LOWERING the
    purifier's reconstruction error (weight beta), so the sample keeps a
    clean-looking reconstruction error profile.
    """
    flat = flatten_images(x)
    n = spec.iterations()
    beta = spec.beta

    if beta == 0.0:
        grad_fn = lambda cur, i: classifier_input_grad(clf, cur, y)
    else:
        def joint_loss(x_t):
            cls_loss = classifier_loss_t(clf, x_t, y)
            recon = reconstruct_t(vae, x_t)
            recon_err = square(x_t - recon).mean(axis=1).sum()
            return cls_loss - beta * recon_err

        grad_fn = lambda cur, i: input_grad(joint_loss, cur)

    adv = sign_ascent(flat, grad_fn, spec.eps, spec.alpha, n, linf=spec.linf)
    return finalize(clf, x, adv, y, iterations=n)
