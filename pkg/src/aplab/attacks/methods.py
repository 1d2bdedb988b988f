"""The attack generators: random noise, FGSM/R-FGSM, PGD/BIM, CW, DeepFool."""

from __future__ import annotations

import numpy as np

from ..models import ClassifierParams, flatten_images, logits_t, onehot, predict
from ..numerics import Rng, Tensor, init_adam, adam_update, project_norm_ball_rows, relu, tsum
from .core import classifier_input_grad, finalize, sign_ascent
from .specs import AttackResult, AttackSpec


def random_perturb(x, y, clf: ClassifierParams, spec: AttackSpec, rng: Rng) -> AttackResult:
    """Unbiased uniform noise in [-eps, eps] per pixel, box-clipped."""
    flat = flatten_images(x)
    noise = rng.uniform(-spec.eps, spec.eps, flat.shape)
    adv = np.clip(flat + noise, 0.0, 1.0)
    return finalize(clf, x, adv, y, iterations=1)


def fgsm(x, y, clf: ClassifierParams, spec: AttackSpec, rng: Rng = None) -> AttackResult:
    """One loss-gradient step: eps * sign(g) for L-inf, eps * g/|g|_2 for L2.

    random_start (R-FGSM) first jumps to a uniform point in the eps/2 ball
    and spends the remaining eps/2 on the gradient step.
    """
    flat = flatten_images(x)
    flagged = np.zeros(len(flat), dtype=bool)
    if spec.random_start:
        if rng is None:
            raise ValueError("random_start needs an rng")
        half = spec.eps / 2.0
        start = np.clip(flat + rng.uniform(-half, half, flat.shape), 0.0, 1.0)
        g = classifier_input_grad(clf, start, y)
        step_eps = half
    else:
        start = flat
        g = classifier_input_grad(clf, flat, y)
        step_eps = spec.eps
    if spec.linf:
        adv = start + step_eps * np.sign(g)
    else:
        norms = np.sqrt((g * g).sum(axis=1, keepdims=True))
        flagged = norms.ravel() == 0.0
        adv = start + step_eps * np.divide(g, norms, out=np.zeros_like(g), where=norms > 0)
    adv = project_norm_ball_rows(adv, flat, spec.eps, "inf" if spec.linf else 2)
    adv = np.clip(adv, 0.0, 1.0)
    return finalize(clf, x, adv, y, iterations=1, flagged=flagged)


def pgd(x, y, clf: ClassifierParams, spec: AttackSpec, rng: Rng = None) -> AttackResult:
    """Iterated FGSM with per-step ball projection and box clip (aka BIM)."""
    flat = flatten_images(x)
    n = spec.iterations()
    start = flat
    if spec.random_start:
        if rng is None:
            raise ValueError("random_start needs an rng")
        start = np.clip(flat + rng.uniform(-spec.eps, spec.eps, flat.shape), 0.0, 1.0)
    adv = sign_ascent(start, lambda cur, i: classifier_input_grad(clf, cur, y),
                      spec.eps, spec.alpha, n, linf=spec.linf)
    if spec.random_start:
        adv = np.clip(project_norm_ball_rows(adv, flat, spec.eps, "inf" if spec.linf else 2), 0.0, 1.0)
    return finalize(clf, x, adv, y, iterations=n)


def _cw_objective_grad(clf, flat0, delta, y, c_vec, kappa):
    """Gradient of sum_i |delta_i|^2 + c_i * max(margin_i, -kappa) wrt delta."""
    n_cls = clf.class_count
    true_hot = onehot(y, n_cls)
    d_t = Tensor(delta)
    adv_t = Tensor(flat0) + d_t
    z = logits_t(clf, adv_t)
    # detached per-step best-other selection keeps the margin differentiable
    z_val = z.data
    masked = z_val - 1e9 * true_hot
    other_hot = onehot(masked.argmax(axis=1), n_cls)
    z_true = (z * Tensor(true_hot)).sum(axis=1)
    z_other = (z * Tensor(other_hot)).sum(axis=1)
    margin = relu(z_true - z_other + kappa) - kappa
    obj = (d_t.square().sum(axis=1) + Tensor(c_vec) * margin).sum()
    obj.backward()
    return d_t.grad


def cw(x, y, clf: ClassifierParams, spec: AttackSpec, rng: Rng = None) -> AttackResult:
    """Minimum-L2 attack: Adam on |delta|^2 + c * margin, with a per-example
    binary search over c; the smallest-norm success wins. The final image is
    clipped to the eps ball and pixel box.
    """
    flat = flatten_images(x)
    n = len(flat)
    c_lo = np.full(n, spec.cw_c_range[0])
    c_hi = np.full(n, spec.cw_c_range[1])
    best_adv = flat.copy()
    best_norm = np.full(n, np.inf)
    ever_success = predict(clf, flat) != np.asarray(y)
    best_norm[ever_success] = 0.0  # already misclassified: zero perturbation wins

    ball_norm = "inf" if spec.linf else 2
    for _ in range(spec.cw_steps):
        c_vec = np.sqrt(c_lo * c_hi)
        delta = np.zeros_like(flat)
        state = init_adam(delta, alpha=spec.cw_lr)
        success_at_c = np.zeros(n, dtype=bool)
        for _ in range(spec.cw_inner_iter):
            grad = _cw_objective_grad(clf, flat, delta, y, c_vec, spec.kappa)
            delta, state = adam_update(delta, grad, state)
            candidate = np.clip(project_norm_ball_rows(flat + delta, flat, spec.eps, ball_norm), 0.0, 1.0)
            hits = predict(clf, candidate) != np.asarray(y)
            if hits.any():
                norms = np.sqrt(((candidate - flat) ** 2).sum(axis=1))
                better = hits & (norms < best_norm)
                best_adv[better] = candidate[better]
                best_norm[better] = norms[better]
                success_at_c |= hits
        ever_success |= success_at_c
        c_hi = np.where(success_at_c, c_vec, c_hi)   # success: try a smaller c
        c_lo = np.where(success_at_c, c_lo, c_vec)
    return finalize(clf, x, best_adv, y, iterations=spec.cw_steps * spec.cw_inner_iter,
                    flagged=~ever_success)


def _class_grads(clf, flat):
    """Input gradients of every class logit, stacked (C, N, D)."""
    grads = []
    for k in range(clf.class_count):
        x_t = Tensor(flat)
        z = logits_t(clf, x_t)
        tsum(z[:, k]).backward()
        grads.append(x_t.grad if x_t.grad is not None else np.zeros_like(flat))
    return np.stack(grads)


def deepfool(x, clf: ClassifierParams, spec: AttackSpec, y=None) -> AttackResult:
    """Linearized multi-class boundary walk with overshoot; stops per example
    at the first class flip. Unbudgeted; the result is box-clipped only.
    """
    flat = flatten_images(x)
    n = len(flat)
    orig_pred = predict(clf, flat)
    cur = flat.copy()
    active = np.ones(n, dtype=bool)
    iters_used = 0
    for _ in range(spec.max_iter):
        if not active.any():
            break
        iters_used += 1
        sub = cur[active]
        z = logits_t(clf, Tensor(sub)).data
        if clf.reversed_logits:
            z = -z
        preds_here = orig_pred[active]
        grads = _class_grads(clf, sub)  # (C, n_active, D)
        if clf.reversed_logits:
            grads = -grads
        idx = np.arange(len(sub))
        g_pred = grads[preds_here, idx]
        z_pred = z[idx, preds_here]
        best_ratio = np.full(len(sub), np.inf)
        best_step = np.zeros_like(sub)
        for k in range(clf.class_count):
            mask = preds_here != k
            if not mask.any():
                continue
            w = grads[k, idx] - g_pred
            f = z[idx, k] - z_pred
            w_norm = np.sqrt((w * w).sum(axis=1))
            ok = mask & (w_norm > 1e-12)
            ratio = np.where(ok, np.abs(f) / np.maximum(w_norm, 1e-12), np.inf)
            better = ratio < best_ratio
            if better.any():
                scale = (np.abs(f) + 1e-4) / np.maximum(w_norm, 1e-12) ** 2
                best_step[better] = (scale[:, None] * w)[better]
                best_ratio[better] = ratio[better]
        moved = np.isfinite(best_ratio)
        sub_new = sub + (1.0 + spec.overshoot) * best_step
        cur_active = cur[active]
        cur_active[moved] = sub_new[moved]
        cur[active] = cur_active
        # deactivate flipped examples and dead-gradient plateaus
        new_pred = predict(clf, np.clip(cur[active], 0.0, 1.0))
        still = (new_pred == preds_here) & moved
        active_idx = np.flatnonzero(active)
        active[active_idx] = still
    adv = np.clip(cur, 0.0, 1.0)
    truth = orig_pred if y is None else np.asarray(y)
    result = finalize(clf, x, adv, truth, iterations=iters_used)
    result.flagged = predict(clf, adv) == orig_pred  # rows that never flipped
    return result
