"""Bias-corrected Adam and the plain exponential-moving-average update."""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np


@dataclass
class AdamState:
    m: np.ndarray
    v: np.ndarray
    t: int = 0
    alpha: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8


def init_adam(param, alpha=1e-3, beta1=0.9, beta2=0.999, eps=1e-8) -> AdamState:
    if eps <= 0:
        raise ValueError("eps must be positive")
    shape = np.shape(param)
    return AdamState(m=np.zeros(shape), v=np.zeros(shape), t=0,
                     alpha=alpha, beta1=beta1, beta2=beta2, eps=eps)


def adam_update(param, grad, state: AdamState):
    """One Adam step; returns (new_param, new_state), inputs untouched."""
    param = np.asarray(param, dtype=np.float64)
    grad = np.asarray(grad, dtype=np.float64)
    if param.shape != grad.shape or param.shape != state.m.shape:
        raise ValueError(f"adam_update shape mismatch: param {param.shape}, "
                         f"grad {grad.shape}, state {state.m.shape}")
    t = state.t + 1
    m = state.beta1 * state.m + (1.0 - state.beta1) * grad
    v = state.beta2 * state.v + (1.0 - state.beta2) * grad * grad
    m_hat = m / (1.0 - state.beta1 ** t)
    v_hat = v / (1.0 - state.beta2 ** t)
    new_param = param - state.alpha * m_hat / (np.sqrt(v_hat) + state.eps)
    return new_param, replace(state, m=m, v=v, t=t)


def ema_update(velocity, grad, beta: float) -> np.ndarray:
    """w_i = beta * w_{i-1} + (1 - beta) * grad."""
    if not 0.0 <= beta < 1.0:
        raise ValueError(f"beta must be in [0, 1), got {beta}")
    velocity = np.asarray(velocity, dtype=np.float64)
    grad = np.asarray(grad, dtype=np.float64)
    if velocity.shape != grad.shape:
        raise ValueError(f"ema_update shape mismatch: {velocity.shape} vs {grad.shape}")
    return beta * velocity + (1.0 - beta) * grad


class Adam:
    """Convenience wrapper driving adam_update over a dict of parameters."""

    def __init__(self, params: dict, alpha=1e-3, beta1=0.9, beta2=0.999, eps=1e-8):
        self.params = params
        self.states = {k: init_adam(p, alpha, beta1, beta2, eps) for k, p in params.items()}

    def step(self, grads: dict) -> None:
        for key, grad in grads.items():
            self.params[key], self.states[key] = adam_update(self.params[key], grad, self.states[key])
