"""Named-computation facade over the tensor engine.

A Graph wraps a python function from named input tensors to named output
tensors. `evaluate` runs it as a pure function; `gradient` adds a reverse
pass from a scalar output back to a chosen set of inputs.
"""

from __future__ import annotations

import numpy as np

from .tensor import ShapeMismatch, Tensor


class GraphError(ValueError):
    pass


class Graph:
    def __init__(self, fn, inputs, outputs):
        """fn maps dict[name, Tensor] -> dict[name, Tensor]."""
        self.fn = fn
        self.inputs = tuple(inputs)
        self.outputs = tuple(outputs)

    def _bind(self, feeds):
        missing = [name for name in self.inputs if name not in feeds]
        if missing:
            raise GraphError(f"unbound graph inputs: {missing}")
        unknown = [name for name in feeds if name not in self.inputs]
        if unknown:
            raise GraphError(f"unknown graph inputs: {unknown}")
        return {name: Tensor(feeds[name]) for name in self.inputs}

    def _run(self, feeds):
        bound = self._bind(feeds)
        produced = self.fn(bound)
        for name in self.outputs:
            if name not in produced:
                raise GraphError(f"graph did not produce output '{name}'")
        return bound, produced


def evaluate(graph: Graph, inputs) -> dict[str, np.ndarray]:
    """All named outputs as arrays; pure in the inputs."""
    _, produced = graph._run(inputs)
    return {name: produced[name].data.copy() for name in graph.outputs}


def gradient(graph: Graph, inputs, loss: str, wrt) -> dict[str, np.ndarray]:
    """Reverse-mode gradients of scalar output `loss` w.r.t. input names `wrt`."""
    wrt = tuple(wrt)
    for name in wrt:
        if name not in graph.inputs:
            raise GraphError(f"'{name}' is not a graph input")
    if loss not in graph.outputs:
        raise GraphError(f"'{loss}' is not a graph output")
    bound, produced = graph._run(inputs)
    loss_t = produced[loss]
    if loss_t.data.size != 1:
        raise ShapeMismatch("gradient", f"loss '{loss}' is not scalar: {loss_t.data.shape}")
    loss_t.backward()
    grads = {}
    for name in wrt:
        g = bound[name].grad
        grads[name] = np.zeros_like(bound[name].data) if g is None else g.copy()
    return grads
