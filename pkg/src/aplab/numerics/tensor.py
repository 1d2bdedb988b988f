"""Dense float64 tensors with reverse-mode differentiation.

The op set is fixed to what MLP classifiers, the autoencoder purifier and
their losses need: matmul, add, multiply, relu, sigmoid, tanh, exp, log,
square, sum, mean, softmax, concat, slicing and dropout-mask application.
Every op validates its output for non-finite values and raises a located
error instead of letting NaN/Inf propagate through an optimization loop.
"""

from __future__ import annotations

import numpy as np


class NonFiniteError(ArithmeticError):
    """A tensor op produced NaN or Inf."""

    def __init__(self, op: str):
        super().__init__(f"non-finite values produced by op '{op}'")
        self.op = op


class ShapeMismatch(ValueError):
    def __init__(self, op: str, detail: str):
        super().__init__(f"shape mismatch in op '{op}': {detail}")
        self.op = op


def _as_array(value) -> np.ndarray:
    return np.asarray(value, dtype=np.float64)


class Tensor:
    """Node in a dynamically built computation graph.

    `data` is an immutable-by-convention float64 ndarray; `grad` is filled
    by `backward()`. Leaf tensors have no parents.
    """

    __slots__ = ("data", "grad", "_parents", "_backward", "op")

    def __init__(self, data, _parents=(), _backward=None, op="leaf"):
        arr = _as_array(data)
        if not np.isfinite(arr).all():
            raise NonFiniteError(op)
        self.data = arr
        self.grad = None
        self._parents = _parents
        self._backward = _backward
        self.op = op

    @property
    def shape(self):
        return self.data.shape

    def __repr__(self):
        return f"Tensor(op={self.op!r}, shape={self.data.shape})"

    def detach(self) -> "Tensor":
        """New leaf sharing this tensor's values; gradients stop here."""
        return Tensor(self.data, op="leaf")

    # -- graph traversal ---------------------------------------------------

    def toposort(self):
        """All reachable nodes, parents before children."""
        order, seen = [], set()
        stack = [(self, False)]
        while stack:
            node, expanded = stack.pop()
            if expanded:
                order.append(node)
                continue
            if id(node) in seen:
                continue
            seen.add(id(node))
            stack.append((node, True))
            for parent in node._parents:
                stack.append((parent, False))
        return order

    def backward(self):
        """Reverse-mode pass from a scalar node; accumulates into `.grad`."""
        if self.data.size != 1:
            raise ShapeMismatch("backward", f"loss must be scalar, got {self.data.shape}")
        order = self.toposort()
        for node in order:
            node.grad = None
        self.grad = np.ones_like(self.data)
        for node in reversed(order):
            if node._backward is not None and node.grad is not None:
                node._backward(node.grad)

    def _accumulate(self, grad: np.ndarray):
        if self.grad is None:
            self.grad = grad.copy()
        else:
            self.grad += grad

    # -- operators ----------------------------------------------------------

    def __add__(self, other):
        return add(self, other)

    def __radd__(self, other):
        return add(_lift(other), self)

    def __mul__(self, other):
        return multiply(self, other)

    def __rmul__(self, other):
        return multiply(_lift(other), self)

    def __neg__(self):
        return multiply(self, -1.0)

    def __sub__(self, other):
        return add(self, -_lift(other))

    def __rsub__(self, other):
        return add(_lift(other), -self)

    def __matmul__(self, other):
        return matmul(self, other)

    def __getitem__(self, key):
        return narrow(self, key)

    def relu(self):
        return relu(self)

    def sigmoid(self):
        return sigmoid(self)

    def tanh(self):
        return tanh(self)

    def exp(self):
        return exp(self)

    def log(self):
        return log(self)

    def square(self):
        return square(self)

    def sum(self, axis=None, keepdims=False):
        return tsum(self, axis=axis, keepdims=keepdims)

    def mean(self, axis=None, keepdims=False):
        return tmean(self, axis=axis, keepdims=keepdims)

    def softmax(self, axis=-1):
        return softmax(self, axis=axis)


def _lift(value) -> Tensor:
    return value if isinstance(value, Tensor) else Tensor(value)


def _unbroadcast(grad: np.ndarray, shape) -> np.ndarray:
    """Sum `grad` down to `shape`, undoing numpy broadcasting."""
    extra = grad.ndim - len(shape)
    if extra > 0:
        grad = grad.sum(axis=tuple(range(extra)))
    axes = tuple(i for i, n in enumerate(shape) if n == 1 and grad.shape[i] != 1)
    if axes:
        grad = grad.sum(axis=axes, keepdims=True)
    return grad.reshape(shape)


# -- primitives --------------------------------------------------------------


def add(a, b) -> Tensor:
    a, b = _lift(a), _lift(b)
    out = Tensor(a.data + b.data, (a, b), op="add")

    def backward(g):
        a._accumulate(_unbroadcast(g, a.data.shape))
        b._accumulate(_unbroadcast(g, b.data.shape))

    out._backward = backward
    return out


def multiply(a, b) -> Tensor:
    a, b = _lift(a), _lift(b)
    out = Tensor(a.data * b.data, (a, b), op="multiply")

    def backward(g):
        a._accumulate(_unbroadcast(g * b.data, a.data.shape))
        b._accumulate(_unbroadcast(g * a.data, b.data.shape))

    out._backward = backward
    return out


def matmul(a, b) -> Tensor:
    a, b = _lift(a), _lift(b)
    if a.data.ndim != 2 or b.data.ndim != 2:
        raise ShapeMismatch("matmul", f"need 2-D operands, got {a.shape} @ {b.shape}")
    if a.data.shape[1] != b.data.shape[0]:
        raise ShapeMismatch("matmul", f"{a.shape} @ {b.shape}")
    out = Tensor(a.data @ b.data, (a, b), op="matmul")

    def backward(g):
        a._accumulate(g @ b.data.T)
        b._accumulate(a.data.T @ g)

    out._backward = backward
    return out


def relu(a) -> Tensor:
    a = _lift(a)
    out = Tensor(np.maximum(a.data, 0.0), (a,), op="relu")

    def backward(g):
        a._accumulate(g * (a.data > 0.0))

    out._backward = backward
    return out


def sigmoid(a) -> Tensor:
    a = _lift(a)
    # piecewise form avoids overflow in exp for large |x|
    x = a.data
    val = np.where(x >= 0, 1.0 / (1.0 + np.exp(-np.abs(x))), np.exp(-np.abs(x)) / (1.0 + np.exp(-np.abs(x))))
    out = Tensor(val, (a,), op="sigmoid")

    def backward(g):
        a._accumulate(g * val * (1.0 - val))

    out._backward = backward
    return out


def tanh(a) -> Tensor:
    a = _lift(a)
    val = np.tanh(a.data)
    out = Tensor(val, (a,), op="tanh")

    def backward(g):
        a._accumulate(g * (1.0 - val * val))

    out._backward = backward
    return out


def exp(a) -> Tensor:
    a = _lift(a)
    out = Tensor(np.exp(a.data), (a,), op="exp")

    def backward(g):
        a._accumulate(g * out.data)

    out._backward = backward
    return out


def log(a) -> Tensor:
    a = _lift(a)
    with np.errstate(divide="raise", invalid="raise"):
        try:
            val = np.log(a.data)
        except FloatingPointError:
            raise NonFiniteError("log") from None
    out = Tensor(val, (a,), op="log")

    def backward(g):
        a._accumulate(g / a.data)

    out._backward = backward
    return out


def square(a) -> Tensor:
    a = _lift(a)
    out = Tensor(a.data * a.data, (a,), op="square")

    def backward(g):
        a._accumulate(g * 2.0 * a.data)

    out._backward = backward
    return out


def _reduce_count(shape, axis):
    if axis is None:
        return int(np.prod(shape)) if shape else 1
    axes = axis if isinstance(axis, tuple) else (axis,)
    count = 1
    for ax in axes:
        count *= shape[ax]
    return count


def tsum(a, axis=None, keepdims=False) -> Tensor:
    a = _lift(a)
    out = Tensor(a.data.sum(axis=axis, keepdims=keepdims), (a,), op="sum")

    def backward(g):
        if axis is None or keepdims:
            expand = g
        else:
            expand = np.expand_dims(g, axis)
        a._accumulate(np.broadcast_to(expand, a.data.shape).copy())

    out._backward = backward
    return out


def tmean(a, axis=None, keepdims=False) -> Tensor:
    a = _lift(a)
    out = Tensor(a.data.mean(axis=axis, keepdims=keepdims), (a,), op="mean")
    count = _reduce_count(a.data.shape, axis)

    def backward(g):
        scaled = g / count
        if axis is None or keepdims:
            expand = scaled
        else:
            expand = np.expand_dims(scaled, axis)
        a._accumulate(np.broadcast_to(expand, a.data.shape).copy())

    out._backward = backward
    return out


def softmax(a, axis=-1) -> Tensor:
    a = _lift(a)
    shifted = a.data - a.data.max(axis=axis, keepdims=True)
    e = np.exp(shifted)
    val = e / e.sum(axis=axis, keepdims=True)
    out = Tensor(val, (a,), op="softmax")

    def backward(g):
        inner = (g * val).sum(axis=axis, keepdims=True)
        a._accumulate(val * (g - inner))

    out._backward = backward
    return out


def concat(tensors, axis=0) -> Tensor:
    tensors = [_lift(t) for t in tensors]
    if not tensors:
        raise ShapeMismatch("concat", "need at least one tensor")
    out = Tensor(np.concatenate([t.data for t in tensors], axis=axis), tuple(tensors), op="concat")
    sizes = [t.data.shape[axis] for t in tensors]
    offsets = np.cumsum(sizes)[:-1]

    def backward(g):
        for t, piece in zip(tensors, np.split(g, offsets, axis=axis)):
            t._accumulate(piece)

    out._backward = backward
    return out


def narrow(a, key) -> Tensor:
    """Basic slicing; gradient scatters back into the source shape."""
    a = _lift(a)
    out = Tensor(a.data[key], (a,), op="slice")

    def backward(g):
        full = np.zeros_like(a.data)
        full[key] += g
        a._accumulate(full)

    out._backward = backward
    return out


def dropout_apply(a, mask) -> Tensor:
    """Multiply by a fixed 0/scale mask (mask generation lives with the Rng)."""
    a = _lift(a)
    mask = _as_array(mask)
    if mask.shape != a.data.shape:
        raise ShapeMismatch("dropout_apply", f"mask {mask.shape} vs input {a.data.shape}")
    out = Tensor(a.data * mask, (a,), op="dropout_apply")

    def backward(g):
        a._accumulate(g * mask)

    out._backward = backward
    return out


# -- composites (built from the primitives above) -----------------------------


def log_softmax(a, axis=-1) -> Tensor:
    """log(softmax(a)) via the shifted logsumexp identity; gradient-exact."""
    a = _lift(a)
    shift = Tensor(a.data.max(axis=axis, keepdims=True))  # detached constant
    centered = a - shift
    lse = log(tsum(exp(centered), axis=axis, keepdims=True))
    return centered - lse


def absolute(a) -> Tensor:
    a = _lift(a)
    return relu(a) + relu(-a)


def bce_with_logits(logits, targets) -> Tensor:
    """Elementwise binary cross-entropy, stable in the logit domain.

    max(z,0) - z*t + log(1 + exp(-|z|)); targets are constants in [0,1].
    """
    z = _lift(logits)
    t = _as_array(targets)
    return relu(z) - z * t + log(exp(-absolute(z)) + 1.0)
