"""Gradient correctness of every primitive against central finite differences."""

import numpy as np
import pytest

from aplab.numerics import (
    NonFiniteError,
    Rng,
    ShapeMismatch,
    Tensor,
    absolute,
    bce_with_logits,
    concat,
    dropout_apply,
    log_softmax,
)

RTOL = 1e-4


def finite_diff(f, x, h=1e-5):
    """Central finite differences of scalar f at x."""
    x = np.asarray(x, dtype=np.float64)
    grad = np.zeros_like(x)
    flat = x.reshape(-1)
    for i in range(flat.size):
        bump = np.zeros_like(flat)
        bump[i] = h
        grad.reshape(-1)[i] = (f((flat + bump).reshape(x.shape)) - f((flat - bump).reshape(x.shape))) / (2 * h)
    return grad


def check_grad(build, x, rtol=RTOL):
    """build: ndarray -> scalar Tensor. Compares backward grad vs finite diff."""
    t = Tensor(x)
    loss = build(t)
    loss.backward()
    numeric = finite_diff(lambda v: float(build(Tensor(v)).data), x)
    analytic = t.grad
    denom = np.maximum(np.abs(numeric), 1e-6)
    rel = np.abs(analytic - numeric) / denom
    assert rel.max() < rtol, f"max rel err {rel.max():.2e}"


def test_square_scalar_grad():
    x = Tensor(3.0)
    y = x.square()
    y.backward()
    assert x.grad == pytest.approx(6.0)


def test_product_grads():
    x, y = Tensor(2.0), Tensor(5.0)
    (x * y).backward()
    assert x.grad == pytest.approx(5.0)
    assert y.grad == pytest.approx(2.0)


def test_relu_forward():
    out = Tensor([-1.0, 2.0]).relu()
    assert out.data.tolist() == [0.0, 2.0]


def test_softmax_symmetry():
    out = Tensor([0.0, 0.0]).softmax()
    assert out.data.tolist() == [0.5, 0.5]


def test_softmax_rows_sum_to_one():
    rng = Rng(3)
    z = rng.gaussian((8, 10)) * 5
    s = Tensor(z).softmax(axis=-1)
    np.testing.assert_allclose(s.data.sum(axis=-1), 1.0, atol=1e-12)


@pytest.mark.parametrize("op", ["relu", "sigmoid", "tanh", "exp", "square"])
def test_elementwise_grads(op):
    rng = Rng(11)
    x = rng.gaussian((4, 3)) + 0.1  # keep relu off its kink
    check_grad(lambda t: getattr(t, op)().sum(), x)


def test_log_grad():
    rng = Rng(12)
    x = rng.uniform(0.2, 3.0, (4, 3))
    check_grad(lambda t: t.log().sum(), x)


def test_matmul_grads():
    rng = Rng(13)
    a, b = rng.gaussian((3, 4)), rng.gaussian((4, 2))
    check_grad(lambda t: (t @ Tensor(b)).square().sum(), a)
    check_grad(lambda t: (Tensor(a) @ t).square().sum(), b)


def test_broadcast_add_grad():
    rng = Rng(14)
    a, bias = rng.gaussian((5, 3)), rng.gaussian(3)
    check_grad(lambda t: (t + Tensor(bias)).square().sum(), a)
    check_grad(lambda t: (Tensor(a) + t).square().sum(), bias)


def test_mean_axis_grad():
    rng = Rng(15)
    x = rng.gaussian((4, 6))
    check_grad(lambda t: t.square().mean(axis=1).sum(), x)


def test_softmax_grad():
    rng = Rng(16)
    x = rng.gaussian((3, 5))
    w = Rng(17).gaussian((3, 5))
    check_grad(lambda t: (t.softmax(axis=-1) * Tensor(w)).sum(), x)


def test_log_softmax_grad_and_value():
    rng = Rng(18)
    x = rng.gaussian((3, 5)) * 10
    ls = log_softmax(Tensor(x))
    np.testing.assert_allclose(np.exp(ls.data).sum(axis=-1), 1.0, atol=1e-12)
    w = Rng(19).gaussian((3, 5))
    check_grad(lambda t: (log_softmax(t) * Tensor(w)).sum(), x)


def test_concat_grad():
    rng = Rng(20)
    a, b = rng.gaussian((2, 3)), rng.gaussian((2, 2))
    ta, tb = Tensor(a), Tensor(b)
    out = concat([ta, tb], axis=1).square().sum()
    out.backward()
    np.testing.assert_allclose(ta.grad, 2 * a)
    np.testing.assert_allclose(tb.grad, 2 * b)


def test_slice_grad_scatters():
    x = Tensor(np.arange(12, dtype=np.float64).reshape(3, 4))
    out = x[1:, :2].sum()
    out.backward()
    expected = np.zeros((3, 4))
    expected[1:, :2] = 1.0
    np.testing.assert_array_equal(x.grad, expected)


def test_dropout_apply_grad():
    rng = Rng(21)
    x = rng.gaussian((4, 4))
    mask = Rng(22).dropout_mask(0.5, (4, 4))
    t = Tensor(x)
    dropout_apply(t, mask).sum().backward()
    np.testing.assert_array_equal(t.grad, mask)


def test_absolute_and_bce():
    x = np.array([-2.0, -0.5, 0.5, 3.0])
    np.testing.assert_allclose(absolute(Tensor(x)).data, np.abs(x))
    z = np.array([-30.0, -1.0, 0.0, 1.0, 40.0])
    t = np.array([0.0, 1.0, 0.5, 0.0, 1.0])
    got = bce_with_logits(Tensor(z), t).data
    p = 1.0 / (1.0 + np.exp(-z))
    # clip only for the reference computation; the op itself must stay stable
    ref = -(t * np.log(np.clip(p, 1e-300, 1)) + (1 - t) * np.log(np.clip(1 - p, 1e-300, 1)))
    np.testing.assert_allclose(got, ref, rtol=1e-9, atol=1e-12)


def test_two_layer_mlp_hand_evaluated():
    # weights chosen so the arithmetic is checkable on paper
    x = Tensor([[1.0, 2.0]])
    w1 = Tensor([[1.0, -1.0], [0.5, 1.0]])
    b1 = Tensor([0.0, -3.0])
    w2 = Tensor([[2.0], [1.0]])
    h = ((x @ w1) + b1).relu()  # [1*1+2*0.5, 1*-1+2*1-3] = [2, -2] -> [2, 0]
    out = h @ w2  # 2*2 + 0*1 = 4
    assert out.data.tolist() == [[4.0]]


def test_purity_bit_identical():
    rng = Rng(23)
    x = rng.gaussian((6, 6))
    w = Rng(24).gaussian((6, 4))

    def run():
        t = Tensor(x)
        loss = ((t @ Tensor(w)).tanh().square()).mean()
        loss.backward()
        return loss.data.copy(), t.grad.copy()

    l1, g1 = run()
    l2, g2 = run()
    assert l1.tobytes() == l2.tobytes()
    assert g1.tobytes() == g2.tobytes()


def test_non_finite_raises_with_op_name():
    with pytest.raises(NonFiniteError) as err:
        Tensor([1.0, 0.0]).log()  # log(0) -> -inf
    assert err.value.op == "log"
    big = Tensor([800.0])
    with pytest.raises(NonFiniteError):
        big.exp()  # overflow -> inf


def test_backward_requires_scalar():
    with pytest.raises(ShapeMismatch):
        Tensor([1.0, 2.0]).backward()


def test_matmul_shape_errors():
    with pytest.raises(ShapeMismatch):
        Tensor(np.ones((2, 3))) @ Tensor(np.ones((2, 3)))
    with pytest.raises(ShapeMismatch):
        Tensor(np.ones(3)) @ Tensor(np.ones((3, 2)))


def test_toposort_parents_precede():
    x = Tensor([1.0, 2.0])
    y = (x.square() + x).sum()
    order = y.toposort()
    position = {id(node): i for i, node in enumerate(order)}
    for node in order:
        for parent in node._parents:
            assert position[id(parent)] < position[id(node)]


def test_random_graph_gradients_match_finite_differences():
    """100 random small graphs over the primitive set vs central differences."""
    rng = Rng(99)
    ops_pool = ["relu", "sigmoid", "tanh", "square"]
    for trial in range(100):
        sub = rng.substream(trial)
        n_in = 2 + trial % 3
        x = sub.gaussian((2, n_in)) * 0.8
        w1 = sub.gaussian((n_in, 4)) * 0.6
        b1 = sub.gaussian(4) * 0.3
        w2 = sub.gaussian((4, 3)) * 0.6
        op = ops_pool[trial % len(ops_pool)]

        def build(t):
            h = getattr((t @ Tensor(w1)) + Tensor(b1), op)()
            z = h @ Tensor(w2)
            return (z.softmax(axis=-1).square()).mean()

        check_grad(build, x)
