import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from paretoflow.nn import DenseNet, OptimizerState, adam_step, backward, forward, log_softmax


def fd_grads(net, x, g_out, h=1e-5):
    """Central differences of L = sum(g_out * net(x)) for every parameter entry."""
    out = []
    for p in net.params:
        G = np.zeros_like(p)
        it = np.nditer(p, flags=["multi_index"])
        for _ in it:
            i = it.multi_index
            old = p[i]
            p[i] = old + h
            up = float(np.sum(g_out * forward(net, x)[0]))
            p[i] = old - h
            down = float(np.sum(g_out * forward(net, x)[0]))
            p[i] = old
            G[i] = (up - down) / (2 * h)
        out.append(G)
    return out


def rel_err(a, b):
    return np.max(np.abs(a - b) / np.maximum(1e-6, np.abs(a) + np.abs(b)))


def test_forward_examples():
    net = DenseNet([np.zeros((3, 4)), np.zeros((4, 2))], [np.zeros(4), np.zeros(2)])
    assert np.all(net(np.ones(3)) == 0)
    ident = DenseNet([np.eye(3)], [np.zeros(3)])
    np.testing.assert_array_equal(ident(np.array([1.0, -2.0, 3.0])), [1.0, -2.0, 3.0])
    one = DenseNet([np.array([[2.0]])], [np.array([1.0])])
    assert one(np.array([3.0])).tolist() == [7.0]


def test_forward_rejects_bad_width():
    net = DenseNet.init([3, 2], rng=0)
    with pytest.raises(ValueError):
        net(np.ones(4))


def test_backward_examples():
    net = DenseNet.init([3, 5, 2], rng=1)
    x = np.random.default_rng(0).random((4, 3))
    _, cache = forward(net, x)
    assert all(np.all(g == 0) for g in backward(net, cache, np.zeros((4, 2))))
    lin = DenseNet([np.array([[0.7]])], [np.array([0.2])])
    _, cache = forward(lin, np.array([3.0]))
    gW, gb = backward(lin, cache, np.array([1.0]))
    assert gW.tolist() == [[3.0]] and gb.tolist() == [1.0]


def test_backward_matches_finite_differences():
    rng = np.random.default_rng(2)
    worst = 0.0
    for trial in range(100):
        sizes = [int(rng.integers(1, 6))] + [int(rng.integers(2, 7)) for _ in range(int(rng.integers(1, 4)))]
        net = DenseNet.init(sizes, rng=rng)
        x = rng.normal(size=(int(rng.integers(1, 4)), sizes[0]))
        g = rng.normal(size=(len(x), sizes[-1]))
        _, cache = forward(net, x)
        an = backward(net, cache, g)
        fd = fd_grads(net, x, g)
        worst = max(worst, max(rel_err(a, f) for a, f in zip(an, fd)))
    assert worst <= 1e-4


def test_log_softmax_examples():
    out = log_softmax(np.zeros(4), np.array([True, True, False, True]))
    np.testing.assert_allclose(out[[0, 1, 3]], math.log(1 / 3))
    assert out[2] == -np.inf
    assert log_softmax(np.array([5.0, 1.0]), np.array([False, True]))[1] == 0.0
    np.testing.assert_allclose(log_softmax(np.array([0.0, math.log(3)])), [math.log(0.25), math.log(0.75)])


def test_log_softmax_needs_unmasked_entry():
    with pytest.raises(ValueError):
        log_softmax(np.zeros((2, 3)), np.array([[True, False, False], [False, False, False]]))


@given(st.lists(st.floats(-300, 300), min_size=2, max_size=12), st.integers(0, 2**12 - 1))
def test_log_softmax_normalised(logits, bits):
    z = np.array(logits)
    mask = np.array([(bits >> i) & 1 for i in range(len(z))], dtype=bool)
    mask[0] = True
    p = np.exp(log_softmax(z, mask))
    assert abs(p[mask].sum() - 1.0) <= 1e-12
    assert np.all(p[~mask] == 0)


def test_adam_zero_gradient_keeps_params():
    p = [np.array([1.0, -2.0])]
    opt = OptimizerState.for_params(p, lr=0.1)
    adam_step(p, [np.zeros(2)], opt)
    assert p[0].tolist() == [1.0, -2.0]


def test_adam_first_step_magnitude_and_direction():
    p = [np.array([0.0, 0.0])]
    opt = OptimizerState.for_params(p, lr=0.01)
    adam_step(p, [np.array([3.0, -0.5])], opt)
    np.testing.assert_allclose(p[0], [-0.01, 0.01], rtol=1e-6)
    for _ in range(50):
        adam_step(p, [np.array([3.0, -0.5])], opt)
    assert p[0][0] < -0.4 and p[0][1] > 0.4
    assert opt.step == 51


def test_adam_lr_scale():
    p = [np.zeros(1), np.zeros(1)]
    opt = OptimizerState.for_params(p, lr=0.01, lr_scale=[1.0, 10.0])
    adam_step(p, [np.ones(1), np.ones(1)], opt)
    assert p[1][0] == pytest.approx(10 * p[0][0])


def test_deterministic_init_and_training():
    def run():
        net = DenseNet.init([4, 8, 3], rng=7)
        opt = OptimizerState.for_params(net.params, lr=0.05)
        rng = np.random.default_rng(3)
        for _ in range(20):
            x = rng.random((5, 4))
            _, cache = forward(net, x)
            adam_step(net.params, backward(net, cache, rng.normal(size=(5, 3))), opt)
        return net

    a, b = run(), run()
    assert all(np.array_equal(p, q) for p, q in zip(a.params, b.params))


def test_init_bounds():
    net = DenseNet.init([16, 64, 5], rng=0)
    assert np.abs(net.weights[0]).max() <= 1 / 4
    assert np.abs(net.weights[1]).max() <= 1 / 8
    assert net.sizes == [16, 64, 5]


def test_save_load_bit_exact(tmp_path):
    net = DenseNet.init([3, 7, 2], rng=4)
    net.save(tmp_path / "net.json")
    back = DenseNet.load(tmp_path / "net.json")
    assert all(np.array_equal(p, q) for p, q in zip(net.params, back.params))
    assert back.slope == net.slope
