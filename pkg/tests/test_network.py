import math

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from basketdae import DaeParams, ForwardTrace, backward, forward, init_params, loss
from basketdae.network import (
    LOSS_CLAMP,
    backward_batch,
    forward_batch,
    loss_batch,
    loss_floor,
)


def random_params(p, n, rng, scale=0.8):
    return DaeParams(
        rng.uniform(-scale, scale, (n, p)),
        rng.uniform(-scale, scale, n),
        rng.uniform(-scale, scale, (p, n)),
        rng.uniform(-scale, scale, p),
    )


# ------------------------------------------------------------------- init

def test_init_shapes_and_bounds():
    params = init_params(10, 100, seed=0)
    assert params.w_in.shape == (100, 10)
    assert params.w_out.shape == (10, 100)
    assert_array_equal(params.b_in, np.zeros(100))
    assert_array_equal(params.b_out, np.zeros(10))
    s = math.sqrt(6.0 / 110)
    assert np.abs(params.w_in).max() < s
    assert np.abs(params.w_out).max() < s


def test_init_deterministic():
    a, b = init_params(5, 7, seed=3), init_params(5, 7, seed=3)
    for x, y in zip(a.arrays(), b.arrays()):
        assert_array_equal(x, y)


def test_init_rejects_bad_dims():
    with pytest.raises(ValueError):
        init_params(0, 4, seed=0)
    with pytest.raises(ValueError):
        init_params(4, 0, seed=0)


# ---------------------------------------------------------------- forward

def test_forward_zero_params_is_half():
    params = DaeParams(np.zeros((4, 3)), np.zeros(4), np.zeros((3, 4)), np.zeros(3))
    trace = forward(params, [1.0, 0.0, 1.0])
    assert_array_equal(trace.h, np.zeros(4))
    assert_array_equal(trace.y, np.full(3, 0.5))


def test_forward_hand_computed_instance():
    # p=2, N=1: h = tanh(1), y = [sigmoid(2 tanh(1)), sigmoid(0)]
    params = DaeParams(np.array([[1.0, 1.0]]), np.array([0.0]),
                       np.array([[2.0], [0.0]]), np.array([0.0, 0.0]))
    trace = forward(params, [1.0, 0.0])
    h_expected = math.tanh(1.0)
    y0_expected = 1.0 / (1.0 + math.exp(-2.0 * h_expected))
    assert_allclose(trace.h, [h_expected], atol=1e-12)
    assert_allclose(trace.y, [y0_expected, 0.5], atol=1e-5)
    assert abs(h_expected - 0.76159) < 1e-5
    assert abs(y0_expected - 0.82101) < 1e-5


def test_forward_outputs_strictly_inside_unit_interval():
    # saturating weights: sigmoid would hit 0.0/1.0 in float64 without the pin
    params = DaeParams(np.full((2, 2), 500.0), np.zeros(2),
                       np.full((2, 2), 1e6), np.array([-1e7, 1e7]))
    trace = forward(params, [1.0, 1.0])
    assert 0.0 < trace.y.min() and trace.y.max() < 1.0


def test_forward_rejects_bad_length():
    params = init_params(3, 2, seed=0)
    with pytest.raises(ValueError):
        forward(params, [1.0, 0.0])


def test_params_validation():
    with pytest.raises(ValueError):
        DaeParams(np.zeros((2, 3)), np.zeros(3), np.zeros((3, 2)), np.zeros(3))
    with pytest.raises(ValueError):
        DaeParams(np.full((2, 3), np.nan), np.zeros(2), np.zeros((3, 2)), np.zeros(3))


# ------------------------------------------------------------------- loss

def test_loss_uniform_half_is_p_ln2():
    x = np.array([1.0, 0, 1, 1, 0, 0, 1, 0, 1, 1])
    assert abs(loss(x, np.full(10, 0.5)) - 10 * math.log(2)) < 1e-12


def test_loss_hand_computed():
    got = loss(np.array([1.0, 0.0]), np.array([0.9, 0.2]))
    expected = -math.log(0.9) - math.log(1 - 0.2)
    assert_allclose(got, expected, rtol=1e-12)
    assert abs(expected - 0.32850) < 1e-5


def test_loss_clamp_floor():
    # outputs equal to the clean bits reach the documented floor (up to one
    # rounding of 1 - LOSS_CLAMP), and approaching them decreases the loss
    x = np.array([1.0, 0.0, 1.0])
    assert_allclose(loss(x, x), loss_floor(3), rtol=1e-8)
    losses = [loss(x, np.clip(x, q, 1 - q)) for q in (0.4, 0.1, 0.01, 1e-6, LOSS_CLAMP)]
    assert all(a > b for a, b in zip(losses, losses[1:]))
    assert losses[-1] == loss(x, x)  # clamping maps both inputs to the same point
    assert loss_floor(3) > 0.0


def test_loss_rejects_length_mismatch():
    with pytest.raises(ValueError):
        loss(np.ones(3), np.full(2, 0.5))


# --------------------------------------------------------------- backward

def test_backward_zero_at_exact_fit():
    params = init_params(3, 2, seed=1)
    x = np.array([1.0, 0.0, 1.0])
    trace = ForwardTrace(x_tilde=x.copy(), h=np.zeros(2), y=x.copy())
    grads = backward(params, x, trace)
    for g in grads.arrays():
        assert_array_equal(g, np.zeros_like(g))


def test_backward_b_out_equals_residual():
    rng = np.random.default_rng(5)
    params = random_params(4, 3, rng)
    xt = np.array([1.0, 0.0, 1.0, 1.0])
    x = np.array([1.0, 1.0, 0.0, 1.0])
    trace = forward(params, xt)
    grads = backward(params, x, trace)
    assert_allclose(grads.b_out, trace.y - x, rtol=1e-12)


def finite_difference_gradients(params, x, xt, step=1e-5):
    """Central differences of the loss through the forward pass only."""
    grads = []
    for arr in params.arrays():
        g = np.zeros_like(arr)
        flat = arr.reshape(-1)
        gflat = g.reshape(-1)
        for k in range(flat.size):
            orig = flat[k]
            flat[k] = orig + step
            _, y_hi = forward_batch(params, xt[None, :])
            hi = loss_batch(x[None, :], y_hi)
            flat[k] = orig - step
            _, y_lo = forward_batch(params, xt[None, :])
            lo = loss_batch(x[None, :], y_lo)
            flat[k] = orig
            gflat[k] = (hi - lo) / (2 * step)
        grads.append(g)
    return grads


def relative_error(a, b):
    return np.abs(a - b) / np.maximum(np.maximum(np.abs(a), np.abs(b)), 1e-4)


def test_backward_matches_finite_differences():
    rng = np.random.default_rng(9)
    worst = 0.0
    for _ in range(20):
        p = int(rng.integers(2, 6))
        n = int(rng.integers(1, 5))
        params = random_params(p, n, rng)
        x = (rng.random(p) < 0.5).astype(float)
        xt = (rng.random(p) < 0.5).astype(float)
        trace = forward(params, xt)
        analytic = backward(params, x, trace)
        numeric = finite_difference_gradients(params, x, xt)
        for a, f in zip(analytic.arrays(), numeric):
            worst = max(worst, relative_error(a, f).max())
    assert worst <= 1e-4


def test_backward_batch_is_sum_of_singles():
    rng = np.random.default_rng(11)
    params = random_params(5, 3, rng)
    xs = (rng.random((4, 5)) < 0.5).astype(float)
    xts = (rng.random((4, 5)) < 0.5).astype(float)
    h, y = forward_batch(params, xts)
    batch = backward_batch(params, xts, h, y, xs)
    summed = [np.zeros_like(a) for a in params.arrays()]
    for i in range(4):
        trace = forward(params, xts[i])
        single = backward(params, xs[i], trace)
        for acc, g in zip(summed, single.arrays()):
            acc += g
    for got, expected in zip(batch.arrays(), summed):
        assert_allclose(got, expected, rtol=1e-10, atol=1e-12)
