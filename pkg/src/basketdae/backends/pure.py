"""Pure numpy implementations of the hot numeric kernels.

This module is the reference semantics; ``_fastcore`` (Cython) mirrors it
loop for loop.  All kernels take and return C-contiguous float64 arrays.
"""

import numpy as np

NAME = "pure"

# Output probabilities are pinned strictly inside (0, 1) so that threshold
# boundaries behave exactly: y > 0 always holds and y < 1 always holds even
# when the sigmoid saturates in float64.
Y_FLOOR = 1e-300
Y_CEIL = float.fromhex("0x1.fffffffffffffp-1")  # largest double below 1.0


def _sigmoid(z):
    # Branch on sign to avoid overflow in exp for large |z|.
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def forward_batch(w_in, b_in, w_out, b_out, xt):
    """Encode/decode a batch: h = tanh(xt W_in^T + b_in), y = sigmoid(h W_out^T + b_out).

    xt has shape (B, p); returns (h, y) with shapes (B, N) and (B, p).
    """
    h = np.tanh(xt @ w_in.T + b_in)
    y = _sigmoid(h @ w_out.T + b_out)
    np.clip(y, Y_FLOOR, Y_CEIL, out=y)
    return h, y


def backward_batch(w_out, xt, h, y, x):
    """Batch-summed gradients of the summed cross-entropy loss.

    Returns (gw_in, gb_in, gw_out, gb_out).  The output-layer error through
    the sigmoid simplifies to (y - x) at the pre-activation.
    """
    dzo = y - x
    gb_out = dzo.sum(axis=0)
    gw_out = dzo.T @ h
    dzi = (dzo @ w_out) * (1.0 - h * h)
    gb_in = dzi.sum(axis=0)
    gw_in = dzi.T @ xt
    return gw_in, gb_in, gw_out, gb_out


def cross_entropy_sum(x, y, lo, hi):
    """Summed binary cross-entropy with outputs clamped to [lo, hi]."""
    yc = np.clip(y, lo, hi)
    return float(-np.sum(x * np.log(yc) + (1.0 - x) * np.log1p(-yc)))


def adam_update(param, grad, m, v, t, lr, beta1, beta2, eps):
    """One Adam update, in place on flat views of param/m/v.

    ``t`` is the already-incremented (1-based) step counter used for bias
    correction: param -= lr * m_hat / (sqrt(v_hat) + eps).
    """
    m *= beta1
    m += (1.0 - beta1) * grad
    v *= beta2
    v += (1.0 - beta2) * grad * grad
    m_hat = m / (1.0 - beta1**t)
    v_hat = v / (1.0 - beta2**t)
    param -= lr * m_hat / (np.sqrt(v_hat) + eps)
