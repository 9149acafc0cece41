"""The auto-encoder itself: parameters, forward pass, cross-entropy loss,
and exact analytic gradients.

Encode/decode:

    h = tanh(W_in @ x_tilde + b_in)        W_in: (N, p), b_in: (N,)
    y = sigmoid(W_out @ h + b_out)         W_out: (p, N), b_out: (p,)

The loss is the summed binary cross-entropy between the clean basket x and
the reconstruction y, with y clamped to [LOSS_CLAMP, 1 - LOSS_CLAMP] so the
logs stay finite.  All arithmetic is float64.
"""

from dataclasses import dataclass

import numpy as np

from . import backends
from .corruption import open_unit

__all__ = [
    "LOSS_CLAMP",
    "DaeParams",
    "DaeGradients",
    "ForwardTrace",
    "init_params",
    "forward",
    "forward_batch",
    "loss",
    "loss_batch",
    "loss_floor",
    "backward",
    "backward_batch",
]

# Clamp applied inside the loss; the reachable per-item loss floor is
# -log1p(-LOSS_CLAMP) even when y matches x exactly after clamping.
LOSS_CLAMP = 1e-7


def _as_matrix(x, p, name):
    arr = np.ascontiguousarray(x, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr[None, :]
    if arr.ndim != 2 or arr.shape[1] != p:
        raise ValueError(f"{name} must have {p} columns, got shape {arr.shape}")
    return arr


@dataclass(eq=False)
class DaeParams:
    """Untied encoder/decoder weights and biases."""

    w_in: np.ndarray
    b_in: np.ndarray
    w_out: np.ndarray
    b_out: np.ndarray

    def __post_init__(self):
        self.w_in = np.ascontiguousarray(self.w_in, dtype=np.float64)
        self.b_in = np.ascontiguousarray(self.b_in, dtype=np.float64)
        self.w_out = np.ascontiguousarray(self.w_out, dtype=np.float64)
        self.b_out = np.ascontiguousarray(self.b_out, dtype=np.float64)
        n, p = self.w_in.shape
        if self.b_in.shape != (n,) or self.w_out.shape != (p, n) or self.b_out.shape != (p,):
            raise ValueError(
                "inconsistent parameter shapes: "
                f"w_in {self.w_in.shape}, b_in {self.b_in.shape}, "
                f"w_out {self.w_out.shape}, b_out {self.b_out.shape}"
            )
        for arr in self.arrays():
            if not np.isfinite(arr).all():
                raise ValueError("parameters must be finite")

    @property
    def p(self):
        return self.w_in.shape[1]

    @property
    def n_hidden(self):
        return self.w_in.shape[0]

    def arrays(self):
        return (self.w_in, self.b_in, self.w_out, self.b_out)

    def copy(self):
        return DaeParams(*(a.copy() for a in self.arrays()))


@dataclass(eq=False)
class DaeGradients:
    """Loss gradients, same shapes as the parameters."""

    w_in: np.ndarray
    b_in: np.ndarray
    w_out: np.ndarray
    b_out: np.ndarray

    def arrays(self):
        return (self.w_in, self.b_in, self.w_out, self.b_out)

    def global_norm(self):
        """Euclidean norm over all parameter gradients jointly."""
        return float(np.sqrt(sum(float(np.sum(a * a)) for a in self.arrays())))

    def copy(self):
        return DaeGradients(*(a.copy() for a in self.arrays()))


@dataclass(eq=False)
class ForwardTrace:
    """One forward pass: corrupted input, hidden activations, output probs."""

    x_tilde: np.ndarray
    h: np.ndarray
    y: np.ndarray


def init_params(p, n_hidden, seed):
    """Weights uniform on the open interval (-s, s) with s = sqrt(6/(p+N));
    biases zero.  Deterministic given the seed."""
    if p < 1 or n_hidden < 1:
        raise ValueError(f"dimensions must be positive, got p={p}, n_hidden={n_hidden}")
    rng = np.random.default_rng(seed)
    s = np.sqrt(6.0 / (p + n_hidden))
    w_in = (2.0 * open_unit(rng, (n_hidden, p)) - 1.0) * s
    w_out = (2.0 * open_unit(rng, (p, n_hidden)) - 1.0) * s
    return DaeParams(w_in, np.zeros(n_hidden), w_out, np.zeros(p))


def forward_batch(params, xt):
    """Batched forward pass; returns (h, y) row per basket."""
    xt = _as_matrix(xt, params.p, "x_tilde")
    return backends.forward_batch(params.w_in, params.b_in, params.w_out, params.b_out, xt)


def forward(params, x_tilde):
    """Forward pass on a single corrupted basket."""
    xt = _as_matrix(x_tilde, params.p, "x_tilde")
    h, y = forward_batch(params, xt)
    return ForwardTrace(xt[0], h[0], y[0])


def loss(x, y):
    """Summed cross-entropy -sum(x log y + (1-x) log(1-y)), with y clamped."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape:
        raise ValueError(f"length mismatch: x {x.shape} vs y {y.shape}")
    return backends.cross_entropy_sum(
        np.ascontiguousarray(np.atleast_2d(x)),
        np.ascontiguousarray(np.atleast_2d(y)),
        LOSS_CLAMP,
        1.0 - LOSS_CLAMP,
    )


def loss_batch(x, y):
    """Cross-entropy summed over a whole batch (rows are baskets)."""
    return loss(x, y)


def loss_floor(p):
    """Smallest achievable loss for a length-p basket under clamping."""
    return p * -np.log1p(-LOSS_CLAMP)


def backward_batch(params, xt, h, y, x):
    """Batch-summed analytic gradients of loss_batch(x, y) w.r.t. params."""
    xt = _as_matrix(xt, params.p, "x_tilde")
    x = _as_matrix(x, params.p, "x")
    h = _as_matrix(h, params.n_hidden, "h")
    y = _as_matrix(y, params.p, "y")
    if not (xt.shape[0] == x.shape[0] == h.shape[0] == y.shape[0]):
        raise ValueError("batch size mismatch between x_tilde, h, y and x")
    gw_in, gb_in, gw_out, gb_out = backends.backward_batch(params.w_out, xt, h, y, x)
    return DaeGradients(gw_in, gb_in, gw_out, gb_out)


def backward(params, x, trace):
    """Analytic gradient for a single (clean basket, forward trace) pair.

    The output-layer error at the pre-activation is exactly (y - x); the
    rest is the chain rule through tanh.
    """
    return backward_batch(
        params, trace.x_tilde[None, :], trace.h[None, :], trace.y[None, :], x
    )
