"""Adam with global-norm gradient clipping.

Clipping treats all parameter gradients as one joint vector: if its
euclidean norm exceeds delta, every entry is scaled by delta/norm.  The
clip threshold may decay over steps via delta(t) = delta0 / (1 + decay*t);
the default is a constant threshold (decay = 0).
"""

from dataclasses import dataclass, field

import numpy as np

from . import backends
from .errors import TrainingError
from .network import DaeGradients

__all__ = ["ClipSchedule", "AdamState", "clip", "adam_step"]

# Norms within this relative band of delta count as already clipped, which
# makes clip exactly idempotent despite float rounding in the scale step.
_CLIP_SLACK = 64.0 * np.finfo(np.float64).eps


@dataclass(frozen=True)
class ClipSchedule:
    delta0: float = 1.0
    decay: float = 0.0

    def __post_init__(self):
        if self.delta0 <= 0:
            raise ValueError(f"delta0 must be positive, got {self.delta0}")
        if self.decay < 0:
            raise ValueError(f"decay must be nonnegative, got {self.decay}")

    def delta(self, t):
        """Threshold at step t (t >= 0); nonincreasing, -> 0 iff decay > 0."""
        return self.delta0 / (1.0 + self.decay * t)


def clip(grads, delta):
    """Scale the joint gradient onto the delta-ball when it sticks out.

    Returns gradients whose global norm is min(norm, delta); direction is
    preserved and the operation is idempotent.
    """
    if delta <= 0:
        raise ValueError(f"clip threshold must be positive, got {delta}")
    norm = grads.global_norm()
    if norm <= delta * (1.0 + _CLIP_SLACK):
        return grads
    return DaeGradients(*((a * delta) / norm for a in grads.arrays()))


@dataclass(eq=False)
class AdamState:
    """Single-owner mutable optimizer state (one instance per training run)."""

    lr: float = 1e-5
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    t: int = 0
    m: tuple = field(default=None, repr=False)
    v: tuple = field(default=None, repr=False)

    @classmethod
    def for_params(cls, params, lr=1e-5, beta1=0.9, beta2=0.999, epsilon=1e-8):
        return cls(
            lr=lr,
            beta1=beta1,
            beta2=beta2,
            epsilon=epsilon,
            t=0,
            m=tuple(np.zeros_like(a) for a in params.arrays()),
            v=tuple(np.zeros_like(a) for a in params.arrays()),
        )


def adam_step(state, params, grads):
    """One Adam update, in place on params and state; returns both.

    m <- b1 m + (1-b1) g;  v <- b2 v + (1-b2) g^2;  bias-corrected by the
    incremented step counter;  param <- param - lr * m_hat/(sqrt(v_hat)+eps).
    """
    for g in grads.arrays():
        if not np.isfinite(g).all():
            raise TrainingError("non-finite gradient entry in Adam update")
    state.t += 1
    for p_arr, g_arr, m_arr, v_arr in zip(
        params.arrays(), grads.arrays(), state.m, state.v
    ):
        backends.adam_update(
            p_arr.reshape(-1),
            np.ascontiguousarray(g_arr, dtype=np.float64).reshape(-1),
            m_arr.reshape(-1),
            v_arr.reshape(-1),
            state.t,
            state.lr,
            state.beta1,
            state.beta2,
            state.epsilon,
        )
    return params, state
