"""Support-proportional basket corruption.

A present item i is removed with probability pi_i (its training support), an
absent item always stays absent, and draws that would zero out the whole
basket are rejected and redrawn.  Removal uses u_i <= pi_i with u_i drawn
from the open interval (0, 1), so pi_i = 0 guarantees survival and pi_i = 1
guarantees a removal attempt.
"""

from dataclasses import dataclass

import numpy as np

from .data import SupportProfile
from .errors import ConfigError, CorruptionError

__all__ = ["CorruptionProcess", "removal_rate", "removal_rate_to_csv", "open_unit"]


def open_unit(rng, size):
    """Uniform draws from the open interval (0, 1)."""
    u = rng.random(size)
    zero = u == 0.0
    while zero.any():
        u[zero] = rng.random(int(zero.sum()))
        zero = u == 0.0
    return u


@dataclass(frozen=True)
class CorruptionProcess:
    supports: SupportProfile
    max_rejections: int = 1000

    def __post_init__(self):
        if self.max_rejections < 1:
            raise ConfigError("max_rejections must be >= 1")

    @property
    def p(self):
        return self.supports.p

    def corrupt(self, x, rng):
        """Corrupt a single basket; requires at least one present item."""
        x = np.ascontiguousarray(x, dtype=np.float64)
        return self.corrupt_batch(x[None, :], rng)[0]

    def corrupt_batch(self, xs, rng):
        """Corrupt each row independently; rejected rows are redrawn whole.

        Returns a float64 matrix with x_tilde <= x elementwise and no
        all-zero rows.  Raises CorruptionError when a row exhausts the
        rejection cap (possible when every support is near 1).
        """
        xs = np.ascontiguousarray(xs, dtype=np.float64)
        if xs.ndim != 2 or xs.shape[1] != self.p:
            raise ValueError(f"expected shape (n, {self.p}), got {xs.shape}")
        if not (xs.any(axis=1)).all():
            raise ValueError("corruption requires baskets with at least one item")
        pi = self.supports.pi
        u = open_unit(rng, xs.shape)
        out = np.where((xs == 1.0) & (u > pi), 1.0, 0.0)
        dead = ~out.any(axis=1)
        rejections = 0
        while dead.any():
            if rejections == self.max_rejections:
                raise CorruptionError(
                    f"corruption rejected {rejections} times for a basket; "
                    "supports may be too close to 1",
                    attempts=rejections,
                )
            rows = np.flatnonzero(dead)
            u = open_unit(rng, (rows.size, self.p))
            redo = np.where((xs[rows] == 1.0) & (u > pi), 1.0, 0.0)
            out[rows] = redo
            dead[rows] = ~redo.any(axis=1)
            rejections += 1
        return out


def removal_rate(proc, ds, trials, rng):
    """Observed per-item removal frequency among present items.

    For each item i: the fraction of (basket, trial) pairs with x_i = 1 and
    x_tilde_i = 0 over accepted draws.  Items never present get nan.
    """
    if trials < 1:
        raise ConfigError("trials must be >= 1")
    base = np.ascontiguousarray(ds.matrix, dtype=np.float64)
    removed = np.zeros(proc.p)
    present = np.zeros(proc.p)
    chunk = max(1, 65_536 // max(1, len(ds)))
    done = 0
    while done < trials:
        reps = min(chunk, trials - done)
        tiled = np.tile(base, (reps, 1))
        xt = proc.corrupt_batch(tiled, rng)
        removed += ((tiled == 1.0) & (xt == 0.0)).sum(axis=0)
        present += (tiled == 1.0).sum(axis=0)
        done += reps
    with np.errstate(invalid="ignore"):
        return np.where(present > 0, removed / present, np.nan)


def removal_rate_to_csv(catalog, supports, rates, fh):
    fh.write("label,pi,observed_rate\n")
    for name, pi_i, r in zip(catalog.names, supports.pi, rates):
        fh.write(f"{name},{float(pi_i)!r},{float(r)!r}\n")
