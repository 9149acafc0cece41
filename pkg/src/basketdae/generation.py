"""Markov-chain basket generator.

One chain step corrupts the current basket and then samples each output bit
from Bernoulli(y_i) of the reconstruction.  All-zero reconstructions are
redrawn from the same y (they would be invalid corruption inputs), mirroring
the corruption module's rejection of all-zero baskets.  Samples are emitted
after a fixed burn-in, one every ``thinning`` steps.
"""

from dataclasses import dataclass

import numpy as np

from .corruption import CorruptionProcess
from .data import Dataset
from .errors import ConfigError, GenerationError
from .network import forward_batch

__all__ = [
    "ChainState",
    "GenConfig",
    "sample_reconstruction",
    "chain_step",
    "generate",
    "frequency_report",
    "frequency_report_to_csv",
]


@dataclass(frozen=True)
class ChainState:
    current: np.ndarray
    step: int = 0


@dataclass(frozen=True)
class GenConfig:
    n_samples: int
    burn_in: int = 100
    thinning: int = 10
    seed: int = 42
    chains: int = 1
    init: str = "dataset"  # or "product": draw bits from the support marginals

    def __post_init__(self):
        if self.n_samples < 1:
            raise ConfigError(f"n_samples must be >= 1, got {self.n_samples}")
        if self.burn_in < 0:
            raise ConfigError(f"burn_in must be >= 0, got {self.burn_in}")
        if self.thinning < 1:
            raise ConfigError(f"thinning must be >= 1, got {self.thinning}")
        if self.chains < 1:
            raise ConfigError(f"chains must be >= 1, got {self.chains}")
        if self.init not in ("dataset", "product"):
            raise ConfigError(f"init must be 'dataset' or 'product', got {self.init!r}")


def sample_reconstruction(model, x_tilde, rng):
    """Decode x_tilde and draw each output bit from Bernoulli(y_i)."""
    _, y = forward_batch(model.params, np.asarray(x_tilde, dtype=np.float64))
    return (rng.random(y.shape[1]) < y[0]).astype(np.float64)


def _nonzero_reconstruction(model, x_tilde, rng, max_rejections, step):
    _, y = forward_batch(model.params, np.asarray(x_tilde, dtype=np.float64))
    y = y[0]
    for _ in range(max_rejections + 1):
        bits = (rng.random(y.shape[0]) < y).astype(np.float64)
        if bits.any():
            return bits
    raise GenerationError(
        f"chain step {step}: reconstruction rejected {max_rejections} times "
        "(all output probabilities are near zero)",
        step=step,
    )


def chain_step(model, state, rng, proc=None):
    """Advance the chain one corrupt-then-reconstruct transition."""
    if proc is None:
        proc = CorruptionProcess(model.supports)
    x_tilde = proc.corrupt(state.current, rng)
    nxt = _nonzero_reconstruction(model, x_tilde, rng, proc.max_rejections, state.step + 1)
    return ChainState(nxt, state.step + 1)


def _initial_state(model, init_source, cfg, rng):
    if cfg.init == "product":
        pi = model.supports.pi
        for _ in range(1001):
            bits = (rng.random(pi.shape[0]) < pi).astype(np.float64)
            if bits.any():
                return ChainState(bits, 0)
        raise GenerationError("cannot draw a nonempty initial basket from the "
                              "support marginals", step=0)
    rows = init_source.nonzero_rows()
    if rows.shape[0] == 0:
        raise ConfigError("initialization dataset has no nonempty baskets")
    return ChainState(rows[int(rng.integers(rows.shape[0]))], 0)


def generate(model, init_source, cfg):
    """Run the chain(s) and collect cfg.n_samples baskets as a Dataset.

    With several chains the sample budget is split evenly (first chains get
    the remainder); each chain owns an independent substream, so runs are
    deterministic given cfg.seed.
    """
    if cfg.init == "dataset" and len(init_source) == 0:
        raise ConfigError("initialization dataset is empty")
    streams = np.random.SeedSequence(cfg.seed).spawn(cfg.chains)
    quota, extra = divmod(cfg.n_samples, cfg.chains)
    out = np.empty((cfg.n_samples, model.p), dtype=np.uint8)
    row = 0
    proc = CorruptionProcess(model.supports)
    for c in range(cfg.chains):
        want = quota + (1 if c < extra else 0)
        if want == 0:
            continue
        rng = np.random.default_rng(streams[c])
        state = _initial_state(model, init_source, cfg, rng)
        for _ in range(cfg.burn_in):
            state = chain_step(model, state, rng, proc)
        for _ in range(want):
            for _ in range(cfg.thinning):
                state = chain_step(model, state, rng, proc)
            out[row] = state.current.astype(np.uint8)
            row += 1
    return Dataset(model.catalog, out)


def frequency_report(generated, train):
    """Per-item (label, train_freq, gen_freq, abs_diff), train_freq descending."""
    if generated.catalog.names != train.catalog.names:
        raise ConfigError("frequency report needs a shared catalog")
    train_freq = train.matrix.mean(axis=0, dtype=np.float64)
    gen_freq = generated.matrix.mean(axis=0, dtype=np.float64)
    order = np.argsort(-train_freq, kind="stable")
    return [
        (train.catalog.names[i], float(train_freq[i]), float(gen_freq[i]),
         float(abs(train_freq[i] - gen_freq[i])))
        for i in order
    ]


def frequency_report_to_csv(report, fh):
    fh.write("label,train_freq,gen_freq,abs_diff\n")
    for label, tf, gf, diff in report:
        fh.write(f"{label},{tf!r},{gf!r},{diff!r}\n")
