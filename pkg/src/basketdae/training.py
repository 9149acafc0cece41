"""Minibatch training loop, walkback augmentation, and the two
cross-validation sweeps (hidden width and decision threshold).

Each round samples a batch of clean baskets uniformly with replacement,
draws a fresh corruption per basket, and applies one clipped Adam update on
the batch-summed cross-entropy gradient.  Logged eval losses reuse one fixed
corruption of the eval set so the curve is comparable across checkpoints.
"""

import dataclasses
from dataclasses import dataclass, field

import numpy as np

from .corruption import CorruptionProcess
from .data import estimate_supports
from .errors import ConfigError, TrainingError
from .evaluation import confusion_counts, evaluate_baskets, misclassification_rate
from .generation import _nonzero_reconstruction
from .model import DaeModel
from .network import backward_batch, forward_batch, init_params, loss_batch
from .optimizer import AdamState, ClipSchedule, adam_step, clip

__all__ = [
    "WalkbackConfig",
    "TrainConfig",
    "TrainLog",
    "train",
    "walkback_samples",
    "sweep_hidden",
    "sweep_threshold",
]


@dataclass(frozen=True)
class WalkbackConfig:
    """Augment part of each batch with inputs visited by the model's own
    corrupt/reconstruct chain, all targeting the original clean basket."""

    k: int = 3           # chain steps per augmented basket
    fraction: float = 0.5  # share of the batch that gets augmented

    def __post_init__(self):
        if self.k < 1:
            raise ConfigError(f"walkback k must be >= 1, got {self.k}")
        if not 0.0 <= self.fraction <= 1.0:
            raise ConfigError(f"walkback fraction must be in [0, 1], got {self.fraction}")


@dataclass(frozen=True)
class TrainConfig:
    n_hidden: int = 100
    batch_size: int = 64
    rounds: int = 50_000
    lr: float = 1e-5
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    clip: ClipSchedule = ClipSchedule(delta0=1.0, decay=0.0)
    walkback: WalkbackConfig = None
    eta: float = 0.5
    eval_every: int = 500
    seed: int = 42

    def __post_init__(self):
        if self.n_hidden < 1:
            raise ConfigError(f"n_hidden must be >= 1, got {self.n_hidden}")
        if self.batch_size < 1:
            raise ConfigError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.rounds < 1:
            raise ConfigError(f"rounds must be >= 1, got {self.rounds}")
        if self.lr <= 0:
            raise ConfigError(f"lr must be positive, got {self.lr}")
        if not 0.0 <= self.eta <= 1.0:
            raise ConfigError(f"eta must be in [0, 1], got {self.eta}")
        if self.eval_every < 1:
            raise ConfigError(f"eval_every must be >= 1, got {self.eval_every}")


@dataclass(frozen=True)
class LogRecord:
    step: int
    train_loss: float
    eval_loss: float
    misclass_rate: float


@dataclass
class TrainLog:
    """Checkpoint records plus the full per-step training-loss trace.

    Logged losses are per-basket means (the optimization itself uses the
    batch sum); step 0 records the first batch and the untrained model.
    """

    records: list = field(default_factory=list)
    step_losses: np.ndarray = None

    def to_csv(self, fh):
        fh.write("step,train_loss,eval_loss,misclass_rate\n")
        for r in self.records:
            fh.write(f"{r.step},{r.train_loss!r},{r.eval_loss!r},{r.misclass_rate!r}\n")

    def smoothed_train_loss(self, window=100):
        """Trailing-window means of the per-step losses at both ends."""
        w = min(window, len(self.step_losses))
        return float(np.mean(self.step_losses[:w])), float(np.mean(self.step_losses[-w:]))


def _require_shared_catalog(a, b):
    if a.catalog.names != b.catalog.names:
        ours = set(a.catalog.names)
        theirs = set(b.catalog.names)
        diff = sorted(ours.symmetric_difference(theirs)) or ["ordering differs"]
        raise ConfigError(f"catalog mismatch: {diff}")


def _walkback_inputs(params, proc, x, k, rng, supports):
    """Corrupted inputs visited by k corrupt/reconstruct alternations from x;
    every one of them is paired with the original clean x as its target."""
    shim = _ParamsShim(params, supports)
    out = []
    cur = np.asarray(x, dtype=np.float64)
    for j in range(k):
        xt = proc.corrupt(cur, rng)
        out.append(xt)
        if j + 1 < k:
            cur = _nonzero_reconstruction(shim, xt, rng, proc.max_rejections, j + 1)
    return out


class _ParamsShim:
    """Just enough of the model surface for the generation helpers."""

    def __init__(self, params, supports):
        self.params = params
        self.supports = supports


def walkback_samples(model, x, k, rng):
    """Public wrapper over the walkback chain for a trained model."""
    if k < 1:
        raise ConfigError(f"walkback k must be >= 1, got {k}")
    proc = CorruptionProcess(model.supports)
    return _walkback_inputs(model.params, proc, x, k, rng, model.supports)


def train(train_ds, eval_ds, cfg):
    """Train a model on train_ds, logging eval metrics on eval_ds.

    Returns (DaeModel, TrainLog).  Fully deterministic given (datasets, cfg).
    """
    _require_shared_catalog(train_ds, eval_ds)
    supports = estimate_supports(train_ds)
    train_x = train_ds.nonzero_rows()
    if train_x.shape[0] == 0:
        raise TrainingError("training set is empty after dropping all-zero baskets")
    eval_x = eval_ds.nonzero_rows()
    if eval_x.shape[0] == 0:
        raise TrainingError("eval set is empty after dropping all-zero baskets")

    root = np.random.SeedSequence(cfg.seed)
    init_ss, batch_ss, corrupt_ss, eval_ss = root.spawn(4)
    batch_rng = np.random.default_rng(batch_ss)
    corrupt_rng = np.random.default_rng(corrupt_ss)

    p = train_ds.p
    params = init_params(p, cfg.n_hidden, init_ss)
    state = AdamState.for_params(params, lr=cfg.lr, beta1=cfg.beta1,
                                 beta2=cfg.beta2, epsilon=cfg.epsilon)
    proc = CorruptionProcess(supports)

    # One fixed corruption of the eval set, shared across all checkpoints.
    eval_xt = proc.corrupt_batch(eval_x, np.random.default_rng(eval_ss))

    def eval_metrics():
        _, y = forward_batch(params, eval_xt)
        e_loss = loss_batch(eval_x, y) / eval_x.shape[0]
        cm = confusion_counts(eval_x, y > cfg.eta)
        return e_loss, misclassification_rate(cm)

    log = TrainLog()
    step_losses = np.empty(cfg.rounds)
    wb = cfg.walkback
    n_wb = int(wb.fraction * cfg.batch_size) if wb is not None else 0

    for step in range(1, cfg.rounds + 1):
        idx = batch_rng.integers(0, train_x.shape[0], size=cfg.batch_size)
        clean = train_x[idx]
        if n_wb:
            pieces_x = [clean[n_wb:]] if n_wb < cfg.batch_size else []
            pieces_xt = [proc.corrupt_batch(clean[n_wb:], corrupt_rng)] if n_wb < cfg.batch_size else []
            for r in range(n_wb):
                visited = _walkback_inputs(params, proc, clean[r], wb.k,
                                           corrupt_rng, supports)
                pieces_xt.append(np.stack(visited))
                pieces_x.append(np.repeat(clean[r][None, :], len(visited), axis=0))
            batch_x = np.concatenate(pieces_x)
            batch_xt = np.ascontiguousarray(np.concatenate(pieces_xt))
        else:
            batch_x = clean
            batch_xt = proc.corrupt_batch(clean, corrupt_rng)

        h, y = forward_batch(params, batch_xt)
        batch_loss = loss_batch(batch_x, y)
        if not np.isfinite(batch_loss):
            raise TrainingError(f"non-finite loss at step {step}")
        step_losses[step - 1] = batch_loss / batch_x.shape[0]

        if step == 1:
            e_loss, mis = eval_metrics()
            log.records.append(LogRecord(0, float(step_losses[0]), e_loss, mis))

        grads = backward_batch(params, batch_xt, h, y, batch_x)
        try:
            grads = clip(grads, cfg.clip.delta(step - 1))
            adam_step(state, params, grads)
        except TrainingError as exc:
            raise TrainingError(f"step {step}: {exc}") from exc

        if step % cfg.eval_every == 0 or step == cfg.rounds:
            e_loss, mis = eval_metrics()
            log.records.append(LogRecord(step, float(step_losses[step - 1]), e_loss, mis))

    log.step_losses = step_losses
    model = DaeModel(params, train_ds.catalog, supports, cfg.eta)
    return model, log


def sweep_hidden(train_ds, eval_ds, candidates, cfg):
    """Train one model per hidden width (same seed/config otherwise) and
    report the eval miss-classification rate for each."""
    candidates = list(candidates)
    if not candidates:
        raise ConfigError("no hidden-width candidates given")
    rows = []
    for n in candidates:
        try:
            model, _ = train(train_ds, eval_ds, dataclasses.replace(cfg, n_hidden=n))
            cm = evaluate_baskets(model, eval_ds.nonzero_rows(), eta=cfg.eta,
                                  rng=np.random.default_rng(cfg.seed))
            rows.append((n, misclassification_rate(cm)))
        except (TrainingError, ConfigError) as exc:
            raise TrainingError(f"candidate n_hidden={n}: {exc}") from exc
    return rows


def sweep_threshold(model, eval_ds, etas, seed=42):
    """Miss-classification rate per threshold over ONE fixed corruption.

    Returns (rows, best_eta); ties break toward the smaller threshold.
    """
    etas = [float(e) for e in etas]
    if not etas:
        raise ConfigError("threshold grid must be nonempty")
    for e in etas:
        if not 0.0 <= e <= 1.0:
            raise ConfigError(f"eta must be in [0, 1], got {e}")
    x = eval_ds.nonzero_rows() if hasattr(eval_ds, "nonzero_rows") else np.asarray(eval_ds, dtype=np.float64)
    proc = CorruptionProcess(model.supports)
    xt = proc.corrupt_batch(x, np.random.default_rng(seed))
    _, y = forward_batch(model.params, xt)
    rows = []
    best = None
    for eta in sorted(etas):
        rate = misclassification_rate(confusion_counts(x, y > eta))
        rows.append((eta, rate))
        if best is None or rate < best[1]:
            best = (eta, rate)
    return rows, best[0]
