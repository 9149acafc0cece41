"""Thresholded evaluation under the missing-as-positive convention.

The positive class is "item missing": a position counts as a true positive
when the clean basket has x_i = 0 and the model predicts missing
(y_i <= eta).  Every one of the p positions of every evaluated basket
contributes one confusion cell, with ground truth taken from the clean
basket and the prediction computed from one corrupted draw of it.
"""

from dataclasses import dataclass

import numpy as np

from .corruption import CorruptionProcess
from .errors import ConfigError
from .network import forward_batch

__all__ = [
    "ConfusionMatrix",
    "RocCurve",
    "discretize",
    "confusion_counts",
    "evaluate_baskets",
    "rates",
    "misclassification_rate",
    "roc",
]


@dataclass(frozen=True)
class ConfusionMatrix:
    """Counts over basket positions; positive class = missing.

    tp: observed missing, predicted missing     fn: observed missing, predicted present
    fp: observed present, predicted missing     tn: observed present, predicted present
    """

    tp: int
    fn: int
    fp: int
    tn: int

    def __post_init__(self):
        if min(self.tp, self.fn, self.fp, self.tn) < 0:
            raise ValueError("confusion counts must be nonnegative")

    @property
    def total(self):
        return self.tp + self.fn + self.fp + self.tn

    @property
    def observed_missing(self):
        return self.tp + self.fn

    @property
    def observed_present(self):
        return self.fp + self.tn

    @property
    def predicted_missing(self):
        return self.tp + self.fp

    @property
    def predicted_present(self):
        return self.fn + self.tn

    def __add__(self, other):
        return ConfusionMatrix(self.tp + other.tp, self.fn + other.fn,
                               self.fp + other.fp, self.tn + other.tn)

    def to_csv(self, fh):
        fh.write("cell,count\n")
        for cell, count in (("tp", self.tp), ("fn", self.fn),
                            ("fp", self.fp), ("tn", self.tn)):
            fh.write(f"{cell},{count}\n")

    def to_table(self):
        """Human-readable layout: observed rows vs predicted columns."""
        rows = [
            ("", "Predicted Missing", "Predicted Present", "Total"),
            ("Observed Missing", f"{self.tp:,}", f"{self.fn:,}", f"{self.observed_missing:,}"),
            ("Observed Present", f"{self.fp:,}", f"{self.tn:,}", f"{self.observed_present:,}"),
            ("Total", f"{self.predicted_missing:,}", f"{self.predicted_present:,}", f"{self.total:,}"),
        ]
        widths = [max(len(r[c]) for r in rows) for c in range(4)]
        return "\n".join(
            "  ".join(cell.rjust(w) if i else cell.ljust(w)
                      for i, (cell, w) in enumerate(zip(row, widths)))
            for row in rows
        )


@dataclass(frozen=True)
class RocCurve:
    """(eta, fpr, tpr) points sorted by eta ascending.

    Predicted-missing is y <= eta, so both coordinates are nondecreasing in
    eta: (0, 0) at eta = 0 and (1, 1) at eta = 1.
    """

    points: tuple

    def to_csv(self, fh):
        fh.write("eta,fpr,tpr\n")
        for eta, fpr, tpr in self.points:
            fh.write(f"{eta!r},{fpr!r},{tpr!r}\n")


def discretize(y, eta):
    """Binary predictions: 1 iff y_i > eta (strict)."""
    if not 0.0 <= eta <= 1.0:
        raise ConfigError(f"eta must be in [0, 1], got {eta}")
    return (np.asarray(y, dtype=np.float64) > eta).astype(np.uint8)


def _as_basket_matrix(baskets):
    m = np.ascontiguousarray(baskets, dtype=np.float64)
    if m.ndim == 1:
        m = m[None, :]
    if m.shape[0] == 0:
        raise ConfigError("no baskets to evaluate")
    return m


def confusion_counts(x, predicted_present):
    """Tally confusion cells from clean baskets and a predicted-present mask."""
    missing = x == 0.0
    pred_missing = ~predicted_present
    tp = int(np.count_nonzero(missing & pred_missing))
    fn = int(np.count_nonzero(missing & predicted_present))
    fp = int(np.count_nonzero(~missing & pred_missing))
    tn = int(np.count_nonzero(~missing & predicted_present))
    return ConfusionMatrix(tp, fn, fp, tn)


def evaluate_baskets(model, baskets, eta=None, rng=None, repeats=1):
    """Confusion counts: corrupt each basket, reconstruct, threshold, score
    all p positions against the clean basket.

    ``repeats`` averages over several independent corruption draws by
    accumulating counts.  ``rng`` drives the corruption draws.
    """
    if eta is None:
        eta = model.eta
    if not 0.0 <= eta <= 1.0:
        raise ConfigError(f"eta must be in [0, 1], got {eta}")
    if repeats < 1:
        raise ConfigError("repeats must be >= 1")
    if rng is None:
        rng = np.random.default_rng(0)
    x = _as_basket_matrix(baskets)
    proc = CorruptionProcess(model.supports)
    total = ConfusionMatrix(0, 0, 0, 0)
    for _ in range(repeats):
        xt = proc.corrupt_batch(x, rng)
        _, y = forward_batch(model.params, xt)
        total = total + confusion_counts(x, y > eta)
    return total


def rates(cm):
    """(fpr, tpr) with missing as the positive class."""
    if cm.observed_missing == 0 or cm.observed_present == 0:
        raise ValueError(
            "undefined rate: need both observed-missing and observed-present cells"
        )
    fpr = cm.fp / cm.observed_present
    tpr = cm.tp / cm.observed_missing
    return fpr, tpr


def misclassification_rate(cm):
    """(fp + fn) / total."""
    if cm.total == 0:
        raise ValueError("undefined miss-classification rate: empty matrix")
    return (cm.fp + cm.fn) / cm.total


def roc(model, baskets, etas, rng=None):
    """ROC over a threshold grid with ONE shared corruption realization.

    All thresholds score the same corrupted reconstruction, so the curve is
    a paired comparison and monotone in eta.
    """
    etas = [float(e) for e in etas]
    if not etas:
        raise ConfigError("threshold grid must be nonempty")
    for e in etas:
        if not 0.0 <= e <= 1.0:
            raise ConfigError(f"eta must be in [0, 1], got {e}")
    if rng is None:
        rng = np.random.default_rng(0)
    x = _as_basket_matrix(baskets)
    proc = CorruptionProcess(model.supports)
    xt = proc.corrupt_batch(x, rng)
    _, y = forward_batch(model.params, xt)
    points = []
    for eta in sorted(etas):
        cm = confusion_counts(x, y > eta)
        fpr, tpr = rates(cm)
        points.append((eta, fpr, tpr))
    return RocCurve(tuple(points))
