"""Transaction ingestion, catalogs, supports, train/eval splitting, and a
planted-structure synthetic generator.

External format: one basket per line, comma-separated item labels, UTF-8.
Duplicate labels on a line collapse to a single presence bit; blank lines are
skipped (an all-zero basket is not representable, by design, since downstream
corruption rejects it anyway).
"""

import io
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, IngestError

__all__ = [
    "ItemCatalog",
    "Dataset",
    "SupportProfile",
    "SyntheticSpec",
    "parse_transactions",
    "serialize_transactions",
    "split",
    "estimate_supports",
    "supports_to_csv",
    "synth_dataset",
]


@dataclass(frozen=True)
class ItemCatalog:
    """Ordered, stable list of the p distinct item labels."""

    names: tuple

    def __post_init__(self):
        names = tuple(str(n) for n in self.names)
        object.__setattr__(self, "names", names)
        if len(names) == 0:
            raise ConfigError("catalog must contain at least one item")
        if len(set(names)) != len(names):
            dupes = sorted({n for n in names if names.count(n) > 1})
            raise ConfigError(f"duplicate catalog labels: {dupes}")
        for n in names:
            if n == "" or n != n.strip() or "," in n or "\n" in n:
                raise ConfigError(f"invalid item label {n!r}")
        object.__setattr__(self, "index", {n: i for i, n in enumerate(names)})

    index: dict = field(init=False, compare=False, repr=False)

    @property
    def p(self):
        return len(self.names)


@dataclass(frozen=True, eq=False)
class Dataset:
    """A basket collection: (n, p) binary matrix plus its catalog."""

    catalog: ItemCatalog
    matrix: np.ndarray

    def __post_init__(self):
        m = np.ascontiguousarray(self.matrix, dtype=np.uint8)
        if m.ndim != 2 or m.shape[1] != self.catalog.p:
            raise ConfigError(
                f"basket matrix shape {m.shape} does not match catalog p={self.catalog.p}"
            )
        if m.size and m.max() > 1:
            raise ConfigError("basket matrix must be binary")
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    def __len__(self):
        return self.matrix.shape[0]

    def __iter__(self):
        return iter(self.matrix)

    @property
    def p(self):
        return self.catalog.p

    def subset(self, indices):
        return Dataset(self.catalog, self.matrix[np.asarray(indices, dtype=np.intp)])

    def nonzero_rows(self):
        """Rows with at least one item, as float64 (the corruption domain)."""
        m = self.matrix[self.matrix.any(axis=1)]
        return np.ascontiguousarray(m, dtype=np.float64)


@dataclass(frozen=True, eq=False)
class SupportProfile:
    """Per-item empirical presence frequencies on the training split."""

    pi: np.ndarray

    def __post_init__(self):
        pi = np.ascontiguousarray(self.pi, dtype=np.float64)
        if pi.ndim != 1:
            raise ConfigError("supports must be a 1-D vector")
        if not np.isfinite(pi).all() or (pi < 0).any() or (pi > 1).any():
            raise ConfigError("supports must lie in [0, 1]")
        pi.flags.writeable = False
        object.__setattr__(self, "pi", pi)

    @property
    def p(self):
        return self.pi.shape[0]


def _iter_lines(source):
    if isinstance(source, str):
        return io.StringIO(source)
    if isinstance(source, bytes):
        return io.StringIO(source.decode("utf-8"))
    return source


def parse_transactions(source, catalog=None):
    """Parse comma-separated transaction lines into a Dataset.

    With ``catalog=None`` the catalog is discovered as the lexicographically
    sorted set of all labels seen (reproducible regardless of input order);
    with a fixed catalog, unknown labels raise IngestError naming the line.
    """
    rows = []
    for lineno, raw in enumerate(_iter_lines(source), start=1):
        line = raw.strip()
        if not line:
            continue
        labels = []
        for token in line.split(","):
            label = token.strip()
            if not label:
                raise IngestError(f"line {lineno}: empty item label")
            labels.append(label)
        rows.append((lineno, labels))
    if not rows:
        raise IngestError("no transactions")

    if catalog is None:
        seen = set()
        for _, labels in rows:
            seen.update(labels)
        catalog = ItemCatalog(tuple(sorted(seen)))

    matrix = np.zeros((len(rows), catalog.p), dtype=np.uint8)
    for r, (lineno, labels) in enumerate(rows):
        for label in labels:
            col = catalog.index.get(label)
            if col is None:
                raise IngestError(f"line {lineno}: unknown label {label!r}")
            matrix[r, col] = 1
    return Dataset(catalog, matrix)


def serialize_transactions(ds, fh):
    """Write a Dataset in the transaction format (inverse of parse).

    Empty baskets cannot be represented and raise ValueError.
    """
    names = ds.catalog.names
    for row in ds.matrix:
        cols = np.flatnonzero(row)
        if cols.size == 0:
            raise ValueError("empty basket is not representable in the transaction format")
        fh.write(",".join(names[c] for c in cols))
        fh.write("\n")


def split(ds, train_fraction, seed):
    """Seeded shuffle split into (train, eval); train gets floor(f * n) rows."""
    if not 0.0 < train_fraction < 1.0:
        raise ConfigError(f"train_fraction must be in (0, 1), got {train_fraction}")
    if len(ds) == 0:
        raise ConfigError("cannot split an empty dataset")
    rng = np.random.default_rng(seed)
    perm = rng.permutation(len(ds))
    n_train = math.floor(train_fraction * len(ds))
    return ds.subset(perm[:n_train]), ds.subset(perm[n_train:])


def estimate_supports(train):
    """Per-item presence frequency over the training baskets."""
    if len(train) == 0:
        raise ConfigError("cannot estimate supports on an empty dataset")
    return SupportProfile(train.matrix.mean(axis=0, dtype=np.float64))


def supports_to_csv(profile, catalog, fh):
    fh.write("label,support\n")
    for name, s in zip(catalog.names, profile.pi):
        fh.write(f"{name},{float(s)!r}\n")


@dataclass(frozen=True)
class SyntheticSpec:
    """Planted co-occurrence model standing in for real basket data.

    Each basket activates every cluster independently with probability
    ``cluster_on``; items of an active cluster appear with probability
    ``within``, all other items with their base rate.  All-zero draws are
    rejected, so every basket has at least one item.
    """

    p: int = 10
    clusters: tuple = ((0, 1, 2), (3, 4, 5))
    cluster_on: float = 0.4
    within: float = 0.9
    base: float = 0.08
    label_format: str = "item{:02d}"

    def __post_init__(self):
        if self.p < 1:
            raise ConfigError(f"p must be >= 1, got {self.p}")
        seen = set()
        for cluster in self.clusters:
            for i in cluster:
                if not 0 <= i < self.p:
                    raise ConfigError(f"cluster item {i} outside [0, {self.p})")
                if i in seen:
                    raise ConfigError(f"item {i} appears in more than one cluster")
                seen.add(i)
        for name, v in (("cluster_on", self.cluster_on), ("within", self.within),
                        ("base", self.base)):
            if not 0.0 <= v <= 1.0:
                raise ConfigError(f"{name} must be in [0, 1], got {v}")

    def catalog(self):
        return ItemCatalog(tuple(self.label_format.format(i) for i in range(self.p)))

    def marginals(self):
        """Exact per-item presence probabilities, all-zero rejection included.

        x_i = 1 implies the basket is nonempty, so conditioning on the
        rejection divides the raw marginal by P(some item present).
        """
        raw = np.full(self.p, self.base)
        for cluster in self.clusters:
            for i in cluster:
                raw[i] = self.cluster_on * self.within + (1.0 - self.cluster_on) * self.base
        clustered = {i for c in self.clusters for i in c}
        p_zero = (1.0 - self.base) ** (self.p - len(clustered))
        for cluster in self.clusters:
            k = len(cluster)
            p_zero *= (self.cluster_on * (1.0 - self.within) ** k
                       + (1.0 - self.cluster_on) * (1.0 - self.base) ** k)
        return raw / (1.0 - p_zero)


def synth_dataset(spec, n, seed):
    """Draw n baskets from the planted model; deterministic given seed."""
    if n < 1:
        raise ConfigError(f"need at least one basket, got n={n}")
    rng = np.random.default_rng(seed)
    base = np.full(spec.p, spec.base)
    rows = np.empty((n, spec.p), dtype=np.uint8)
    for r in range(n):
        for _ in range(10_000):
            prob = base.copy()
            for cluster in spec.clusters:
                if rng.random() < spec.cluster_on:
                    prob[list(cluster)] = spec.within
            bits = (rng.random(spec.p) < prob).astype(np.uint8)
            if bits.any():
                rows[r] = bits
                break
        else:
            raise ConfigError("synthetic spec is infeasible: cannot draw a nonempty basket")
    return Dataset(spec.catalog(), rows)
