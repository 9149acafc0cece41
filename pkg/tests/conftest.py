import numpy as np
import pytest

from basketdae import (
    DaeModel,
    DaeParams,
    SupportProfile,
    SyntheticSpec,
    TrainConfig,
    synth_dataset,
    train,
)
from basketdae.optimizer import ClipSchedule

TOY_SPEC = SyntheticSpec(p=2, clusters=((0, 1),), cluster_on=0.5, within=0.9, base=0.1)
SYNTH_SPEC = SyntheticSpec()  # p=10, two 3-item clusters


@pytest.fixture(scope="session")
def synth10():
    """Planted p=10 datasets: 5,000 training and 2,000 eval baskets."""
    return synth_dataset(SYNTH_SPEC, 5000, seed=101), synth_dataset(SYNTH_SPEC, 2000, seed=202)


@pytest.fixture(scope="session")
def synth10_model(synth10):
    """Model trained at the benchmark configuration on the planted data."""
    train_ds, eval_ds = synth10
    cfg = TrainConfig(n_hidden=100, batch_size=64, rounds=5000, lr=1e-4,
                      clip=ClipSchedule(1.0, 0.0), eval_every=1000, seed=7)
    model, log = train(train_ds, eval_ds, cfg)
    return model, log


@pytest.fixture(scope="session")
def toy2_model():
    """Small trained p=2 model whose chain kernel is exactly enumerable."""
    tr = synth_dataset(TOY_SPEC, 800, seed=61)
    ev = synth_dataset(TOY_SPEC, 300, seed=62)
    cfg = TrainConfig(n_hidden=4, batch_size=32, rounds=1500, lr=3e-3,
                      eval_every=750, seed=8)
    model, _ = train(tr, ev, cfg)
    return model, tr


def zero_model(p=10, n_hidden=4, supports=None, eta=0.5):
    """Model with all-zero parameters: y = 0.5 everywhere."""
    from basketdae.data import ItemCatalog

    params = DaeParams(np.zeros((n_hidden, p)), np.zeros(n_hidden),
                       np.zeros((p, n_hidden)), np.zeros(p))
    catalog = ItemCatalog(tuple(f"item{i:02d}" for i in range(p)))
    if supports is None:
        supports = np.zeros(p)
    return DaeModel(params, catalog, SupportProfile(np.asarray(supports, dtype=float)), eta)
