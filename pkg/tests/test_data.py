import io

import numpy as np
import pytest
from numpy.testing import assert_array_equal

from basketdae import (
    ConfigError,
    IngestError,
    ItemCatalog,
    SyntheticSpec,
    estimate_supports,
    parse_transactions,
    serialize_transactions,
    split,
    synth_dataset,
)
from basketdae.data import supports_to_csv


# ---------------------------------------------------------------- parsing

def test_parse_discover_sorts_catalog():
    ds = parse_transactions("milk,bread\nbread\n")
    assert ds.catalog.names == ("bread", "milk")
    assert_array_equal(ds.matrix, [[1, 1], [1, 0]])


def test_parse_collapses_duplicates():
    ds = parse_transactions("milk,milk\n")
    assert ds.catalog.names == ("milk",)
    assert_array_equal(ds.matrix, [[1]])


def test_parse_skips_blank_lines_and_strips():
    ds = parse_transactions("a, b\n\n   \nb\n")
    assert len(ds) == 2
    assert ds.catalog.names == ("a", "b")


def test_parse_large_line_count():
    text = "".join("beer,soda\n" if i % 2 else "beer\n" for i in range(9835))
    ds = parse_transactions(text)
    assert len(ds) == 9835


def test_parse_fixed_catalog_rejects_unknown_label():
    catalog = ItemCatalog(("bread", "milk"))
    with pytest.raises(IngestError, match=r"line 2.*'jam'"):
        parse_transactions("milk\nbread,jam\n", catalog=catalog)


def test_parse_empty_input():
    with pytest.raises(IngestError, match="no transactions"):
        parse_transactions("\n  \n")


def test_parse_empty_label_is_an_error():
    with pytest.raises(IngestError, match="line 1"):
        parse_transactions("a,,b\n")


def test_roundtrip_through_format_is_identity():
    ds = synth_dataset(SyntheticSpec(p=6, clusters=((0, 1),), base=0.3), 200, seed=3)
    buf = io.StringIO()
    serialize_transactions(ds, buf)
    back = parse_transactions(buf.getvalue(), catalog=ds.catalog)
    assert back.catalog.names == ds.catalog.names
    assert_array_equal(back.matrix, ds.matrix)


def test_serialize_rejects_empty_basket():
    ds = parse_transactions("a\n")
    forged = ds.matrix.copy()
    forged[0, 0] = 0
    from basketdae.data import Dataset

    with pytest.raises(ValueError, match="empty basket"):
        serialize_transactions(Dataset(ds.catalog, forged), io.StringIO())


def test_catalog_validation():
    with pytest.raises(ConfigError):
        ItemCatalog(())
    with pytest.raises(ConfigError, match="duplicate"):
        ItemCatalog(("a", "a"))
    with pytest.raises(ConfigError, match="invalid"):
        ItemCatalog(("a,b",))


# ---------------------------------------------------------------- split

def test_split_sizes_at_default_fraction():
    text = "\n".join(f"i{k % 17}" for k in range(9835)) + "\n"
    ds = parse_transactions(text)
    tr, ev = split(ds, 0.7001, seed=0)
    assert (len(tr), len(ev)) == (6885, 2950)


def test_split_deterministic_and_partitions():
    ds = parse_transactions("\n".join(f"i{k}" for k in range(10)) + "\n")
    a1, b1 = split(ds, 0.5, seed=9)
    a2, b2 = split(ds, 0.5, seed=9)
    assert_array_equal(a1.matrix, a2.matrix)
    assert_array_equal(b1.matrix, b2.matrix)
    for seed in (1, 2):
        tr, ev = split(ds, 0.5, seed=seed)
        union = np.concatenate([tr.matrix, ev.matrix])
        # every original basket appears exactly once
        assert_array_equal(np.sort(union, axis=0), np.sort(ds.matrix, axis=0))
        assert len(tr) + len(ev) == len(ds)


def test_split_rejects_bad_fraction():
    ds = parse_transactions("a\nb\n")
    for f in (0.0, 1.0, -0.1, 1.5):
        with pytest.raises(ConfigError):
            split(ds, f, seed=0)


# ---------------------------------------------------------------- supports

def test_supports_constant_item_is_one():
    ds = parse_transactions("a\na\na,b\n")
    prof = estimate_supports(ds)
    assert prof.pi[ds.catalog.index["a"]] == 1.0


def test_supports_direct_count():
    ds = parse_transactions("a\na,b\nb\na\n")
    prof = estimate_supports(ds)
    assert_array_equal(prof.pi, [0.75, 0.5])


def test_supports_match_binomial_oracle():
    # 1,000 iid Bernoulli(0.3) baskets; 3 sigma = 0.0435 < the 0.05 bound
    rng = np.random.default_rng(77)
    rows = (rng.random((1000, 4)) < 0.3).astype(np.uint8)
    rows[~rows.any(axis=1), 0] = 1  # keep every line representable
    from basketdae.data import Dataset

    ds = Dataset(ItemCatalog(("a", "b", "c", "d")), rows)
    prof = estimate_supports(ds)
    expected = rows.mean(axis=0)
    assert np.abs(prof.pi - expected).max() == 0
    assert np.abs(prof.pi[1:] - 0.3).max() < 0.05  # column 0 was patched


def test_supports_permutation_equivariant():
    ds = parse_transactions("a,c\nb\nc\n")
    prof = estimate_supports(ds)
    perm = [2, 0, 1]
    from basketdae.data import Dataset

    permuted = Dataset(ItemCatalog(tuple(ds.catalog.names[i] for i in perm)),
                       ds.matrix[:, perm])
    assert_array_equal(estimate_supports(permuted).pi, prof.pi[perm])


def test_supports_csv_layout():
    ds = parse_transactions("a\na,b\n")
    buf = io.StringIO()
    supports_to_csv(estimate_supports(ds), ds.catalog, buf)
    assert buf.getvalue() == "label,support\na,1.0\nb,0.5\n"


def test_supports_empty_dataset_errors():
    ds = parse_transactions("a\n")
    with pytest.raises(ConfigError):
        estimate_supports(ds.subset([]))


# ---------------------------------------------------------------- synthetic

def test_synth_planted_cooccurrence_beats_cross():
    ds = synth_dataset(SyntheticSpec(), 5000, seed=11)
    m = ds.matrix.astype(float)
    within = np.mean([np.mean(m[:, a] * m[:, b]) for a, b in [(0, 1), (0, 2), (1, 2), (3, 4), (3, 5), (4, 5)]])
    cross = np.mean([np.mean(m[:, a] * m[:, b]) for a in (0, 1, 2) for b in (3, 4, 5)])
    assert within > cross * 1.5


def test_synth_marginals_match_exact_model():
    spec = SyntheticSpec()
    ds = synth_dataset(spec, 5000, seed=101)
    exact = spec.marginals()
    sigma = np.sqrt(exact * (1 - exact) / 5000)
    assert (np.abs(ds.matrix.mean(axis=0) - exact) < 3 * sigma + 1e-9).all()


def test_synth_never_emits_empty_basket():
    ds = synth_dataset(SyntheticSpec(p=4, clusters=(), base=0.05), 2000, seed=5)
    assert ds.matrix.any(axis=1).all()


def test_synth_rejects_degenerate_requests():
    with pytest.raises(ConfigError):
        synth_dataset(SyntheticSpec(), 0, seed=1)
    with pytest.raises(ConfigError):
        SyntheticSpec(p=0)
    with pytest.raises(ConfigError):
        SyntheticSpec(p=4, clusters=((0, 1), (1, 2)))


def test_synth_deterministic():
    a = synth_dataset(SyntheticSpec(), 300, seed=42)
    b = synth_dataset(SyntheticSpec(), 300, seed=42)
    assert_array_equal(a.matrix, b.matrix)
    bufs = []
    for ds in (a, b):
        buf = io.StringIO()
        serialize_transactions(ds, buf)
        bufs.append(buf.getvalue())
    assert bufs[0] == bufs[1]
