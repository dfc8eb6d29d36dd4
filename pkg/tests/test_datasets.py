import numpy as np
import pytest

from pqcbench.datasets import (DATASET_IDS, Dataset, dataset_seed, generate,
                               read_csv, split, write_csv)


# ---------------------------------------------------------------------------
# a greedy depth-2 axis-aligned decision tree, used as a difficulty yardstick
# ---------------------------------------------------------------------------

def best_stump(xy, labels):
    """Best single axis-aligned threshold split by classification accuracy."""
    best = (0.5 * len(labels), 0, -np.inf, 1)
    for axis in (0, 1):
        order = np.argsort(xy[:, axis])
        vals = xy[order, axis]
        labs = labels[order]
        pos_left = np.cumsum(labs == 1)
        neg_left = np.cumsum(labs == -1)
        for cut in range(1, len(vals)):
            if vals[cut] == vals[cut - 1]:
                continue
            # left -> -1, right -> +1
            correct = neg_left[cut - 1] + (pos_left[-1] - pos_left[cut - 1])
            for sign, c in ((1, correct), (-1, len(labs) - correct)):
                if c > best[0]:
                    best = (c, axis, 0.5 * (vals[cut] + vals[cut - 1]), sign)
    return best


def tree2_accuracy(train_xy, train_labels, test_xy, test_labels):
    _, axis, thr, sign = best_stump(train_xy, train_labels)
    left = train_xy[:, axis] <= thr
    preds = np.empty(len(test_labels), dtype=int)
    test_left = test_xy[:, axis] <= thr
    for mask_tr, mask_te in ((left, test_left), (~left, ~test_left)):
        if mask_tr.sum() == 0:
            preds[mask_te] = sign
            continue
        _, ax2, thr2, s2 = best_stump(train_xy[mask_tr],
                                      train_labels[mask_tr])
        leaf = test_xy[mask_te, ax2] <= thr2
        preds_sub = np.where(leaf, -s2, s2)
        preds[mask_te] = preds_sub
    return float(np.mean(preds == test_labels))


# ---------------------------------------------------------------------------
# structure and determinism
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("ds_id", DATASET_IDS)
def test_sizes_and_balance(ds_id):
    ds = generate(ds_id, 42)
    assert len(ds.labels) == 1500
    assert int(np.sum(ds.labels == 1)) == 750
    assert int(np.sum(ds.labels == -1)) == 750


@pytest.mark.parametrize("ds_id", DATASET_IDS)
def test_split_sizes_and_stratification(ds_id):
    for seed in range(44, 54):
        ds = generate(ds_id, seed)
        train, test, val = split(ds)
        assert (len(train), len(test), len(val)) == (900, 300, 300)
        for sub, half in ((train, 450), (test, 150), (val, 150)):
            pos = int(np.sum(sub.labels == 1))
            assert abs(pos - half) <= 2
        # disjoint and exhaustive
        assert len(train) + len(test) + len(val) == 1500


def test_determinism_bit_for_bit():
    a = generate("1a", 42)
    b = generate("1a", 42)
    assert np.array_equal(a.xy, b.xy)
    assert np.array_equal(a.labels, b.labels)
    assert np.array_equal(a.split_tag, b.split_tag)


def test_seed_changes_data():
    a = generate("1a", 42)
    b = generate("1a", 43)
    assert not np.array_equal(a.xy, b.xy)


@pytest.mark.parametrize("ds_id", DATASET_IDS)
def test_normalization(ds_id):
    ds = generate(ds_id, 7)
    assert ds.xy.min() >= 0.0
    assert ds.xy.max() <= 1.0


def test_unknown_id():
    with pytest.raises(KeyError):
        generate("9z", 42)


def test_per_dataset_seeds_differ():
    seeds = {dataset_seed(d, 42) for d in DATASET_IDS}
    assert len(seeds) == len(DATASET_IDS)


# ---------------------------------------------------------------------------
# geometry
# ---------------------------------------------------------------------------

def test_1a_boundary_geometry():
    ds = generate("1a", 42)
    above = ds.xy[:, 1] > 0.4 + 0.2 * ds.xy[:, 0]
    # jitter blurs the margin but the bulk of each class keeps its side
    agreement = np.mean(above == (ds.labels == 1))
    assert agreement > 0.85


def test_3a_disk_and_ring_geometry():
    ds = generate("3a", 42)
    r = np.linalg.norm(ds.xy - 0.5, axis=1)
    pos = r[ds.labels == 1]
    neg = r[ds.labels == -1]
    assert pos.max() <= 0.25 + 1e-9
    assert neg.min() >= 0.35 - 1e-9
    assert neg.max() <= 0.5 + 1e-9


def test_3c_alternating_rings():
    ds = generate("3c", 42)
    r = np.linalg.norm(ds.xy - 0.5, axis=1)
    ring = np.floor(r / 0.17).astype(int)
    # class +1 on even rings, -1 on the odd ring, up to jitter leakage
    agreement = np.mean((ring % 2 == 0) == (ds.labels == 1))
    assert agreement > 0.8


def test_difficulty_ordering_tree_baseline():
    easy = generate("1a", 42)
    hard = generate("3c", 42)
    accs = {}
    for name, ds in (("1a", easy), ("3c", hard)):
        train, test, _ = split(ds)
        accs[name] = tree2_accuracy(train.xy, train.labels, test.xy,
                                    test.labels)
    assert accs["1a"] >= 0.9
    assert accs["3c"] <= 0.7


# ---------------------------------------------------------------------------
# CSV round-trip
# ---------------------------------------------------------------------------

def test_csv_round_trip_bit_exact(tmp_path):
    ds = generate("2c", 42)
    p1 = tmp_path / "a.csv"
    p2 = tmp_path / "b.csv"
    write_csv(p1, ds)
    back = read_csv(p1, "2c", ds.seed)
    assert np.array_equal(back.xy, ds.xy)
    assert np.array_equal(back.labels, ds.labels)
    assert np.array_equal(back.split_tag, ds.split_tag)
    write_csv(p2, back)
    assert p1.read_bytes() == p2.read_bytes()
