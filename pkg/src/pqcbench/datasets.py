"""Nine synthetic 2-D binary datasets of increasing difficulty.

Families: linear-to-wavy boundaries (1a, 1b, 1c), interleaving shapes
(2a half-moons, 2b deeper half-moons, 2c spirals), and concentric shapes
(3a disk vs ring, 3b ring vs ring, 3c alternating rings).  Every dataset
holds 1500 points in the unit square, 750 per class with labels in
{-1, +1}, split stratified into train/test/validation at 3:1:1
(900/300/300).  Generation is deterministic: each dataset derives its RNG
from ``master_seed XOR crc32(dataset_id)``.

CSV round-trip is bit-exact: coordinates are written with ``repr`` which
numpy parses back to the identical double.
"""

from __future__ import annotations

import csv
import zlib
from dataclasses import dataclass

import numpy as np

DATASET_IDS = ("1a", "1b", "1c", "2a", "2b", "2c", "3a", "3b", "3c")
N_POINTS = 1500
N_PER_CLASS = 750
SPLIT_SIZES = {"train": 900, "test": 300, "val": 300}
_SPLIT_PER_CLASS = {"train": 450, "test": 150, "val": 150}
DEFAULT_MASTER_SEED = 42

CENTER = np.array([0.5, 0.5])


@dataclass(frozen=True)
class Subset:
    """One split of a dataset: coordinates and matching labels."""

    xy: np.ndarray      # (m, 2) float64 in [0, 1]
    labels: np.ndarray  # (m,) int8 in {-1, +1}

    def __len__(self) -> int:
        return len(self.labels)


@dataclass(frozen=True)
class Dataset:
    dataset_id: str
    xy: np.ndarray        # (1500, 2)
    labels: np.ndarray    # (1500,)
    split_tag: np.ndarray  # (1500,) '<U5' in {train, test, val}
    seed: int

    def subset(self, name: str) -> Subset:
        if name not in SPLIT_SIZES:
            raise KeyError(f"unknown split {name!r}")
        m = self.split_tag == name
        return Subset(self.xy[m], self.labels[m])


def split(dataset: Dataset) -> tuple[Subset, Subset, Subset]:
    """(train, test, validation) views of a dataset."""
    return (dataset.subset("train"), dataset.subset("test"),
            dataset.subset("val"))


def dataset_seed(dataset_id: str, master_seed: int) -> int:
    return master_seed ^ zlib.crc32(dataset_id.encode())


# ---------------------------------------------------------------------------
# geometry recipes; each returns (xy_pos, xy_neg) before jitter/clipping
# ---------------------------------------------------------------------------

def _boundary_family(rng, waves: int):
    """Classes above/below a boundary curve in the unit square.

    ``waves == 0`` is the shallow linear boundary y = 0.4 + 0.2 x (balanced
    by construction); otherwise y = 0.5 + 0.25 sin(waves * pi * x).
    """
    pos, neg = [], []
    while len(pos) < N_PER_CLASS or len(neg) < N_PER_CLASS:
        pts = rng.uniform(0.0, 1.0, (4 * N_PER_CLASS, 2))
        if waves == 0:
            above = pts[:, 1] > 0.4 + 0.2 * pts[:, 0]
        else:
            above = pts[:, 1] > 0.5 + 0.25 * np.sin(waves * np.pi * pts[:, 0])
        pos.extend(pts[above])
        neg.extend(pts[~above])
    return np.array(pos[:N_PER_CLASS]), np.array(neg[:N_PER_CLASS])


def _moons(rng, v_offset: float, radius: float = 0.35):
    t1 = rng.uniform(0.0, np.pi, N_PER_CLASS)
    t2 = rng.uniform(0.0, np.pi, N_PER_CLASS)
    ax, ay = 0.325, 0.38
    upper = np.column_stack([ax + radius * np.cos(t1),
                             ay + radius * np.sin(t1)])
    lower = np.column_stack([ax + radius * (1.0 - np.cos(t2)),
                             ay + v_offset - radius * np.sin(t2)])
    return upper, lower


def _spirals(rng, turns: float = 1.5):
    phi1 = rng.uniform(0.0, 2.0 * np.pi * turns, N_PER_CLASS)
    phi2 = rng.uniform(0.0, 2.0 * np.pi * turns, N_PER_CLASS)
    r_max = 0.46

    def arm(phi, flip):
        r = 0.04 + (r_max - 0.04) * phi / (2.0 * np.pi * turns)
        ang = phi + (np.pi if flip else 0.0)
        return np.column_stack([0.5 + r * np.cos(ang), 0.5 + r * np.sin(ang)])

    return arm(phi1, False), arm(phi2, True)


def _annulus_points(rng, r_lo: float, r_hi: float, m: int):
    u = rng.uniform(0.0, 1.0, m)
    r = np.sqrt(r_lo ** 2 + u * (r_hi ** 2 - r_lo ** 2))  # uniform by area
    ang = rng.uniform(0.0, 2.0 * np.pi, m)
    return CENTER + np.column_stack([r * np.cos(ang), r * np.sin(ang)])


def _disk_vs_ring(rng):
    return (_annulus_points(rng, 0.0, 0.25, N_PER_CLASS),
            _annulus_points(rng, 0.35, 0.5, N_PER_CLASS))


def _ring_vs_ring(rng):
    return (_annulus_points(rng, 0.15, 0.25, N_PER_CLASS),
            _annulus_points(rng, 0.35, 0.45, N_PER_CLASS))


def _alternating_rings(rng, width: float = 0.17):
    # parity of floor(r / width): even rings -> +1, odd ring -> -1
    a0, a2 = 0.17 ** 2, 0.51 ** 2 - 0.34 ** 2  # ring areas / pi
    n_inner = int(round(N_PER_CLASS * a0 / (a0 + a2)))
    pos = np.vstack([
        _annulus_points(rng, 0.0, width, n_inner),
        _annulus_points(rng, 2 * width, 3 * width, N_PER_CLASS - n_inner),
    ])
    neg = _annulus_points(rng, width, 2 * width, N_PER_CLASS)
    return pos, neg


_RECIPES = {
    "1a": (lambda rng: _boundary_family(rng, 0), 0.05),
    "1b": (lambda rng: _boundary_family(rng, 1), 0.05),
    "1c": (lambda rng: _boundary_family(rng, 3), 0.05),
    "2a": (lambda rng: _moons(rng, 0.15), 0.04),
    "2b": (lambda rng: _moons(rng, 0.05), 0.05),
    "2c": (_spirals, 0.03),
    "3a": (_disk_vs_ring, 0.0),
    "3b": (_ring_vs_ring, 0.0),
    "3c": (_alternating_rings, 0.02),
}


def generate(dataset_id: str, master_seed: int = DEFAULT_MASTER_SEED) -> Dataset:
    """Generate one dataset deterministically from the master seed."""
    if dataset_id not in _RECIPES:
        raise KeyError(f"unknown dataset id {dataset_id!r}")
    seed = dataset_seed(dataset_id, master_seed)
    rng = np.random.default_rng(seed)
    recipe, sigma = _RECIPES[dataset_id]
    pos, neg = recipe(rng)
    xy = np.vstack([pos, neg])
    if sigma > 0.0:
        xy = xy + rng.normal(0.0, sigma, xy.shape)
    xy = np.clip(xy, 0.0, 1.0)
    labels = np.concatenate([np.full(N_PER_CLASS, 1, dtype=np.int8),
                             np.full(N_PER_CLASS, -1, dtype=np.int8)])

    # stratified split: 450/150/150 per class, then one global shuffle
    split_tag = np.empty(N_POINTS, dtype="<U5")
    for cls in (1, -1):
        idx = np.flatnonzero(labels == cls)
        rng.shuffle(idx)
        a = _SPLIT_PER_CLASS["train"]
        b = a + _SPLIT_PER_CLASS["test"]
        split_tag[idx[:a]] = "train"
        split_tag[idx[a:b]] = "test"
        split_tag[idx[b:]] = "val"
    order = rng.permutation(N_POINTS)
    return Dataset(dataset_id, xy[order], labels[order], split_tag[order],
                   seed)


def write_csv(path, dataset: Dataset) -> None:
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["x", "y", "label", "split"])
        for (x, y), lab, tag in zip(dataset.xy, dataset.labels,
                                    dataset.split_tag):
            w.writerow([repr(float(x)), repr(float(y)), int(lab), tag])


def read_csv(path, dataset_id: str = "", seed: int = -1) -> Dataset:
    xs, ys, labels, tags = [], [], [], []
    with open(path, newline="") as f:
        for row in csv.DictReader(f):
            xs.append(float(row["x"]))
            ys.append(float(row["y"]))
            labels.append(int(row["label"]))
            tags.append(row["split"])
    return Dataset(dataset_id, np.column_stack([xs, ys]),
                   np.array(labels, dtype=np.int8),
                   np.array(tags, dtype="<U5"), seed)
