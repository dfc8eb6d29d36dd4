"""Correlation and summary analysis over accuracy tables and descriptors.

All accuracies are handled in percent internally, matching the reference
tables; fresh run records (fractions in [0, 1]) are converted on ingestion.
Standard deviations are population standard deviations (ddof=0), which is
what the reference summary tables use.

Correlations pool 1-layer and 2-layer circuits as separate observations:
for each dataset the (template, layers) accuracy points are joined with the
matching descriptor values and a Pearson coefficient is computed for
expressibility' and for entangling capability.
"""

from __future__ import annotations

import csv
import json
import warnings
from dataclasses import dataclass, field

import numpy as np

DATASET_ORDER = ("1a", "1b", "1c", "2a", "2b", "2c", "3a", "3b", "3c")


class UndefinedCorrelationError(ValueError):
    """Raised when a correlation input is constant."""


class JoinError(KeyError):
    """Raised when an accuracy point has no matching descriptor entry."""


class IncompleteDesignError(ValueError):
    """Raised when a factorial summary lacks coverage of some option."""


@dataclass(frozen=True)
class AccPoint:
    """One accuracy observation, in percent."""

    template_id: int
    layers: int
    dataset_id: str
    acc: float
    optimizer: str = ""
    loss: str = ""
    run: int = 1

    @property
    def key(self) -> tuple[int, int]:
        return (self.template_id, self.layers)


@dataclass(frozen=True)
class DescriptorPoint:
    template_id: int
    layers: int
    expr_prime: float
    ent: float

    @property
    def key(self) -> tuple[int, int]:
        return (self.template_id, self.layers)


@dataclass
class CorrelationReport:
    """Per-dataset Pearson r of both descriptors vs accuracy, with summaries."""

    r_expr: dict[str, float]
    r_ent: dict[str, float]
    n_points: dict[str, int]
    excluded: tuple[str, ...]
    mean_expr: float = field(init=False)
    std_expr: float = field(init=False)
    mean_expr_excl: float = field(init=False)
    std_expr_excl: float = field(init=False)
    mean_ent: float = field(init=False)
    std_ent: float = field(init=False)
    mean_ent_excl: float = field(init=False)
    std_ent_excl: float = field(init=False)

    def __post_init__(self):
        def stats(vals):
            a = np.array(vals, dtype=float)
            return float(a.mean()), float(a.std())

        ds = list(self.r_expr)
        kept = [d for d in ds if d not in self.excluded]
        self.mean_expr, self.std_expr = stats([self.r_expr[d] for d in ds])
        self.mean_expr_excl, self.std_expr_excl = stats(
            [self.r_expr[d] for d in kept])
        self.mean_ent, self.std_ent = stats([self.r_ent[d] for d in ds])
        self.mean_ent_excl, self.std_ent_excl = stats(
            [self.r_ent[d] for d in kept])

    def to_dict(self) -> dict:
        return {
            "per_dataset": {
                d: {"r_expr_prime": self.r_expr[d], "r_ent": self.r_ent[d],
                    "n_points": self.n_points[d]}
                for d in self.r_expr
            },
            "excluded": list(self.excluded),
            "expr_prime": {"mean": self.mean_expr, "std": self.std_expr,
                           "mean_excl": self.mean_expr_excl,
                           "std_excl": self.std_expr_excl},
            "ent": {"mean": self.mean_ent, "std": self.std_ent,
                    "mean_excl": self.mean_ent_excl,
                    "std_excl": self.std_ent_excl},
        }


def pearson(xs, ys) -> float:
    """Sample Pearson product-moment correlation coefficient."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.shape != ys.shape:
        raise ValueError(f"length mismatch: {xs.shape} vs {ys.shape}")
    if xs.size < 3:
        raise ValueError("need at least 3 points")
    xm = xs - xs.mean()
    ym = ys - ys.mean()
    sx = float(np.sqrt((xm ** 2).sum()))
    sy = float(np.sqrt((ym ** 2).sum()))
    if sx == 0.0 or sy == 0.0:
        raise UndefinedCorrelationError(
            "correlation undefined for constant input")
    return float((xm * ym).sum() / (sx * sy))


def correlation_table(acc_points, descriptors, exclude=()) -> CorrelationReport:
    """Join accuracy points with descriptors and correlate per dataset.

    Every accuracy point must have a matching (template, layers) descriptor
    entry; descriptor entries without accuracy points are dropped with a
    warning (some reference runs lack single circuits).
    """
    desc = {d.key: d for d in descriptors}
    by_ds: dict[str, list[AccPoint]] = {}
    for p in acc_points:
        if p.key not in desc:
            raise JoinError(
                f"no descriptor entry for template {p.template_id} "
                f"x{p.layers} layers")
        by_ds.setdefault(p.dataset_id, []).append(p)
    used_keys = {p.key for pts in by_ds.values() for p in pts}
    unused = sorted(set(desc) - used_keys)
    if unused:
        warnings.warn(f"descriptor entries without accuracy points "
                      f"dropped: {unused}", stacklevel=2)

    r_expr, r_ent, n_points = {}, {}, {}
    for ds in sorted(by_ds, key=lambda d: (DATASET_ORDER.index(d)
                                           if d in DATASET_ORDER else 99, d)):
        pts = by_ds[ds]
        accs = [p.acc for p in pts]
        r_expr[ds] = pearson([desc[p.key].expr_prime for p in pts], accs)
        r_ent[ds] = pearson([desc[p.key].ent for p in pts], accs)
        n_points[ds] = len(pts)
    return CorrelationReport(r_expr, r_ent, n_points, tuple(exclude))


def factorial_design(acc_points) -> dict[tuple[str, str], float]:
    """Mean accuracy per option of loss, optimizer, and layer count."""
    pts = list(acc_points)
    out: dict[tuple[str, str], float] = {}
    for variable, getter, options in [
            ("loss", lambda p: p.loss, ("l1", "l2")),
            ("optimizer", lambda p: p.optimizer, ("adam", "gd")),
            ("layers", lambda p: str(p.layers), ("1", "2"))]:
        for opt in options:
            vals = [p.acc for p in pts if getter(p) == opt]
            if not vals:
                raise IncompleteDesignError(
                    f"no accuracy points with {variable}={opt}")
            out[(variable, opt)] = float(np.mean(vals))
    return out


def hyperparam_summary(acc_points) -> dict[tuple[str, str, int], float]:
    """Mean accuracy per (optimizer, loss, layers) cell."""
    cells: dict[tuple[str, str, int], list[float]] = {}
    for p in acc_points:
        cells.setdefault((p.optimizer, p.loss, p.layers), []).append(p.acc)
    expected = {(o, s, l) for o in ("adam", "gd") for s in ("l1", "l2")
                for l in (1, 2)}
    missing = expected - set(cells)
    if missing:
        raise IncompleteDesignError(f"missing hyperparameter cells: "
                                    f"{sorted(missing)}")
    return {k: float(np.mean(v)) for k, v in cells.items()}


def run_stability(acc_points) -> dict[tuple[int, int], tuple[float, float, int]]:
    """Mean absolute accuracy difference between repeat runs.

    Returns, per run pair, (mean_abs_diff, std, n_matched) over the
    accuracy points whose (template, layers, dataset) keys both runs have.
    """
    by_run: dict[int, dict[tuple, float]] = {}
    for p in acc_points:
        by_run.setdefault(p.run, {})[
            (p.template_id, p.layers, p.dataset_id)] = p.acc
    runs = sorted(by_run)
    if len(runs) < 2:
        raise ValueError("need at least two repeat runs")
    out = {}
    for i, a in enumerate(runs):
        for b in runs[i + 1:]:
            keys = sorted(set(by_run[a]) & set(by_run[b]))
            if not keys:
                raise KeyError(f"runs {a} and {b} share no keys")
            diffs = np.array([abs(by_run[a][k] - by_run[b][k]) for k in keys])
            out[(a, b)] = (float(diffs.mean()), float(diffs.std()), len(keys))
    return out


# ---------------------------------------------------------------------------
# report emission
# ---------------------------------------------------------------------------

def write_report_json(path, report: CorrelationReport) -> None:
    with open(path, "w") as f:
        json.dump(report.to_dict(), f, indent=2, sort_keys=True)
        f.write("\n")


def write_scatter_csv(path, dataset_id: str, acc_points, descriptors) -> None:
    """Per-dataset scatter data (descriptors vs accuracy) for plotting."""
    desc = {d.key: d for d in descriptors}
    rows = [p for p in acc_points if p.dataset_id == dataset_id]
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["expr_prime", "ent", "acc", "template_id", "layers"])
        for p in sorted(rows, key=lambda p: (p.template_id, p.layers)):
            d = desc[p.key]
            w.writerow([d.expr_prime, d.ent, p.acc, p.template_id, p.layers])
