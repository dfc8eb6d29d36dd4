"""Reference tables shipped with the package, and their verification.

``fixtures/`` holds the published accuracy and descriptor tables this
project benchmarks against:

* ``expr_ent.csv``      -- expr, expr', ent per (template, layers).
* ``val_1layer.csv``, ``val_2layer.csv`` -- validation accuracies (percent),
  three repeat runs x 19 templates x 9 datasets (run 3 of the 2-layer
  table lacks template 18).
* ``hyper_{adam,gd}_{l1,l2}.csv`` -- hyperparameter-search accuracies,
  2 layer counts x 18 templates (no template 10) x 9 datasets.
* ``cnn.csv``           -- classical dense-network baseline accuracies.
* ``ent_refined.csv``   -- entangling capability recomputed from the
  template catalog at high sampling precision (regenerate with
  ``scripts/regen_refined_ent.py``).  The published ent column is rounded
  to two decimals, which is too coarse to reproduce the reference
  correlation coefficients; the refined values recover them.

``verify_fixtures`` recomputes the reference summary tables from these
files and reports one named check per summary value.  Two quirks of the
published tables are frozen here and reported rather than failed:

* The hyperparameter summary table equals the per-dataset means of the
  template-9 rows of the four search tables (not the mean over all
  templates).  Cell means recomputed from the rounded per-dataset values
  deviate from the published (also rounded) row averages by up to 0.06.
* The factorial "layers=2" mean recomputes to 76.61, while the published
  table prints 76.7.  The recomputed value is asserted against its frozen
  expectation instead, and the published mismatch is flagged as a known
  inconsistency.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .analysis import (AccPoint, DescriptorPoint, correlation_table,
                       factorial_design, hyperparam_summary, run_stability,
                       DATASET_ORDER)

FIXTURE_FILES = ("expr_ent.csv", "val_1layer.csv", "val_2layer.csv",
                 "hyper_adam_l1.csv", "hyper_adam_l2.csv", "hyper_gd_l1.csv",
                 "hyper_gd_l2.csv", "cnn.csv", "ent_refined.csv")

# template whose per-dataset means the published summary table reports
SUMMARY_TEMPLATE_ID = 9

# published summary values being verified
REF_CORR_EXPR_RUN1 = {"1a": 0.575, "1b": 0.699, "1c": 0.675, "2a": 0.200,
                      "2b": 0.761, "2c": 0.700, "3a": 0.732, "3b": 0.693,
                      "3c": 0.727}
REF_CORR_ENT_RUN1 = {"1a": 0.467, "1b": 0.353, "1c": 0.419, "2a": -0.257,
                     "2b": 0.251, "2c": 0.339, "3a": 0.190, "3b": 0.231,
                     "3c": 0.301}
REF_EXPR_MEAN, REF_EXPR_STD = 0.640, 0.163
REF_EXPR_MEAN_EXCL, REF_EXPR_STD_EXCL = 0.695, 0.052
REF_ENT_MEAN, REF_ENT_STD = 0.255, 0.199
REF_ENT_MEAN_EXCL, REF_ENT_STD_EXCL = 0.319, 0.089
REF_SUMMARY_CELLS = {("adam", "l1", 1): 72.6, ("adam", "l1", 2): 76.7,
                     ("adam", "l2", 1): 76.8, ("adam", "l2", 2): 82.6,
                     ("gd", "l1", 1): 73.9, ("gd", "l1", 2): 71.5,
                     ("gd", "l2", 1): 74.2, ("gd", "l2", 2): 75.6}
REF_BEST_CELL = ("adam", "l2", 2)
REF_FACTORIAL = {("loss", "l1"): 73.7, ("loss", "l2"): 77.3,
                 ("optimizer", "adam"): 77.2, ("optimizer", "gd"): 73.8,
                 ("layers", "1"): 74.4, ("layers", "2"): 76.7}
REF_STABILITY_MEAN, REF_STABILITY_STD = 0.06, 0.36

# the factorial layers=2 published value is inconsistent with the published
# per-dataset cells; this is the recomputed value it is checked against
KNOWN_FACTORIAL_LAYERS2 = 76.6056


def _fixture_path(name: str, fixtures_dir=None):
    if fixtures_dir is not None:
        return Path(fixtures_dir) / name
    return resources.files("pqcbench").joinpath(f"fixtures/{name}")


def _read(name: str, fixtures_dir=None) -> list[dict]:
    path = _fixture_path(name, fixtures_dir)
    try:
        with path.open(newline="") as f:
            return list(csv.DictReader(f))
    except FileNotFoundError:
        raise FileNotFoundError(f"missing fixture file {name!r}") from None


def load_descriptor_fixture(fixtures_dir=None) -> list[DescriptorPoint]:
    """Published descriptor values (expr' and rounded ent)."""
    return [DescriptorPoint(int(r["template_id"]), int(r["layers"]),
                            float(r["expr_prime"]), float(r["ent"]))
            for r in _read("expr_ent.csv", fixtures_dir)]


def load_refined_descriptors(fixtures_dir=None) -> list[DescriptorPoint]:
    """Published expr' joined with the recomputed high-precision ent."""
    refined = {(int(r["template_id"]), int(r["layers"])): float(r["ent"])
               for r in _read("ent_refined.csv", fixtures_dir)}
    return [DescriptorPoint(d.template_id, d.layers, d.expr_prime,
                            refined[d.key])
            for d in load_descriptor_fixture(fixtures_dir)]


def load_validation_points(run=None, fixtures_dir=None) -> list[AccPoint]:
    """Validation accuracies as AccPoints (optimizer adam, loss l2)."""
    pts = []
    for layers, fname in ((1, "val_1layer.csv"), (2, "val_2layer.csv")):
        for r in _read(fname, fixtures_dir):
            if run is not None and int(r["run"]) != run:
                continue
            for ds in DATASET_ORDER:
                pts.append(AccPoint(int(r["template_id"]), layers, ds,
                                    float(r[ds]), "adam", "l2",
                                    int(r["run"])))
    return pts


def load_hyper_points(template_id=None, fixtures_dir=None) -> list[AccPoint]:
    """Hyperparameter-search accuracies as AccPoints."""
    pts = []
    for opt in ("adam", "gd"):
        for loss in ("l1", "l2"):
            for r in _read(f"hyper_{opt}_{loss}.csv", fixtures_dir):
                if (template_id is not None
                        and int(r["template_id"]) != template_id):
                    continue
                for ds in DATASET_ORDER:
                    pts.append(AccPoint(int(r["template_id"]),
                                        int(r["layers"]), ds, float(r[ds]),
                                        opt, loss))
    return pts


def load_hyper_row_averages(fixtures_dir=None) -> dict:
    """Published per-row average accuracies of the search tables."""
    out = {}
    for opt in ("adam", "gd"):
        for loss in ("l1", "l2"):
            for r in _read(f"hyper_{opt}_{loss}.csv", fixtures_dir):
                out[(opt, loss, int(r["layers"]),
                     int(r["template_id"]))] = float(r["avg"])
    return out


def load_cnn_table(fixtures_dir=None) -> list[dict]:
    return _read("cnn.csv", fixtures_dir)


# ---------------------------------------------------------------------------
# verification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Check:
    name: str
    value: float
    expected: float
    tol: float
    status: str  # "ok" | "fail" | "known-inconsistency"
    note: str = ""

    @property
    def ok(self) -> bool:
        return self.status != "fail"


@dataclass
class FixtureReport:
    checks: list[Check]

    @property
    def passed(self) -> bool:
        return all(c.ok for c in self.checks)

    def lines(self) -> list[str]:
        out = []
        for c in self.checks:
            mark = {"ok": "PASS", "fail": "FAIL",
                    "known-inconsistency": "NOTE"}[c.status]
            line = (f"[{mark}] {c.name}: {c.value:+.4f} "
                    f"(expected {c.expected:+.4f} +- {c.tol:g})")
            if c.note:
                line += f"  -- {c.note}"
            out.append(line)
        return out


def _check(name, value, expected, tol, note="") -> Check:
    status = "ok" if abs(value - expected) <= tol else "fail"
    return Check(name, float(value), float(expected), tol, status, note)


def verify_fixtures(fixtures_dir=None) -> FixtureReport:
    """Recompute the reference summary tables from the raw fixtures."""
    checks: list[Check] = []

    # correlation table, repeat run 1 (38 points per dataset)
    val1 = load_validation_points(run=1, fixtures_dir=fixtures_dir)
    rep_pub = correlation_table(val1, load_descriptor_fixture(fixtures_dir),
                                exclude=("2a",))
    rep_ref = correlation_table(val1, load_refined_descriptors(fixtures_dir),
                                exclude=("2a",))
    for ds in DATASET_ORDER:
        checks.append(_check(f"corr_run1_expr_prime_{ds}", rep_pub.r_expr[ds],
                             REF_CORR_EXPR_RUN1[ds], 0.001))
    # the published ent column is 2-decimal rounded; correlations only
    # reproduce from the refined recomputation (sampling residual ~1e-3)
    for ds in DATASET_ORDER:
        tol = 0.001 if ds == "2a" else 0.003
        checks.append(_check(f"corr_run1_ent_{ds}", rep_ref.r_ent[ds],
                             REF_CORR_ENT_RUN1[ds], tol))
    checks += [
        _check("corr_run1_expr_prime_mean", rep_pub.mean_expr,
               REF_EXPR_MEAN, 0.001),
        _check("corr_run1_expr_prime_std", rep_pub.std_expr,
               REF_EXPR_STD, 0.002),
        _check("corr_run1_expr_prime_mean_excl_2a", rep_pub.mean_expr_excl,
               REF_EXPR_MEAN_EXCL, 0.001),
        _check("corr_run1_expr_prime_std_excl_2a", rep_pub.std_expr_excl,
               REF_EXPR_STD_EXCL, 0.002),
        _check("corr_run1_ent_mean", rep_ref.mean_ent, REF_ENT_MEAN, 0.003),
        _check("corr_run1_ent_std", rep_ref.std_ent, REF_ENT_STD, 0.003),
        _check("corr_run1_ent_mean_excl_2a", rep_ref.mean_ent_excl,
               REF_ENT_MEAN_EXCL, 0.003),
        _check("corr_run1_ent_std_excl_2a", rep_ref.std_ent_excl,
               REF_ENT_STD_EXCL, 0.003),
    ]

    # hyperparameter summary: per-dataset means of the template-9 rows
    t9 = load_hyper_points(template_id=SUMMARY_TEMPLATE_ID,
                           fixtures_dir=fixtures_dir)
    cells = hyperparam_summary(t9)
    row_avg = load_hyper_row_averages(fixtures_dir)
    for key, pub in REF_SUMMARY_CELLS.items():
        opt, loss, layers = key
        # per-dataset cells are rounded to 0.1, so their mean can sit up to
        # 0.05 from the true value; the published row average adds 0.05 more
        checks.append(_check(f"summary_cell_{opt}_{loss}_{layers}l",
                             cells[key], pub, 0.06,
                             note="recomputed from per-dataset cells"))
        checks.append(_check(f"summary_rowavg_{opt}_{loss}_{layers}l",
                             row_avg[(opt, loss, layers,
                                      SUMMARY_TEMPLATE_ID)], pub, 0.05))
    best = max(cells, key=cells.get)
    checks.append(Check("summary_best_cell_is_adam_l2_2l",
                        float(best == REF_BEST_CELL), 1.0, 0.0,
                        "ok" if best == REF_BEST_CELL else "fail"))
    checks.append(_check("summary_best_cell_value",
                         row_avg[REF_BEST_CELL + (SUMMARY_TEMPLATE_ID,)],
                         REF_SUMMARY_CELLS[REF_BEST_CELL], 0.05))

    # factorial design means
    fac = factorial_design(t9)
    for key, pub in REF_FACTORIAL.items():
        name = f"factorial_{key[0]}_{key[1]}"
        value = fac[key]
        if key == ("layers", "2"):
            inner = _check(name, value, KNOWN_FACTORIAL_LAYERS2, 0.01)
            checks.append(Check(
                name, value, pub, 0.05,
                "known-inconsistency" if inner.ok else "fail",
                note=f"published {pub} is inconsistent with the published "
                     f"per-dataset cells; recomputed {KNOWN_FACTORIAL_LAYERS2}"))
        else:
            checks.append(_check(name, value, pub, 0.05))

    # repeat-run stability of the validation tables
    stab = run_stability(load_validation_points(fixtures_dir=fixtures_dir))
    mean12, std12, n12 = stab[(1, 2)]
    checks.append(Check("stability_run1_run2_mean_abs_diff", mean12, 0.1, 0.1,
                        "ok" if mean12 <= 0.1 else "fail",
                        note=f"n={n12}, published overall "
                             f"{REF_STABILITY_MEAN}+-{REF_STABILITY_STD}"))

    # structural integrity: 342 points in runs 1-2, 333 in run 3 (one
    # template row absent from the 2-layer table)
    n_val = len(load_validation_points(fixtures_dir=fixtures_dir))
    checks.append(Check("fixture_validation_points", float(n_val), 1017.0,
                        0.0, "ok" if n_val == 1017 else "fail"))
    return FixtureReport(checks)
