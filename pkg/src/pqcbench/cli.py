"""Command-line interface.

Subcommands::

    pqcbench datasets         write the nine dataset CSVs
    pqcbench descriptors      estimate expr/expr'/ent per template config
    pqcbench sweep            hyperparameter-search training sweep
    pqcbench validate         validation runs (adam, l2, repeats)
    pqcbench correlate        correlation report from runs + descriptors
    pqcbench verify-fixtures  recompute the reference summary tables

Every command is deterministic given its flags and seeds; ``--jobs`` only
parallelizes, it never changes results.  Wall-clock metadata goes to a
``.meta.json`` side file so the result files themselves are byte-stable.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import datasets as ds_mod
from . import descriptors as desc_mod
from .analysis import (AccPoint, DescriptorPoint, correlation_table,
                       write_report_json, write_scatter_csv,
                       DATASET_ORDER)
from .circuits import TEMPLATE_IDS
from .reference import (load_refined_descriptors, load_validation_points,
                        verify_fixtures)
from .runner import SweepConfig, read_runs_csv, run_sweep


def _int_list(text: str) -> tuple[int, ...]:
    return tuple(int(x) for x in text.split(",") if x)


def _str_list(text: str) -> tuple[str, ...]:
    return tuple(x for x in text.split(",") if x)


def _write_meta(target: Path, command: str, args: dict) -> None:
    meta = {"command": command, "finished_unix": time.time(),
            "args": {k: v for k, v in args.items() if v is not None}}
    with open(Path(str(target) + ".meta.json"), "w") as f:
        json.dump(meta, f, indent=2, sort_keys=True, default=str)


def cmd_datasets(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for ds_id in ds_mod.DATASET_IDS:
        ds = ds_mod.generate(ds_id, args.seed)
        ds_mod.write_csv(out / f"dataset_{ds_id}.csv", ds)
        print(f"wrote dataset_{ds_id}.csv ({len(ds.labels)} points)")
    _write_meta(out / "datasets", "datasets", vars(args))
    return 0


def _descriptor_task(task):
    tid, layers, cfg_kwargs = task
    cfg = desc_mod.DescriptorConfig(**cfg_kwargs)
    return desc_mod.evaluate_template(tid, layers, cfg)


def cmd_descriptors(args) -> int:
    cfg_kwargs = dict(n_fidelity_pairs=args.pairs,
                      n_histogram_bins=args.bins,
                      n_ent_samples=args.ent_samples, seed=args.seed)
    tasks = [(tid, layers, cfg_kwargs)
             for tid in args.templates for layers in args.layers]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_descriptor_task, tasks))
    else:
        results = [_descriptor_task(t) for t in tasks]
    desc_mod.write_descriptors_csv(args.out, results)
    for r in results:
        print(f"template {r.template_id:2d} x{r.layers}: "
              f"expr={r.expr:.4f} expr'={r.expr_prime:.3f} ent={r.ent:.3f}")
    _write_meta(Path(args.out), "descriptors", vars(args))
    return 0


def _sweep_common(args, validation: bool) -> int:
    if args.config:
        cfg = SweepConfig.from_json_file(args.config)
    else:
        kwargs = dict(master_seed=args.seed, repeats=args.repeats,
                      epochs=args.epochs, batch_size=args.batch,
                      learning_rate=args.lr, datasets=args.datasets,
                      layers=args.layers)
        if args.templates is not None:
            kwargs["templates"] = args.templates
        if validation:
            cfg = SweepConfig.validation_defaults(**kwargs)
        else:
            kwargs.setdefault("optimizers", _str_list(args.optimizer))
            kwargs.setdefault("losses", _str_list(args.loss))
            cfg = SweepConfig(**kwargs)
    done = {"count": 0}

    def progress(key, rec):
        done["count"] += 1
        print(f"[{done['count']}] {key}: val={100 * rec.acc_val:.1f}%")

    new = run_sweep(cfg, args.out, jobs=args.jobs, progress=progress)
    print(f"{new} new runs appended to {args.out}")
    _write_meta(Path(args.out), "validate" if validation else "sweep",
                vars(args))
    return 0


def cmd_sweep(args) -> int:
    return _sweep_common(args, validation=False)


def cmd_validate(args) -> int:
    return _sweep_common(args, validation=True)


def _acc_points_from_runs(rows) -> list[AccPoint]:
    pts = []
    for row in rows:
        rep = int(row["run_id"].rsplit("_r", 1)[1])
        pts.append(AccPoint(int(row["template_id"]), int(row["layers"]),
                            row["dataset"], float(row["acc_val"]),
                            row["optimizer"], row["loss"], rep + 1))
    return pts


def cmd_correlate(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    if args.fixtures:
        points = load_validation_points(run=args.run)
        descriptors = load_refined_descriptors()
    else:
        points = _acc_points_from_runs(read_runs_csv(args.runs))
        descriptors = [
            DescriptorPoint(r.template_id, r.layers, r.expr_prime, r.ent)
            for r in desc_mod.read_descriptors_csv(args.descriptors)]
    report = correlation_table(points, descriptors,
                               exclude=tuple(args.exclude))
    write_report_json(out / "report.json", report)
    for ds in sorted({p.dataset_id for p in points},
                     key=lambda d: DATASET_ORDER.index(d)
                     if d in DATASET_ORDER else 99):
        write_scatter_csv(out / f"scatter_{ds}.csv", ds, points, descriptors)
    print(f"expr' r: mean={report.mean_expr:+.3f} "
          f"mean'={report.mean_expr_excl:+.3f} (excluding "
          f"{list(report.excluded) or 'none'})")
    print(f"ent   r: mean={report.mean_ent:+.3f} "
          f"mean'={report.mean_ent_excl:+.3f}")
    print(f"report written to {out / 'report.json'}")
    _write_meta(out / "report", "correlate", vars(args))
    return 0



def cmd_verify_fixtures(args) -> int:
    report = verify_fixtures(fixtures_dir=args.fixtures_dir)
    for line in report.lines():
        print(line)
    n_fail = sum(not c.ok for c in report.checks)
    n_note = sum(c.status == "known-inconsistency" for c in report.checks)
    print(f"{len(report.checks)} checks: {len(report.checks) - n_fail} ok, "
          f"{n_fail} failed, {n_note} known inconsistencies")
    return 0 if report.passed else 1


def _add_sweep_flags(p, validation: bool) -> None:
    p.add_argument("--out", required=True, help="runs.csv destination")
    p.add_argument("--templates", type=_int_list, default=None)
    p.add_argument("--layers", type=_int_list, default=(1, 2))
    p.add_argument("--datasets", type=_str_list,
                   default=ds_mod.DATASET_IDS)
    if not validation:
        p.add_argument("--optimizer", default="adam,gd")
        p.add_argument("--loss", default="l1,l2")
    p.add_argument("--repeats", type=int, default=3 if validation else 1)
    p.add_argument("--seed", type=int, default=ds_mod.DEFAULT_MASTER_SEED)
    p.add_argument("--epochs", type=int, default=50)
    p.add_argument("--lr", type=float, default=None)
    p.add_argument("--batch", type=int, default=30)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--config", default=None,
                   help="JSON file with SweepConfig fields (overrides flags)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="pqcbench", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("datasets", help="generate the nine dataset CSVs")
    p.add_argument("--seed", type=int, default=ds_mod.DEFAULT_MASTER_SEED)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_datasets)

    p = sub.add_parser("descriptors",
                       help="estimate expr/expr'/ent per template")
    p.add_argument("--out", required=True, help="descriptors.csv destination")
    p.add_argument("--templates", type=_int_list, default=TEMPLATE_IDS)
    p.add_argument("--layers", type=_int_list, default=(1, 2))
    p.add_argument("--pairs", type=int, default=5000)
    p.add_argument("--bins", type=int, default=75)
    p.add_argument("--ent-samples", type=int, default=1000)
    p.add_argument("--seed", type=int, default=desc_mod.DEFAULT_SEED)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_descriptors)

    p = sub.add_parser("sweep", help="hyperparameter-search training sweep")
    _add_sweep_flags(p, validation=False)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("validate", help="validation runs (adam/l2, repeats)")
    _add_sweep_flags(p, validation=True)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("correlate", help="descriptor/accuracy correlations")
    p.add_argument("--runs", help="runs.csv from sweep/validate")
    p.add_argument("--descriptors", help="descriptors.csv")
    p.add_argument("--fixtures", action="store_true",
                   help="use the shipped reference tables instead")
    p.add_argument("--run", type=int, default=1,
                   help="repeat run to use with --fixtures")
    p.add_argument("--exclude", type=_str_list, default=())
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_correlate)

    p = sub.add_parser("verify-fixtures",
                       help="recompute reference summaries from fixtures")
    p.add_argument("--fixtures-dir", default=None)
    p.set_defaults(func=cmd_verify_fixtures)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "correlate" and not args.fixtures:
        if not args.runs or not args.descriptors:
            print("correlate requires --runs and --descriptors "
                  "(or --fixtures)", file=sys.stderr)
            return 2
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
