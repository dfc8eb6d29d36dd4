"""Deterministic, resumable training sweeps over the experiment grid.

Every run is identified by the key ``t{id}_L{layers}_{dataset}_{opt}_{loss}_
r{repeat}`` and seeded from (master_seed, key), so results are independent
of execution order and of the ``jobs`` worker count.  Finished runs are
appended to ``runs.csv`` (one row per key, accuracies in percent) plus a
``runs.jsonl`` side file holding the full records including loss traces;
re-running a sweep skips keys already present in the CSV.
"""

from __future__ import annotations

import csv
import json
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, asdict
from pathlib import Path

import numpy as np

from .datasets import DATASET_IDS, DEFAULT_MASTER_SEED, generate
from .training import TrainConfig, RunRecord, train

RUNS_CSV_COLUMNS = ("run_id", "template_id", "layers", "dataset", "optimizer",
                    "loss", "seed", "acc_train", "acc_test", "acc_val")

# template 10 is excluded from hyperparameter-search sweeps
SWEEP_DEFAULT_TEMPLATES = tuple(t for t in range(1, 20) if t != 10)
VALIDATE_DEFAULT_TEMPLATES = tuple(range(1, 20))


@dataclass(frozen=True)
class SweepConfig:
    templates: tuple[int, ...] = SWEEP_DEFAULT_TEMPLATES
    layers: tuple[int, ...] = (1, 2)
    datasets: tuple[str, ...] = DATASET_IDS
    optimizers: tuple[str, ...] = ("adam", "gd")
    losses: tuple[str, ...] = ("l1", "l2")
    repeats: int = 1
    master_seed: int = DEFAULT_MASTER_SEED
    epochs: int = 50
    batch_size: int = 30
    learning_rate: float | None = None

    def __post_init__(self):
        for name in ("templates", "layers", "datasets", "optimizers",
                     "losses"):
            if not getattr(self, name):
                raise ValueError(f"{name} must be non-empty")
        if self.repeats < 1:
            raise ValueError("repeats must be >= 1")

    @staticmethod
    def validation_defaults(**overrides) -> "SweepConfig":
        base = dict(templates=VALIDATE_DEFAULT_TEMPLATES,
                    optimizers=("adam",), losses=("l2",), repeats=3)
        base.update(overrides)
        return SweepConfig(**base)

    @staticmethod
    def from_json_file(path) -> "SweepConfig":
        with open(path) as f:
            doc = json.load(f)
        for key in ("templates", "layers", "datasets", "optimizers",
                    "losses"):
            if key in doc:
                doc[key] = tuple(doc[key])
        return SweepConfig(**doc)


def run_key(template_id: int, layers: int, dataset_id: str, optimizer: str,
            loss: str, repeat: int) -> str:
    return (f"t{template_id:02d}_L{layers}_{dataset_id}_{optimizer}_{loss}_"
            f"r{repeat}")


def derive_init_seed(master_seed: int, key: str) -> int:
    ss = np.random.SeedSequence([master_seed, zlib.crc32(key.encode())])
    return int(ss.generate_state(1)[0])


def task_list(cfg: SweepConfig) -> list[tuple]:
    """All (key, train-config-args) of the grid, in canonical order."""
    tasks = []
    for tid in cfg.templates:
        for layers in cfg.layers:
            for ds in cfg.datasets:
                for opt in cfg.optimizers:
                    for loss in cfg.losses:
                        for rep in range(cfg.repeats):
                            key = run_key(tid, layers, ds, opt, loss, rep)
                            tasks.append((key, tid, layers, ds, opt, loss,
                                          rep))
    return tasks


def _run_one(args) -> tuple[str, RunRecord]:
    key, tid, layers, ds_id, opt, loss, _rep, cfg_dict = args
    cfg = SweepConfig(**cfg_dict)
    config = TrainConfig(
        template_id=tid, layers=layers, dataset_id=ds_id, loss=loss,
        optimizer=opt, learning_rate=cfg.learning_rate, epochs=cfg.epochs,
        batch_size=cfg.batch_size,
        init_seed=derive_init_seed(cfg.master_seed, key))
    dataset = generate(ds_id, cfg.master_seed)
    return key, train(config, dataset)


def existing_keys(runs_csv: Path) -> set[str]:
    if not Path(runs_csv).exists():
        return set()
    with open(runs_csv, newline="") as f:
        return {row["run_id"] for row in csv.DictReader(f)}


def _format_row(key: str, tid, layers, ds, opt, loss, record: RunRecord):
    return [key, tid, layers, ds, opt, loss, record.config.init_seed,
            f"{100 * record.acc_train:.4f}", f"{100 * record.acc_test:.4f}",
            f"{100 * record.acc_val:.4f}"]


def run_sweep(cfg: SweepConfig, runs_csv, jobs: int = 1,
              progress=None) -> int:
    """Execute all missing grid runs; returns the number of new rows."""
    runs_csv = Path(runs_csv)
    done = existing_keys(runs_csv)
    tasks = [t for t in task_list(cfg) if t[0] not in done]
    if not tasks:
        return 0
    args = [t + (asdict(cfg),) for t in tasks]
    if jobs > 1:
        pool = ProcessPoolExecutor(max_workers=jobs)
        results = pool.map(_run_one, args)
    else:
        pool = None
        results = map(_run_one, args)

    write_header = not runs_csv.exists()
    jsonl = runs_csv.with_suffix(".jsonl")
    new_rows = 0
    try:
        with open(runs_csv, "a", newline="") as fcsv, open(jsonl, "a") as fjs:
            w = csv.writer(fcsv)
            if write_header:
                w.writerow(RUNS_CSV_COLUMNS)
            for task, (key, rec) in zip(tasks, results):
                _, tid, layers, ds, opt, loss, _rep = task
                w.writerow(_format_row(key, tid, layers, ds, opt, loss, rec))
                doc = {"run_id": key, **json.loads(rec.to_json())}
                fjs.write(json.dumps(doc, sort_keys=True) + "\n")
                fcsv.flush()
                new_rows += 1
                if progress:
                    progress(key, rec)
    finally:
        if pool is not None:
            pool.shutdown()
    return new_rows


def read_runs_csv(path) -> list[dict]:
    with open(path, newline="") as f:
        return list(csv.DictReader(f))
