"""Training of (embedding + template) circuits as binary classifiers.

The prediction is the analytic expectation p(+1) - p(-1) of the balanced
basis-state class mapping: measuring all four qubits in the Pauli-Z basis
yields 16 outcomes, of which the first four and last four (indices 0-3 and
12-15, i.e. qubits 0 and 1 equal) map to class -1 and the middle eight to
class +1.  Labels are encoded as -1/+1 so the L1/L2 losses apply directly.

Gradients are exact parameter-shift evaluations: two-term shifts for plain
rotations and the four-term decomposition for controlled rotations (their
generator has eigenvalues {0, +-1/2}, giving the shift pair pi/2, 3pi/2
with weights (sqrt(2) +- 1) / (4 sqrt(2))).  All shifted circuits for a
minibatch are evaluated in one batched simulator call.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, asdict

import numpy as np

from .circuits import (CircuitTemplate, run_circuit_batch,
                       run_embedding_batch, run_template_batch)
from .datasets import Dataset, Subset
from .sim import CONTROLLED_KINDS

# basis-state class mapping: +1 for indices 4..11, -1 elsewhere
CLASS_SIGNS = np.where((np.arange(16) >= 4) & (np.arange(16) <= 11), 1.0, -1.0)
MINUS_INDICES = tuple(np.flatnonzero(CLASS_SIGNS < 0))
PLUS_INDICES = tuple(np.flatnonzero(CLASS_SIGNS > 0))

LOSSES = ("l1", "l2")
OPTIMIZERS = ("adam", "gd")
DEFAULT_LEARNING_RATE = {"adam": 0.05, "gd": 0.1}

# four-term shift weights for controlled rotations
_D_PLUS = (np.sqrt(2.0) + 1.0) / (4.0 * np.sqrt(2.0))
_D_MINUS = (np.sqrt(2.0) - 1.0) / (4.0 * np.sqrt(2.0))

EARLY_STOP_DELTA = 1e-4
EARLY_STOP_PATIENCE = 5


@dataclass(frozen=True)
class TrainConfig:
    template_id: int
    layers: int
    dataset_id: str
    loss: str = "l2"
    optimizer: str = "adam"
    learning_rate: float | None = None  # default depends on the optimizer
    epochs: int = 50
    batch_size: int = 30
    init_seed: int = 0
    shots: int | None = None

    def __post_init__(self):
        if self.loss not in LOSSES:
            raise ValueError(f"loss must be one of {LOSSES}, got {self.loss!r}")
        if self.optimizer not in OPTIMIZERS:
            raise ValueError(
                f"optimizer must be one of {OPTIMIZERS}, got {self.optimizer!r}")
        if self.learning_rate is not None and self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if not 1 <= self.batch_size <= 900:
            raise ValueError("batch_size must be in [1, 900]")

    @property
    def lr(self) -> float:
        if self.learning_rate is not None:
            return self.learning_rate
        return DEFAULT_LEARNING_RATE[self.optimizer]


@dataclass
class RunRecord:
    config: TrainConfig
    final_params: np.ndarray
    loss_trace: list[float]          # mean per-sample train loss per epoch
    acc_train: float
    acc_test: float
    acc_val: float

    def to_json(self) -> str:
        doc = {
            "config": asdict(self.config),
            "final_params": [float(x) for x in self.final_params],
            "loss_trace": [float(x) for x in self.loss_trace],
            "accuracies": {"train": self.acc_train, "test": self.acc_test,
                           "val": self.acc_val},
        }
        return json.dumps(doc, sort_keys=True)

    @staticmethod
    def from_json(s: str) -> "RunRecord":
        doc = json.loads(s)
        cfg = TrainConfig(**doc["config"])
        acc = doc["accuracies"]
        return RunRecord(cfg, np.asarray(doc["final_params"]),
                         list(doc["loss_trace"]), acc["train"], acc["test"],
                         acc["val"])


# ---------------------------------------------------------------------------
# prediction
# ---------------------------------------------------------------------------

def _expectations(amps: np.ndarray) -> np.ndarray:
    return (np.abs(amps) ** 2) @ CLASS_SIGNS


def predict_values(template: CircuitTemplate, params, xy) -> np.ndarray:
    """p(+1) - p(-1) for each point of a (m, 2) feature array."""
    params = np.asarray(params, dtype=float)
    xy = np.atleast_2d(np.asarray(xy, dtype=float))
    big = np.broadcast_to(params, (len(xy), params.size))
    return _expectations(run_circuit_batch(template, big, xy))


def predict_value(template: CircuitTemplate, params, point,
                  shots: int | None = None, rng=None) -> float:
    """Class expectation for one point; sampled from ``shots`` if given."""
    if shots is None:
        return float(predict_values(template, params, point)[0])
    params = np.asarray(params, dtype=float)
    amps = run_circuit_batch(template, params[None, :],
                             np.asarray(point, float)[None, :])
    probs = np.abs(amps[0]) ** 2
    probs = probs / probs.sum()
    rng = rng or np.random.default_rng()
    counts = rng.multinomial(shots, probs)
    return float((counts / shots) @ CLASS_SIGNS)


def classify(value: float) -> int:
    """Sign of the prediction; the tie at 0 maps to +1."""
    return 1 if value >= 0.0 else -1


def accuracy(template: CircuitTemplate, params, subset: Subset) -> float:
    """Fraction of correctly classified points, in [0, 1]."""
    if len(subset) == 0:
        raise ValueError("cannot score an empty subset")
    values = predict_values(template, params, subset.xy)
    predicted = np.where(values >= 0.0, 1, -1)
    return float(np.mean(predicted == subset.labels))


# ---------------------------------------------------------------------------
# losses
# ---------------------------------------------------------------------------

def loss_l1(preds, labels) -> float:
    preds, labels = _check_lengths(preds, labels)
    return float(np.sum(np.abs(preds - labels)))


def loss_l2(preds, labels) -> float:
    preds, labels = _check_lengths(preds, labels)
    return float(np.sum((preds - labels) ** 2))


def _check_lengths(preds, labels):
    preds = np.asarray(preds, dtype=float)
    labels = np.asarray(labels, dtype=float)
    if preds.shape != labels.shape:
        raise ValueError(f"length mismatch: {preds.shape} vs {labels.shape}")
    return preds, labels


def _loss_value(name: str, preds, labels) -> float:
    return loss_l1(preds, labels) if name == "l1" else loss_l2(preds, labels)


def _loss_deriv(name: str, preds, labels) -> np.ndarray:
    if name == "l1":
        return np.sign(preds - labels)
    return 2.0 * (preds - labels)


# ---------------------------------------------------------------------------
# parameter-shift gradient
# ---------------------------------------------------------------------------

def _slot_shift_plan(template: CircuitTemplate):
    """(slot, delta, weight) triples covering every parameter once."""
    controlled = {}
    for g in template.gate_program:
        if g.slot is not None:
            controlled[g.slot] = g.kind in CONTROLLED_KINDS
    plan = []
    for slot in range(template.param_count):
        if controlled[slot]:
            plan += [(slot, np.pi / 2, _D_PLUS), (slot, -np.pi / 2, -_D_PLUS),
                     (slot, 3 * np.pi / 2, -_D_MINUS),
                     (slot, -3 * np.pi / 2, _D_MINUS)]
        else:
            plan += [(slot, np.pi / 2, 0.5), (slot, -np.pi / 2, -0.5)]
    return plan


def _loss_and_gradient(template: CircuitTemplate, params: np.ndarray,
                       xy: np.ndarray, labels: np.ndarray,
                       loss: str) -> tuple[float, np.ndarray]:
    plan = _slot_shift_plan(template)
    n_cfg = len(plan) + 1
    batch = len(xy)
    mats = np.tile(params, (n_cfg, 1))
    for i, (slot, delta, _) in enumerate(plan):
        mats[i + 1, slot] += delta
    big_params = np.repeat(mats, batch, axis=0)
    # the embedding depends on the data point only, so embed the batch once
    # and tile the resulting states across all shift configurations
    embedded = run_embedding_batch(xy)
    big_amps = np.tile(embedded, (n_cfg, 1))
    values = _expectations(run_template_batch(
        template, big_params, big_amps)).reshape(n_cfg, batch)
    v0 = values[0]
    dldv = _loss_deriv(loss, v0, labels)
    grad = np.zeros(template.param_count)
    for i, (slot, _, weight) in enumerate(plan):
        grad[slot] += weight * float(dldv @ values[i + 1])
    return _loss_value(loss, v0, labels), grad


def gradient(template: CircuitTemplate, params, xy, labels,
             loss: str = "l2", shots: int | None = None) -> np.ndarray:
    """Exact gradient of the batch loss w.r.t. every template parameter."""
    if shots is not None:
        raise ValueError("gradients are analytic-only; shots mode is "
                         "unsupported")
    params = np.asarray(params, dtype=float)
    xy = np.atleast_2d(np.asarray(xy, dtype=float))
    labels = np.asarray(labels, dtype=float)
    _, grad = _loss_and_gradient(template, params, xy, labels, loss)
    return grad


# ---------------------------------------------------------------------------
# optimizers
# ---------------------------------------------------------------------------

class Adam:
    def __init__(self, lr: float, beta1: float = 0.9, beta2: float = 0.999,
                 eps: float = 1e-8):
        self.lr, self.beta1, self.beta2, self.eps = lr, beta1, beta2, eps
        self.t = 0
        self.m = None
        self.v = None

    def step(self, params: np.ndarray, grad: np.ndarray) -> np.ndarray:
        if self.m is None:
            self.m = np.zeros_like(params)
            self.v = np.zeros_like(params)
        self.t += 1
        self.m = self.beta1 * self.m + (1 - self.beta1) * grad
        self.v = self.beta2 * self.v + (1 - self.beta2) * grad ** 2
        m_hat = self.m / (1 - self.beta1 ** self.t)
        v_hat = self.v / (1 - self.beta2 ** self.t)
        return params - self.lr * m_hat / (np.sqrt(v_hat) + self.eps)


class GradientDescent:
    def __init__(self, lr: float):
        self.lr = lr

    def step(self, params: np.ndarray, grad: np.ndarray) -> np.ndarray:
        return params - self.lr * grad


def _make_optimizer(config: TrainConfig):
    if config.optimizer == "adam":
        return Adam(config.lr)
    return GradientDescent(config.lr)


# ---------------------------------------------------------------------------
# training loop
# ---------------------------------------------------------------------------

def train(config: TrainConfig, dataset: Dataset) -> RunRecord:
    """Minibatch-train the classifier; deterministic given the config.

    Parameters start i.i.d. standard normal from ``init_seed``.  Training
    stops early once the epoch loss (mean per sample) improves by less
    than 1e-4 for 5 consecutive epochs.
    """
    if config.dataset_id != dataset.dataset_id:
        raise ValueError(f"config is for dataset {config.dataset_id!r}, "
                         f"got {dataset.dataset_id!r}")
    if config.shots is not None:
        raise ValueError("training runs analytically; shots mode is "
                         "unsupported")
    template = CircuitTemplate(config.template_id, config.layers)
    init_rng, shuffle_rng = (np.random.default_rng(s) for s in
                             np.random.SeedSequence(config.init_seed).spawn(2))
    params = init_rng.standard_normal(template.param_count)
    optimizer = _make_optimizer(config)

    train_set, test_set, val_set = (dataset.subset(s)
                                    for s in ("train", "test", "val"))
    n_train = len(train_set)
    train_labels = train_set.labels.astype(float)
    loss_trace: list[float] = []
    prev_loss = None
    stall = 0
    for _ in range(config.epochs):
        order = shuffle_rng.permutation(n_train)
        for start in range(0, n_train, config.batch_size):
            idx = order[start:start + config.batch_size]
            _, grad = _loss_and_gradient(
                template, params, train_set.xy[idx], train_labels[idx],
                config.loss)
            params = optimizer.step(params, grad)
        # mean per-sample training loss at the end of the epoch
        values = predict_values(template, params, train_set.xy)
        epoch_loss = _loss_value(config.loss, values, train_labels) / n_train
        loss_trace.append(epoch_loss)
        if prev_loss is not None and prev_loss - epoch_loss < EARLY_STOP_DELTA:
            stall += 1
            if stall >= EARLY_STOP_PATIENCE:
                break
        else:
            stall = 0
        prev_loss = epoch_loss

    return RunRecord(
        config=config,
        final_params=params,
        loss_trace=loss_trace,
        acc_train=accuracy(template, params, train_set),
        acc_test=accuracy(template, params, test_set),
        acc_val=accuracy(template, params, val_set),
    )
