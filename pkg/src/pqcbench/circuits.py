"""Embedding circuit and the catalog of 19 four-qubit circuit templates.

The embedding maps two features in [0, 1] onto four qubits replicatively
(feature 0 on qubits 0 and 2, feature 1 on qubits 1 and 3) with a single
data-dependent RX per qubit, followed by a fixed RY(pi/4), RZ(pi/4) tilt
so that the embedded arc projects non-degenerately onto every
computational basis.

Template gate programs are loaded from ``data/templates.csv`` (columns
template_id, position, kind, target, control, slot), the checked-in
transcription of the template diagrams.  A template with L layers is the
1-layer program repeated L times with fresh parameter slots.

Layer stacking note: templates 2, 9, 10, 11, 12, and 15 contain fixed
(non-parameterized) entangling or Hadamard gates, so a second layer at
zero angles is not the identity for them; all other templates reduce to
the 1-layer circuit when the added layer's parameters are zero.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

import numpy as np

from .sim import (Gate, Statevector, apply_gate_batch, zero_state_batch,
                  ROTATION_KINDS, CONTROLLED_KINDS, GATE_KINDS)

N_QUBITS = 4
TEMPLATE_IDS = tuple(range(1, 20))
TILT_ANGLE = np.pi / 4

# fixed non-parameterized gates in the layer body break zero-angle stacking
NON_STACKING_TEMPLATES = frozenset({2, 9, 10, 11, 12, 15})


@dataclass(frozen=True)
class SymbolicGate:
    """Catalog entry: a gate whose angle, if any, is a parameter slot."""

    kind: str
    target: int
    control: int | None
    slot: int | None


@dataclass(frozen=True)
class EmbeddingSpec:
    """Feature-to-angle map of the data embedding."""

    tilt_angle: float = TILT_ANGLE

    def feature_angle(self, f: float) -> float:
        """Linear map [0, 1] -> [0, pi] covering the |0> -> |1> arc once."""
        return np.pi * f


DEFAULT_EMBEDDING = EmbeddingSpec()


@dataclass(frozen=True)
class CircuitTemplate:
    """A catalog template at a chosen layer count."""

    template_id: int
    layers: int
    n_qubits: int = N_QUBITS

    def __post_init__(self):
        if self.template_id not in TEMPLATE_IDS:
            raise KeyError(f"unknown template id {self.template_id}")
        if self.layers < 1:
            raise ValueError(f"layers must be >= 1, got {self.layers}")

    @property
    def gate_program(self) -> tuple[SymbolicGate, ...]:
        return _layered_program(self.template_id, self.layers)

    @property
    def param_count(self) -> int:
        return param_count(self.template_id, self.layers)


@lru_cache(maxsize=1)
def _load_catalog() -> dict[int, tuple[SymbolicGate, ...]]:
    rows: dict[int, list[tuple[int, SymbolicGate]]] = {t: [] for t in TEMPLATE_IDS}
    path = resources.files("pqcbench").joinpath("data/templates.csv")
    with path.open() as f:
        for row in csv.DictReader(f):
            tid = int(row["template_id"])
            g = SymbolicGate(
                kind=row["kind"],
                target=int(row["target"]),
                control=int(row["control"]) if row["control"] else None,
                slot=int(row["slot"]) if row["slot"] else None,
            )
            if g.kind not in GATE_KINDS:
                raise ValueError(f"catalog: bad gate kind {g.kind!r}")
            if (g.slot is not None) != (g.kind in ROTATION_KINDS):
                raise ValueError(f"catalog: slot/kind mismatch on {g}")
            if (g.control is not None) != (g.kind in CONTROLLED_KINDS):
                raise ValueError(f"catalog: control/kind mismatch on {g}")
            rows[tid].append((int(row["position"]), g))
    out = {}
    for tid, entries in rows.items():
        entries.sort(key=lambda e: e[0])
        gates = [g for _, g in entries]
        slots = sorted(g.slot for g in gates if g.slot is not None)
        if slots != list(range(len(slots))):
            raise ValueError(f"catalog: template {tid} slots not contiguous")
        out[tid] = tuple(gates)
    return out


@lru_cache(maxsize=None)
def _layered_program(template_id: int, layers: int) -> tuple[SymbolicGate, ...]:
    base = _load_catalog()[template_id]
    per_layer = sum(1 for g in base if g.slot is not None)
    prog = []
    for layer in range(layers):
        off = layer * per_layer
        for g in base:
            prog.append(SymbolicGate(
                g.kind, g.target, g.control,
                None if g.slot is None else g.slot + off))
    return tuple(prog)


def param_count(template_id: int, layers: int = 1) -> int:
    """Number of parameter slots of a template at the given layer count."""
    if template_id not in TEMPLATE_IDS:
        raise KeyError(f"unknown template id {template_id}")
    if layers < 1:
        raise ValueError(f"layers must be >= 1, got {layers}")
    base = _load_catalog()[template_id]
    return layers * sum(1 for g in base if g.slot is not None)


def entangler_count(template_id: int, layers: int = 1) -> int:
    """Number of two-qubit gates of a template at the given layer count."""
    base = _load_catalog()[template_id]
    return layers * sum(1 for g in base if g.kind in CONTROLLED_KINDS)


def embedding_program(features) -> list[Gate]:
    """Gate list embedding two normalized features onto four qubits."""
    f = np.asarray(features, dtype=float)
    if f.shape != (2,):
        raise ValueError(f"expected 2 features, got shape {f.shape}")
    if np.any(f < 0.0) or np.any(f > 1.0):
        raise ValueError(f"features must lie in [0, 1], got {f.tolist()}")
    gates = []
    for q in range(N_QUBITS):
        gates.append(Gate("RX", q, angle=DEFAULT_EMBEDDING.feature_angle(f[q % 2])))
        gates.append(Gate("RY", q, angle=TILT_ANGLE))
        gates.append(Gate("RZ", q, angle=TILT_ANGLE))
    return gates


def template_program(template_id: int, layers: int, params) -> list[Gate]:
    """Concrete gate list of a template with parameter values substituted."""
    params = np.asarray(params, dtype=float)
    expected = param_count(template_id, layers)
    if params.shape != (expected,):
        raise ValueError(
            f"template {template_id} x{layers} takes {expected} parameters, "
            f"got shape {params.shape}")
    gates = []
    for g in _layered_program(template_id, layers):
        angle = None if g.slot is None else float(params[g.slot])
        gates.append(Gate(g.kind, g.target, g.control, angle))
    return gates


def run_circuit(template: CircuitTemplate, params, features) -> Statevector:
    """Embed ``features`` and run the template; returns the final state."""
    amps = run_circuit_batch(template, np.asarray(params, float)[None, :],
                             np.asarray(features, float)[None, :])
    return Statevector(template.n_qubits, amps[0])


# ---------------------------------------------------------------------------
# batched execution (one row per parameter/feature instance)
# ---------------------------------------------------------------------------

def run_template_batch(template: CircuitTemplate, params: np.ndarray,
                       amps: np.ndarray | None = None) -> np.ndarray:
    """Run the bare template on |0000> (or on ``amps``) for a parameter batch.

    Parameters
    ----------
    params : (batch, param_count) array, one parameter vector per instance.
    amps : optional (batch, 16) start states, modified in place.
    """
    params = np.asarray(params, dtype=float)
    expected = template.param_count
    if params.ndim != 2 or params.shape[1] != expected:
        raise ValueError(
            f"params must be (batch, {expected}), got {params.shape}")
    if amps is None:
        amps = zero_state_batch(template.n_qubits, params.shape[0])
    for g in template.gate_program:
        theta = None if g.slot is None else params[:, g.slot]
        apply_gate_batch(amps, template.n_qubits, g.kind, g.target,
                         g.control, theta)
    return amps


def run_embedding_batch(features: np.ndarray) -> np.ndarray:
    """States after the embedding circuit for a (batch, 2) feature array."""
    features = np.asarray(features, dtype=float)
    if features.ndim != 2 or features.shape[1] != 2:
        raise ValueError(f"features must be (batch, 2), got {features.shape}")
    if np.any(features < 0.0) or np.any(features > 1.0):
        raise ValueError("features must lie in [0, 1]")
    amps = zero_state_batch(N_QUBITS, features.shape[0])
    for q in range(N_QUBITS):
        angles = np.pi * features[:, q % 2]
        apply_gate_batch(amps, N_QUBITS, "RX", q, theta=angles)
        apply_gate_batch(amps, N_QUBITS, "RY", q, theta=TILT_ANGLE)
        apply_gate_batch(amps, N_QUBITS, "RZ", q, theta=TILT_ANGLE)
    return amps


def run_circuit_batch(template: CircuitTemplate, params: np.ndarray,
                      features: np.ndarray) -> np.ndarray:
    """Embedding followed by the template, batched over instances.

    ``params`` is (batch, param_count); ``features`` is (batch, 2) or a
    single (2,) point broadcast over the batch.
    """
    params = np.asarray(params, dtype=float)
    features = np.asarray(features, dtype=float)
    if features.ndim == 1:
        features = np.broadcast_to(features, (params.shape[0], 2))
    amps = run_embedding_batch(features)
    return run_template_batch(template, params, amps)
