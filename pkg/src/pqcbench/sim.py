"""Dense statevector simulation for small qubit registers.

Qubit 0 is the most significant bit of the computational basis index, so
for 4 qubits the basis state |q0 q1 q2 q3> has index 8*q0 + 4*q1 + 2*q2 + q3.
Rotation gates follow the half-angle convention R_P(theta) = exp(-i*theta*P/2);
controlled rotations act on the target when the control qubit is |1>.

Gates are applied by stride iteration on the amplitude array, never by
building the 2^n x 2^n matrix.  All kernels accept a batch of states of
shape (batch, 2**n) so that parameter sweeps amortize the numpy dispatch
overhead; the public single-state operations wrap a batch of one.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import _fast

MAX_QUBITS = 12

SINGLE_KINDS = frozenset({"H", "X", "RX", "RY", "RZ"})
CONTROLLED_KINDS = frozenset({"CX", "CZ", "CRX", "CRZ"})
ROTATION_KINDS = frozenset({"RX", "RY", "RZ", "CRX", "CRZ"})
GATE_KINDS = SINGLE_KINDS | CONTROLLED_KINDS

_INVSQRT2 = 1.0 / np.sqrt(2.0)


@dataclass(frozen=True)
class Gate:
    """One gate of the supported set, with optional control and angle."""

    kind: str
    target: int
    control: int | None = None
    angle: float | None = None

    def __post_init__(self):
        if self.kind not in GATE_KINDS:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        if self.kind in CONTROLLED_KINDS:
            if self.control is None:
                raise ValueError(f"{self.kind} requires a control qubit")
            if self.control == self.target:
                raise ValueError(f"{self.kind} control == target ({self.target})")
        elif self.control is not None:
            raise ValueError(f"{self.kind} takes no control qubit")
        if self.kind in ROTATION_KINDS:
            if self.angle is None:
                raise ValueError(f"{self.kind} requires an angle")
        elif self.angle is not None:
            raise ValueError(f"{self.kind} takes no angle")


@dataclass
class Statevector:
    """Pure state of ``n_qubits`` qubits as 2**n complex amplitudes."""

    n_qubits: int
    amplitudes: np.ndarray = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        if not 1 <= self.n_qubits <= MAX_QUBITS:
            raise ValueError(
                f"n_qubits must be in [1, {MAX_QUBITS}], got {self.n_qubits}")
        if self.amplitudes is None:
            amps = np.zeros(1 << self.n_qubits, dtype=np.complex128)
            amps[0] = 1.0
            self.amplitudes = amps
        else:
            self.amplitudes = np.asarray(self.amplitudes, dtype=np.complex128)
            if self.amplitudes.shape != (1 << self.n_qubits,):
                raise ValueError(
                    f"expected {1 << self.n_qubits} amplitudes, "
                    f"got shape {self.amplitudes.shape}")

    def copy(self) -> "Statevector":
        return Statevector(self.n_qubits, self.amplitudes.copy())


def zero_state(n_qubits: int) -> Statevector:
    """|0...0> on ``n_qubits`` qubits (1 <= n_qubits <= 12)."""
    return Statevector(n_qubits)


# ---------------------------------------------------------------------------
# batched kernels
# ---------------------------------------------------------------------------

def zero_state_batch(n_qubits: int, batch: int) -> np.ndarray:
    amps = np.zeros((batch, 1 << n_qubits), dtype=np.complex128)
    amps[:, 0] = 1.0
    return amps


def _single_view(amps: np.ndarray, n: int, q: int) -> np.ndarray:
    """View (batch, pre, 2, post) exposing qubit q."""
    batch = amps.shape[0]
    return amps.reshape(batch, 1 << q, 2, 1 << (n - 1 - q))


def _pair_view(amps: np.ndarray, n: int, a: int, b: int) -> np.ndarray:
    """View (batch, pre, 2, mid, 2, post) exposing qubits a < b."""
    batch = amps.shape[0]
    return amps.reshape(batch, 1 << a, 2, 1 << (b - a - 1), 2, 1 << (n - 1 - b))


def _rx_elems(theta):
    c = np.cos(theta / 2)
    s = -1j * np.sin(theta / 2)
    return c, s, s, c


def _ry_elems(theta):
    c = np.cos(theta / 2)
    s = np.sin(theta / 2)
    return c, -s, s, c


def _rz_elems(theta):
    e = np.exp(-0.5j * theta)
    return e, None, None, np.conj(e)  # diagonal


_ROT_ELEMS = {"RX": _rx_elems, "RY": _ry_elems, "RZ": _rz_elems,
              "CRX": _rx_elems, "CRZ": _rz_elems}


def _shape_for(m, extra_axes: int):
    """Broadcast per-instance matrix elements over the reshaped state axes."""
    m = np.asarray(m)
    if m.ndim == 0:
        return m
    return m.reshape(m.shape[0], *([1] * extra_axes))


@lru_cache(maxsize=None)
def _pair_indices(n: int, target: int, control: int | None):
    """(i0s, i1s) basis-index pairs a gate on ``target`` mixes."""
    tbit = 1 << (n - 1 - target)
    idx = np.arange(1 << n)
    i0s = idx[(idx & tbit) == 0]
    if control is not None:
        cbit = 1 << (n - 1 - control)
        i0s = i0s[(i0s & cbit) != 0]
    return np.ascontiguousarray(i0s.astype(np.int64)), \
        np.ascontiguousarray((i0s | tbit).astype(np.int64))


_CONST_ELEMS = {"H": (_INVSQRT2, _INVSQRT2, _INVSQRT2, -_INVSQRT2),
                "X": (0, 1, 1, 0), "CX": (0, 1, 1, 0), "CZ": (1, 0, 0, -1)}


@lru_cache(maxsize=64)
def _const_elem_arrays(kind: str, batch: int):
    return tuple(np.full(batch, v, dtype=np.complex128)
                 for v in _CONST_ELEMS[kind])


def _gate_elems(kind: str, theta, batch: int):
    """2x2 matrix entries as per-instance complex arrays."""
    if kind in ROTATION_KINDS:
        th = np.broadcast_to(np.asarray(theta, dtype=float), (batch,))
        m00, m01, m10, m11 = _ROT_ELEMS[kind](th)
        if m01 is None:  # diagonal (RZ family)
            m01 = m10 = np.zeros(batch)
        return (np.ascontiguousarray(m00, dtype=np.complex128),
                np.ascontiguousarray(m01, dtype=np.complex128),
                np.ascontiguousarray(m10, dtype=np.complex128),
                np.ascontiguousarray(m11, dtype=np.complex128))
    return _const_elem_arrays(kind, batch)


def apply_gate_batch(amps: np.ndarray, n: int, kind: str, target: int,
                     control: int | None = None, theta=None) -> None:
    """Apply one gate in place to a (batch, 2**n) amplitude array.

    ``theta`` may be a scalar or a length-batch array (one angle per
    instance), which is how parameter sweeps run all instances at once.
    """
    if kind not in GATE_KINDS:
        raise ValueError(f"unknown gate kind {kind!r}")
    if not 0 <= target < n:
        raise IndexError(f"target qubit {target} out of range for n={n}")
    if control is not None:
        if kind not in CONTROLLED_KINDS:
            raise ValueError(f"{kind} takes no control qubit")
        if not 0 <= control < n:
            raise IndexError(f"control qubit {control} out of range for n={n}")
        if control == target:
            raise ValueError("control == target")
    elif kind in CONTROLLED_KINDS:
        raise ValueError(f"{kind} requires a control qubit")

    if _fast.HAVE_FAST and amps.flags.c_contiguous:
        i0s, i1s = _pair_indices(n, target, control)
        m00, m01, m10, m11 = _gate_elems(kind, theta, amps.shape[0])
        _fast.apply_pairs(amps, i0s, i1s, m00, m01, m10, m11)
        return
    _apply_gate_batch_numpy(amps, n, kind, target, control, theta)


def _apply_gate_batch_numpy(amps: np.ndarray, n: int, kind: str, target: int,
                            control: int | None = None, theta=None) -> None:
    """Reference numpy implementation of ``apply_gate_batch``."""
    if kind in SINGLE_KINDS:
        v = _single_view(amps, n, target)
        if kind == "H":
            x0 = v[:, :, 0, :].copy()
            x1 = v[:, :, 1, :]
            v[:, :, 0, :] = _INVSQRT2 * (x0 + x1)
            v[:, :, 1, :] = _INVSQRT2 * (x0 - x1)
        elif kind == "X":
            x0 = v[:, :, 0, :].copy()
            v[:, :, 0, :] = v[:, :, 1, :]
            v[:, :, 1, :] = x0
        elif kind == "RZ":
            e, _, _, ec = _rz_elems(np.asarray(theta))
            v[:, :, 0, :] *= _shape_for(e, 2)
            v[:, :, 1, :] *= _shape_for(ec, 2)
        else:  # RX, RY
            m00, m01, m10, m11 = (_shape_for(m, 2)
                                  for m in _ROT_ELEMS[kind](np.asarray(theta)))
            x0 = v[:, :, 0, :].copy()
            x1 = v[:, :, 1, :]
            v[:, :, 0, :] = m00 * x0 + m01 * x1
            v[:, :, 1, :] = m10 * x0 + m11 * x1
        return

    if control is None:
        raise ValueError(f"{kind} requires a control qubit")
    if not 0 <= control < n:
        raise IndexError(f"control qubit {control} out of range for n={n}")
    if control == target:
        raise ValueError("control == target")

    lo, hi = sorted((control, target))
    v = _pair_view(amps, n, lo, hi)
    # fix the control axis at 1; the remaining 2-axis is the target
    if control == lo:
        sub = v[:, :, 1, :, :, :]          # (batch, pre, mid, 2, post)
        tgt_axis = 3
    else:
        sub = v[:, :, :, :, 1, :]          # (batch, pre, 2, mid, post)
        tgt_axis = 2
    ix0 = (slice(None),) * tgt_axis + (0,)
    ix1 = (slice(None),) * tgt_axis + (1,)
    if kind == "CX":
        tmp = sub[ix0].copy()
        sub[ix0] = sub[ix1]
        sub[ix1] = tmp
    elif kind == "CZ":
        sub[ix1] *= -1.0
    elif kind == "CRZ":
        e, _, _, ec = _rz_elems(np.asarray(theta))
        sub[ix0] *= _shape_for(e, 3)
        sub[ix1] *= _shape_for(ec, 3)
    elif kind == "CRX":
        m00, m01, m10, m11 = (_shape_for(m, 3)
                              for m in _rx_elems(np.asarray(theta)))
        x0 = sub[ix0].copy()
        x1 = sub[ix1]
        sub[ix0] = m00 * x0 + m01 * x1
        sub[ix1] = m10 * x0 + m11 * x1
    else:
        raise ValueError(f"unknown gate kind {kind!r}")


def apply_gate(state: Statevector, gate: Gate) -> Statevector:
    """Return the state transformed by ``gate`` (input is not modified)."""
    amps = state.amplitudes[None, :].copy()
    apply_gate_batch(amps, state.n_qubits, gate.kind, gate.target,
                     gate.control, gate.angle)
    return Statevector(state.n_qubits, amps[0])


def apply_program(state: Statevector, gates) -> Statevector:
    """Apply a sequence of gates to ``state`` and return the result."""
    amps = state.amplitudes[None, :].copy()
    for g in gates:
        apply_gate_batch(amps, state.n_qubits, g.kind, g.target,
                         g.control, g.angle)
    return Statevector(state.n_qubits, amps[0])


# ---------------------------------------------------------------------------
# measurements / derived quantities
# ---------------------------------------------------------------------------

def fidelity(a: Statevector, b: Statevector) -> float:
    """|<a|b>|^2 of two states on the same register."""
    if a.n_qubits != b.n_qubits:
        raise ValueError(
            f"dimension mismatch: {a.n_qubits} vs {b.n_qubits} qubits")
    return float(np.abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2)


def fidelity_batch(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Row-wise |<a_i|b_i>|^2 for (batch, dim) amplitude arrays."""
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    return np.abs(np.einsum("mi,mi->m", a.conj(), b)) ** 2


def probabilities(state: Statevector) -> np.ndarray:
    """Measurement probabilities |amplitude_i|^2 in the computational basis."""
    return np.abs(state.amplitudes) ** 2


def reduced_purity(state: Statevector, qubit: int) -> float:
    """Tr(rho_q^2) of the single-qubit reduced density matrix."""
    return float(reduced_purity_batch(state.amplitudes[None, :],
                                      state.n_qubits, qubit)[0])


def reduced_purity_batch(amps: np.ndarray, n: int, qubit: int) -> np.ndarray:
    if not 0 <= qubit < n:
        raise IndexError(f"qubit {qubit} out of range for n={n}")
    batch = amps.shape[0]
    t = amps.reshape((batch,) + (2,) * n)
    m = np.moveaxis(t, 1 + qubit, 1).reshape(batch, 2, -1)
    rho = np.einsum("mik,mjk->mij", m, m.conj())
    return np.einsum("mij,mij->m", rho, rho.conj()).real
