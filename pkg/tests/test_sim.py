import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from pqcbench.sim import (Gate, Statevector, apply_gate, apply_gate_batch,
                          apply_program, fidelity, probabilities,
                          reduced_purity, zero_state,
                          _apply_gate_batch_numpy)

# ---------------------------------------------------------------------------
# dense references (built with explicit Kronecker products)
# ---------------------------------------------------------------------------

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Z = np.diag([1.0, -1.0]).astype(complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)


def RX(t):
    return np.array([[np.cos(t / 2), -1j * np.sin(t / 2)],
                     [-1j * np.sin(t / 2), np.cos(t / 2)]])


def RY(t):
    return np.array([[np.cos(t / 2), -np.sin(t / 2)],
                     [np.sin(t / 2), np.cos(t / 2)]], dtype=complex)


def RZ(t):
    return np.diag([np.exp(-0.5j * t), np.exp(0.5j * t)])


def kron_all(mats):
    out = np.array([[1.0 + 0j]])
    for m in mats:
        out = np.kron(out, m)
    return out


def dense_single(n, q, U):
    return kron_all([U if i == q else I2 for i in range(n)])


def dense_controlled(n, c, t, U):
    P0 = np.diag([1.0, 0.0]).astype(complex)
    P1 = np.diag([0.0, 1.0]).astype(complex)
    return (kron_all([P0 if i == c else I2 for i in range(n)])
            + kron_all([P1 if i == c else (U if i == t else I2)
                        for i in range(n)]))


def random_state(rng, n):
    v = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    return Statevector(n, v / np.linalg.norm(v))


# ---------------------------------------------------------------------------
# constructors and validation
# ---------------------------------------------------------------------------

def test_zero_state_single_qubit():
    assert_allclose(zero_state(1).amplitudes, [1, 0])


def test_zero_state_four_qubits():
    s = zero_state(4)
    assert s.amplitudes.shape == (16,)
    assert s.amplitudes[0] == 1.0
    assert np.all(s.amplitudes[1:] == 0.0)


def test_zero_state_bounds():
    with pytest.raises(ValueError):
        zero_state(13)
    with pytest.raises(ValueError):
        zero_state(0)


def test_statevector_shape_validation():
    with pytest.raises(ValueError):
        Statevector(2, np.ones(3))


def test_gate_validation():
    with pytest.raises(ValueError):
        Gate("CX", 1, control=1)          # control == target
    with pytest.raises(ValueError):
        Gate("RX", 0)                     # missing angle
    with pytest.raises(ValueError):
        Gate("H", 0, angle=1.0)           # angle on a fixed gate
    with pytest.raises(ValueError):
        Gate("H", 0, control=1)           # control on a single-qubit gate
    with pytest.raises(ValueError):
        Gate("FOO", 0)


# ---------------------------------------------------------------------------
# single-gate behaviour
# ---------------------------------------------------------------------------

def test_rx_pi_flips():
    s = apply_gate(zero_state(1), Gate("RX", 0, angle=np.pi))
    assert abs(s.amplitudes[1]) ** 2 == pytest.approx(1.0, abs=1e-12)
    assert_allclose(s.amplitudes, [0, -1j], atol=1e-12)


def test_h_involutory():
    s = zero_state(1)
    s2 = apply_program(s, [Gate("H", 0), Gate("H", 0)])
    assert_allclose(s2.amplitudes, s.amplitudes, atol=1e-12)


def test_bell_preparation():
    s = apply_program(zero_state(2), [Gate("H", 0), Gate("CX", 1, control=0)])
    assert_allclose(probabilities(s), [0.5, 0, 0, 0.5], atol=1e-12)


def test_msb_ordering():
    # qubit 0 is the most significant bit: X on qubit 0 of |000> -> index 4
    s = apply_gate(zero_state(3), Gate("X", 0))
    assert s.amplitudes[4] == 1.0


def test_gate_index_bounds():
    with pytest.raises(IndexError):
        apply_gate(zero_state(2), Gate("X", 2))
    with pytest.raises(IndexError):
        apply_gate(zero_state(2), Gate("CX", 0, control=3))


def test_gates_match_dense_references():
    rng = np.random.default_rng(123)
    n = 4
    cases = 0
    for _ in range(200):
        s = random_state(rng, n)
        q = int(rng.integers(0, n))
        c = int(rng.integers(0, n - 1))
        c = c + 1 if c >= q else c
        th = float(rng.uniform(0, 2 * np.pi))
        kind = str(rng.choice(["H", "X", "RX", "RY", "RZ", "CX", "CZ",
                               "CRX", "CRZ"]))
        if kind in ("H", "X"):
            g = Gate(kind, q)
            U = dense_single(n, q, {"H": H, "X": X}[kind])
        elif kind in ("RX", "RY", "RZ"):
            g = Gate(kind, q, angle=th)
            U = dense_single(n, q, {"RX": RX, "RY": RY, "RZ": RZ}[kind](th))
        else:
            ang = th if kind in ("CRX", "CRZ") else None
            g = Gate(kind, q, control=c, angle=ang)
            sub = ({"CX": X, "CZ": Z}[kind] if kind in ("CX", "CZ")
                   else {"CRX": RX, "CRZ": RZ}[kind](th))
            U = dense_controlled(n, c, q, sub)
        out = apply_gate(s, g)
        assert_allclose(out.amplitudes, U @ s.amplitudes, atol=1e-12)
        cases += 1
    assert cases == 200


def test_fast_path_matches_numpy_reference():
    rng = np.random.default_rng(7)
    amps = rng.normal(size=(64, 16)) + 1j * rng.normal(size=(64, 16))
    amps = np.ascontiguousarray(amps)
    th = rng.uniform(0, 2 * np.pi, 64)
    for kind, tgt, ctl in [("RX", 1, None), ("RY", 3, None), ("RZ", 0, None),
                           ("H", 2, None), ("X", 0, None), ("CX", 2, 0),
                           ("CX", 0, 2), ("CZ", 1, 3), ("CRX", 3, 1),
                           ("CRX", 1, 3), ("CRZ", 0, 2), ("CRZ", 2, 0)]:
        a1 = amps.copy()
        a2 = amps.copy()
        t = th if kind in ("RX", "RY", "RZ", "CRX", "CRZ") else None
        apply_gate_batch(a1, 4, kind, tgt, ctl, t)
        _apply_gate_batch_numpy(a2, 4, kind, tgt, ctl, t)
        assert_allclose(a1, a2, atol=1e-13)


# ---------------------------------------------------------------------------
# fidelity / probabilities / purity
# ---------------------------------------------------------------------------

def test_fidelity_self():
    s = random_state(np.random.default_rng(0), 4)
    assert fidelity(s, s) == pytest.approx(1.0, abs=1e-12)


def test_fidelity_orthogonal_basis_states():
    a = zero_state(4)
    b = apply_gate(zero_state(4), Gate("X", 3))  # |0001>
    assert fidelity(a, b) == 0.0


def test_fidelity_plus_zero():
    plus = apply_gate(zero_state(1), Gate("H", 0))
    assert fidelity(plus, zero_state(1)) == pytest.approx(0.5, abs=1e-12)


def test_fidelity_symmetric_and_bounded():
    rng = np.random.default_rng(5)
    for _ in range(25):
        a, b = random_state(rng, 3), random_state(rng, 3)
        assert fidelity(a, b) == fidelity(b, a)
        assert -1e-12 <= fidelity(a, b) <= 1.0 + 1e-12


def test_fidelity_dimension_mismatch():
    with pytest.raises(ValueError):
        fidelity(zero_state(2), zero_state(3))


def test_probabilities_examples():
    assert_allclose(probabilities(zero_state(1)), [1, 0])
    plus = apply_gate(zero_state(1), Gate("H", 0))
    assert_allclose(probabilities(plus), [0.5, 0.5], atol=1e-12)


def test_reduced_purity_product_state():
    s = apply_program(zero_state(4), [Gate("X", 1), Gate("X", 3)])  # |0101>
    for q in range(4):
        assert reduced_purity(s, q) == pytest.approx(1.0, abs=1e-12)


def brute_force_purity(state, qubit):
    """Independent oracle: explicit partial trace of the full density matrix."""
    n = state.n_qubits
    rho = np.outer(state.amplitudes, state.amplitudes.conj())
    rho = rho.reshape((2,) * (2 * n))
    rows = [chr(97 + i) for i in range(n)]
    cols = [rows[i] if i != qubit else chr(97 + n + i) for i in range(n)]
    spec = "".join(rows) + "".join(cols) + "->" + rows[qubit] + cols[qubit]
    rho_k = np.einsum(spec, rho)
    return float(np.real(np.trace(rho_k @ rho_k)))


def test_reduced_purity_bell_pair_derived():
    # Bell on qubits 0,1 tensor |00>: brute-force partial trace gives 1/2
    s = apply_program(zero_state(4), [Gate("H", 0), Gate("CX", 1, control=0)])
    assert reduced_purity(s, 0) == pytest.approx(0.5, abs=1e-12)
    assert reduced_purity(s, 0) == pytest.approx(brute_force_purity(s, 0),
                                                 abs=1e-12)
    assert reduced_purity(s, 2) == pytest.approx(1.0, abs=1e-12)


def test_reduced_purity_ghz_derived():
    s = apply_program(zero_state(4), [Gate("H", 0), Gate("CX", 1, control=0),
                                      Gate("CX", 2, control=1),
                                      Gate("CX", 3, control=2)])
    assert reduced_purity(s, 2) == pytest.approx(0.5, abs=1e-12)
    assert reduced_purity(s, 2) == pytest.approx(brute_force_purity(s, 2),
                                                 abs=1e-12)


def test_reduced_purity_matches_brute_force_random():
    rng = np.random.default_rng(11)
    for _ in range(20):
        s = random_state(rng, 4)
        q = int(rng.integers(0, 4))
        assert reduced_purity(s, q) == pytest.approx(
            brute_force_purity(s, q), abs=1e-12)


def test_reduced_purity_bounds_random():
    rng = np.random.default_rng(13)
    for _ in range(50):
        s = random_state(rng, 4)
        for q in range(4):
            assert 0.5 - 1e-12 <= reduced_purity(s, q) <= 1.0 + 1e-12


def test_reduced_purity_index_error():
    with pytest.raises(IndexError):
        reduced_purity(zero_state(3), 3)


# ---------------------------------------------------------------------------
# invariants
# ---------------------------------------------------------------------------

def test_norm_preservation_random_sequences():
    rng = np.random.default_rng(42)
    for _ in range(1000):
        n = int(rng.integers(2, 5))
        s = random_state(rng, n)
        for _ in range(int(rng.integers(1, 6))):
            q = int(rng.integers(0, n))
            c = int(rng.integers(0, n - 1))
            c = c + 1 if c >= q else c
            kind = str(rng.choice(["H", "X", "RX", "RY", "RZ", "CX", "CZ",
                                   "CRX", "CRZ"]))
            ang = (float(rng.uniform(0, 2 * np.pi))
                   if kind in ("RX", "RY", "RZ", "CRX", "CRZ") else None)
            ctl = c if kind in ("CX", "CZ", "CRX", "CRZ") else None
            s = apply_gate(s, Gate(kind, q, control=ctl, angle=ang))
        assert abs(np.linalg.norm(s.amplitudes) - 1.0) < 1e-10


@settings(max_examples=60, deadline=None)
@given(kind=st.sampled_from(["RX", "RY", "RZ", "CRX", "CRZ"]),
       theta=st.floats(-10, 10, allow_nan=False),
       seed=st.integers(0, 2 ** 31))
def test_rotation_round_trip(kind, theta, seed):
    s = random_state(np.random.default_rng(seed), 3)
    ctl = 1 if kind in ("CRX", "CRZ") else None
    fwd = Gate(kind, 0, control=ctl, angle=theta)
    back = Gate(kind, 0, control=ctl, angle=-theta)
    out = apply_gate(apply_gate(s, fwd), back)
    assert np.max(np.abs(out.amplitudes - s.amplitudes)) < 1e-12
