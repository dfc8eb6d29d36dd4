import math

import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy.integrate import quad

from pqcbench.circuits import CircuitTemplate
from pqcbench.descriptors import (DescriptorConfig, branch_overlap_q,
                                  entangling_capability, evaluate_template,
                                  expressibility, haar_pdf,
                                  meyer_wallach_q, meyer_wallach_q_oracle,
                                  read_descriptors_csv, sample_fidelities,
                                  write_descriptors_csv)
from pqcbench.sim import Gate, Statevector, apply_program, zero_state


def ghz4():
    return apply_program(zero_state(4), [
        Gate("H", 0), Gate("CX", 1, control=0), Gate("CX", 2, control=1),
        Gate("CX", 3, control=2)])


def bell_00():
    return apply_program(zero_state(4), [Gate("H", 0),
                                         Gate("CX", 1, control=0)])


def random_states(rng, n, count):
    v = rng.normal(size=(count, 1 << n)) + 1j * rng.normal(
        size=(count, 1 << n))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    return v


# ---------------------------------------------------------------------------
# Haar density
# ---------------------------------------------------------------------------

def test_haar_pdf_at_zero():
    assert haar_pdf(0.0, 16) == 15.0


def test_haar_pdf_at_one():
    assert haar_pdf(1.0, 16) == 0.0


def test_haar_pdf_normalized():
    val, _ = quad(lambda f: haar_pdf(f, 16), 0.0, 1.0)
    assert val == pytest.approx(1.0, abs=1e-9)


def test_haar_pdf_domain_errors():
    with pytest.raises(ValueError):
        haar_pdf(1.5, 16)
    with pytest.raises(ValueError):
        haar_pdf(0.5, 1)


# ---------------------------------------------------------------------------
# fidelity sampling
# ---------------------------------------------------------------------------

def test_sample_fidelities_deterministic():
    t = CircuitTemplate(4, 1)
    cfg = DescriptorConfig(n_fidelity_pairs=200, seed=5)
    a = sample_fidelities(t, cfg)
    b = sample_fidelities(t, cfg)
    assert np.array_equal(a, b)
    assert len(a) == 200


def test_sample_fidelities_bounds():
    t = CircuitTemplate(11, 2)
    cfg = DescriptorConfig(n_fidelity_pairs=300, seed=1)
    f = sample_fidelities(t, cfg)
    assert np.all(f >= 0.0)
    assert np.all(f <= 1.0 + 1e-12)


def test_sample_fidelities_degenerate_parameter_range():
    # collapsing the parameter range pins every sampled state: fidelity 1
    t = CircuitTemplate(1, 1)
    cfg = DescriptorConfig(n_fidelity_pairs=100, seed=2,
                           param_range=(0.0, 0.0))
    assert_allclose(sample_fidelities(t, cfg), 1.0, atol=1e-12)


# ---------------------------------------------------------------------------
# expressibility
# ---------------------------------------------------------------------------

def test_expressibility_haar_oracle():
    # brute-force Haar samples must sit at the estimator floor
    rng = np.random.default_rng(0)
    a = random_states(rng, 4, 5000)
    b = random_states(rng, 4, 5000)
    fids = np.abs(np.einsum("mi,mi->m", a.conj(), b)) ** 2
    expr, expr_prime = expressibility(fids, DescriptorConfig(), dim=16)
    assert expr < 0.01
    assert expr_prime > 2.0


def test_expressibility_empty_error():
    with pytest.raises(ValueError):
        expressibility(np.array([]), DescriptorConfig(), 16)


def test_expressibility_degenerate_distribution():
    # everything in one bin that exactly carries the full Haar mass of the
    # first bin cannot happen; a point mass at 0 gives a large finite KL
    fids = np.zeros(500)
    expr, expr_prime = expressibility(fids, DescriptorConfig(), dim=16)
    assert expr > 1.0
    assert math.isfinite(expr_prime)


# ---------------------------------------------------------------------------
# entanglement statistics
# ---------------------------------------------------------------------------

def test_q_zero_on_basis_states():
    for state in (zero_state(4),
                  apply_program(zero_state(4), [Gate("X", 1), Gate("X", 2)])):
        assert meyer_wallach_q(state) == pytest.approx(0.0, abs=1e-12)
        assert branch_overlap_q(state) == pytest.approx(0.0, abs=1e-12)
        assert meyer_wallach_q_oracle(state) == pytest.approx(0.0, abs=1e-12)


def test_q_bell_pair():
    # purities (1/2, 1/2, 1, 1) -> Q = 2(1 - 3/4) = 1/2 for both statistics
    s = bell_00()
    assert meyer_wallach_q(s) == pytest.approx(0.5, abs=1e-12)
    assert branch_overlap_q(s) == pytest.approx(0.5, abs=1e-12)


def test_q_ghz():
    s = ghz4()
    assert meyer_wallach_q(s) == pytest.approx(1.0, abs=1e-9)
    assert meyer_wallach_q_oracle(s) == pytest.approx(1.0, abs=1e-9)
    assert branch_overlap_q(s) == pytest.approx(1.0, abs=1e-9)


def test_oracle_matches_purity_form_on_random_states():
    rng = np.random.default_rng(17)
    for amps in random_states(rng, 4, 200):
        s = Statevector(4, amps)
        assert meyer_wallach_q(s) == pytest.approx(
            meyer_wallach_q_oracle(s), abs=1e-9)


def test_oracle_size_limit():
    with pytest.raises(ValueError):
        meyer_wallach_q_oracle(zero_state(7))


def test_branch_overlap_dominates_meyer_wallach():
    # normalizing the branches can only increase the distance
    rng = np.random.default_rng(23)
    for amps in random_states(rng, 4, 50):
        s = Statevector(4, amps)
        assert branch_overlap_q(s) >= meyer_wallach_q(s) - 1e-12


# ---------------------------------------------------------------------------
# entangling capability
# ---------------------------------------------------------------------------

def test_ent_zero_for_template_1():
    cfg = DescriptorConfig(n_ent_samples=50, seed=0)
    assert entangling_capability(CircuitTemplate(1, 1), cfg) == 0.0
    assert entangling_capability(CircuitTemplate(1, 2), cfg) == 0.0


def test_ent_template_9_saturates():
    cfg = DescriptorConfig(n_ent_samples=500, seed=0)
    assert entangling_capability(CircuitTemplate(9, 1), cfg) == pytest.approx(
        1.0, abs=0.01)


def test_ent_template_2_reference_value():
    cfg = DescriptorConfig(seed=3)
    assert entangling_capability(CircuitTemplate(2, 1), cfg) == pytest.approx(
        0.81, abs=0.03)


def test_ent_bounds_and_determinism():
    cfg = DescriptorConfig(n_ent_samples=300, seed=11)
    for tid in (2, 5, 13, 15):
        t = CircuitTemplate(tid, 1)
        v1 = entangling_capability(t, cfg)
        v2 = entangling_capability(t, cfg)
        assert v1 == v2
        assert 0.0 <= v1 <= 1.0


def test_ent_meyer_wallach_measure_option():
    cfg = DescriptorConfig(n_ent_samples=300, seed=11)
    t = CircuitTemplate(2, 1)
    strict = entangling_capability(t, cfg, measure="meyer_wallach")
    default = entangling_capability(t, cfg)
    assert 0.0 < strict < default  # branch normalization inflates the mean


# ---------------------------------------------------------------------------
# end-to-end evaluation and CSV round-trip
# ---------------------------------------------------------------------------

def test_evaluate_template_and_csv_roundtrip(tmp_path):
    cfg = DescriptorConfig(n_fidelity_pairs=300, n_ent_samples=100, seed=4)
    results = [evaluate_template(tid, 1, cfg) for tid in (1, 9)]
    assert results[0].ent == 0.0
    assert results[0].expr_prime == pytest.approx(
        -math.log10(results[0].expr), abs=1e-12)
    path = tmp_path / "desc.csv"
    write_descriptors_csv(path, results)
    back = read_descriptors_csv(path)
    assert [r.template_id for r in back] == [1, 9]
    assert back[0].expr == pytest.approx(results[0].expr, rel=1e-12)
    assert back[1].ent == pytest.approx(results[1].ent, rel=1e-12)
