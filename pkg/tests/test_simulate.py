import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from spinchain import gates, oracle, simulate
from spinchain.chains import ChainSpec, single_particle_hamiltonian
from spinchain.linalg import expm_hermitian, random_hermitian
from spinchain.simulate import Circuit, CompressedEvolution, FockBasisState


def test_circuit_validation():
    c = Circuit(4)
    with pytest.raises(simulate.OverlappingLayer):
        c.add_layer([(1, np.eye(4)), (2, np.eye(4))])
    with pytest.raises(IndexError):
        c.add_layer([(4, np.eye(4))])
    with pytest.raises(ValueError):
        Circuit(1)


def test_fock_state_validation():
    assert FockBasisState((1, 3)).m == 2
    with pytest.raises(ValueError):
        FockBasisState((3, 1))
    with pytest.raises(IndexError):
        FockBasisState((0,))


def test_compile_rejects_non_admissible_with_position():
    c = Circuit(3)
    c.add_layer([(2, gates.SWAP)])
    with pytest.raises(simulate.NotAdmissibleGate) as err:
        simulate.compile_circuit(c)
    assert err.value.position == 2 and err.value.gate_class is gates.GateClass.NUMBER_PRESERVING


def test_signed_swap_moves_excitation():
    c = Circuit(3)
    c.add_layer([(1, gates.SIGNED_SWAP)])
    c.add_layer([(2, gates.SIGNED_SWAP)])
    e = simulate.compile_circuit(c)
    assert np.allclose(simulate.single_site_probabilities(1, e), [0, 0, 1])


def test_empty_circuit_is_identity():
    e = simulate.compile_circuit(Circuit(5))
    assert np.array_equal(e.U, np.eye(5)) and e.vacuum_phase == 1


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 6), st.integers(1, 8), st.integers(0, 2**32 - 1))
def test_restricted_dense_circuit_matches_compressed(n, depth, seed):
    c = simulate.random_circuit(n, depth, np.random.default_rng(seed))
    e = simulate.compile_circuit(c)
    block = oracle.restrict_single_excitation(oracle.circuit_unitary_dense(c))
    assert np.max(np.abs(block - e.vacuum_phase * e.U.conj().T)) < 1e-12


def test_composition_order(rng):
    a = simulate.random_circuit(4, 3, rng)
    b = simulate.random_circuit(4, 3, rng)
    both = simulate.compile_circuit(a.then(b))
    chained = simulate.compile_circuit(a).then(simulate.compile_circuit(b))
    assert np.allclose(both.U, chained.U) and np.isclose(both.vacuum_phase, chained.vacuum_phase)


def test_power(rng):
    e = simulate.compile_circuit(simulate.random_circuit(4, 2, rng))
    assert np.allclose(e.power(3).U, e.U @ e.U @ e.U)
    assert np.allclose(e.power(0).U, np.eye(4))


def test_compile_hamiltonian_conventions(rng):
    h = random_hermitian(5, rng)
    e = simulate.compile_hamiltonian(h, 0.7)
    assert np.allclose(e.U.conj().T, expm_hermitian(h, 0.7))
    psi = np.zeros(5, dtype=complex)
    psi[0] = 1
    assert np.allclose(simulate.evolve_single(psi, e), expm_hermitian(h, 0.7)[:, 0])


def test_compile_hamiltonian_from_spec_matches_dense(rng):
    spec = ChainSpec.random(4, rng, "linear")
    e = simulate.compile_hamiltonian(spec, 1.2)
    big = expm_hermitian(oracle.dense_hamiltonian(spec), 1.2)
    start = oracle.DenseState.occupied(4, (1, 2))
    dense = oracle.DenseState(4, big @ start.amplitudes)
    assert abs(simulate.multi_amplitude((1, 2), (2, 4), e) - dense.amplitudes[oracle.occupation_index((2, 4), 4)]) < 1e-12


def test_probabilities_sum_to_particle_number(rng):
    e = simulate.compile_circuit(simulate.random_circuit(7, 6, rng))
    assert simulate.single_site_probabilities(3, e).sum() == pytest.approx(1)
    assert simulate.multi_site_probabilities(FockBasisState((1, 4, 6)), e).sum() == pytest.approx(3)
    assert simulate.check_unitary(e) < 1e-12


def test_multi_amplitude_particle_mismatch(rng):
    e = simulate.compile_circuit(simulate.random_circuit(4, 2, rng))
    with pytest.raises(simulate.UnequalParticleNumber):
        simulate.multi_amplitude((1, 2), (3,), e)


def test_evolve_single_dimension_check(rng):
    e = simulate.compile_circuit(simulate.random_circuit(4, 2, rng))
    with pytest.raises(ValueError):
        simulate.evolve_single(np.ones(3), e)


def test_hamiltonian_particle_sectors(rng):
    spec = ChainSpec.random(5, rng, "linear")
    h = single_particle_hamiltonian(spec)
    e = simulate.compile_hamiltonian(h, 0.4, spec.field_offset)
    assert np.isclose(e.vacuum_phase, np.exp(-1j * spec.field_offset * 0.4))


def test_compressed_evolution_validation():
    with pytest.raises(ValueError):
        CompressedEvolution(np.ones((2, 3)))
