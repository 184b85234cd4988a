import numpy as np
import pytest

from spinchain import gates, oracle
from spinchain.chains import ChainSpec
from spinchain.clifford import CapacityError
from spinchain.linalg import random_unitary
from spinchain.simulate import Circuit


def test_basis_ordering():
    assert oracle.chi_index(1, 4) == 8 and oracle.chi_index(4, 4) == 1
    assert oracle.occupation_index((1, 3), 4) == 0b1010
    s = oracle.DenseState.occupied(4, (2,))
    assert np.allclose(s.single_excitation_amplitudes(), [0, 1, 0, 0])
    assert np.allclose(oracle.occupations(s), [0, 1, 0, 0])


def test_state_validation():
    with pytest.raises(ValueError):
        oracle.DenseState(2, np.ones(4))
    with pytest.raises(ValueError):
        oracle.DenseState(2, np.ones(3) / np.sqrt(3))


def test_apply_gate_matches_kron_embedding(rng):
    n = 5
    g = random_unitary(4, rng)
    psi = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
    psi /= np.linalg.norm(psi)
    for k in range(1, n):
        out = oracle.apply_gate_dense(oracle.DenseState(n, psi), g, k).amplitudes
        assert np.allclose(out, oracle.embed_gate(g, k, n) @ psi)


def test_ring_wrap_position(rng):
    n = 3
    g = random_unitary(4, rng)
    psi = np.zeros(8, dtype=complex)
    psi[0b001] = 1  # qubit 3 set
    out = oracle.apply_gate_dense(oracle.DenseState(n, psi), g, 3)
    # gate acts on (qubit 3, qubit 1) with qubit 3 as the left factor: |1>_3|0>_1 -> column 2 of g
    expected = np.zeros(8, dtype=complex)
    for row in range(4):
        q3, q1 = row >> 1, row & 1
        expected[(q1 << 2) | q3] += g[row, 2]
    assert np.allclose(out.amplitudes, expected)
    with pytest.raises(IndexError):
        oracle.apply_gate_dense(oracle.DenseState.occupied(2, (1,)), g, 2)


def test_circuit_unitary_matches_state_runs(rng):
    n = 4
    c = Circuit(n)
    c.add_layer([(1, gates.random_admissible_gate(rng)), (3, gates.random_admissible_gate(rng))])
    c.add_layer([(2, gates.random_admissible_gate(rng))])
    u = oracle.circuit_unitary_dense(c)
    s = oracle.DenseState.occupied(n, (2, 3))
    assert np.allclose(u @ s.amplitudes, oracle.run_circuit_dense(s, c).amplitudes)


def test_chain_terms_single_link():
    spec = ChainSpec(2, "linear", (1.0,), (0.0,), (0.0, 0.0))
    h = oracle.dense_hamiltonian(spec)
    assert np.allclose(h, gates.SIGMA)
    spec = ChainSpec(2, "linear", (0.0,), (1.0,), (0.0, 0.0))
    assert np.allclose(oracle.dense_hamiltonian(spec), gates.LAMBDA)


def test_number_expectation_range():
    with pytest.raises(IndexError):
        oracle.number_expectation(oracle.DenseState.occupied(3, (1,)), 4)


def test_restriction_of_number_operator():
    from spinchain.clifford import number_operator_dense

    assert np.allclose(oracle.restrict_single_excitation(number_operator_dense(4)), np.eye(4))


def test_sector_indices():
    assert oracle.sector_indices(3, 2).tolist() == [3, 5, 6]


def test_admissibility_report(rng):
    n = 3
    good = oracle.embed_gate(gates.random_admissible_gate(rng), 1, n)
    assert oracle.verify_admissibility_dense(good, n).passed
    swap = oracle.embed_gate(gates.SWAP, 2, n)
    rep = oracle.verify_admissibility_dense(swap, n)
    assert rep.passed  # SWAP commutes with both; the classifier is what rejects it
    general = oracle.embed_gate(gates.random_matchgate(rng), 1, n)
    rep = oracle.verify_admissibility_dense(general, n)
    assert not rep.number_preserving and not rep.commutes_with_j


def test_dense_forbidden_blocks_every_entry_point():
    with oracle.dense_forbidden():
        with pytest.raises(oracle.DenseForbidden):
            oracle.DenseState.occupied(3, (1,))
        with pytest.raises(oracle.DenseForbidden):
            oracle.embed_gate(np.eye(4), 1, 3)
        with pytest.raises(oracle.DenseForbidden):
            oracle.dense_hamiltonian(ChainSpec(3, "linear", (1, 1)))
    assert oracle.DenseState.occupied(3, (1,)).norm() == pytest.approx(1)


def test_dense_caps():
    with pytest.raises(CapacityError):
        oracle.embed_gate(np.eye(4), 1, 13)
