import numpy as np
import pytest

from spinchain import chains, oracle
from spinchain.chains import ChainSpec
from spinchain.linalg import expm_hermitian, is_hermitian


def test_chainspec_defaults_and_validation():
    s = ChainSpec(4, "linear", (1, 2, 3))
    assert s.beta == (0.0, 0.0, 0.0) and s.delta == (0.0,) * 4
    assert s.link_pairs() == [(0, 1), (1, 2), (2, 3)]
    ring = ChainSpec(3, "ring", (1, 1, 1))
    assert ring.link_pairs()[-1] == (2, 0)
    with pytest.raises(ValueError):
        ChainSpec(4, "linear", (1, 2))
    with pytest.raises(ValueError):
        ChainSpec(4, "linear", (1, 2, np.nan))
    with pytest.raises(ValueError):
        ChainSpec(1, "linear", ())
    with pytest.raises(ValueError):
        ChainSpec(3, "star", (1, 1))


def test_adjacency():
    h = chains.adjacency_hamiltonian("ring", 4)
    expected = np.roll(np.eye(4), 1, axis=0) + np.roll(np.eye(4), -1, axis=0)
    assert np.array_equal(h.real, expected)
    lin = chains.adjacency_hamiltonian("linear", 3)
    assert np.array_equal(lin.real, [[0, 1, 0], [1, 0, 1], [0, 1, 0]])


def test_single_particle_hamiltonian_matches_dense_block(rng):
    for n in range(2, 7):
        for topology in ("linear", "ring"):
            spec = ChainSpec.random(n, rng, topology)
            h = chains.single_particle_hamiltonian(spec)
            assert is_hermitian(h)
            block = oracle.restrict_single_excitation(oracle.dense_hamiltonian(spec))
            assert np.max(np.abs(block - h - spec.field_offset * np.eye(n))) < 1e-12


def test_ring_parity_sign_in_two_particle_sector(rng):
    n, m = 5, 2
    spec = ChainSpec.random(n, rng, "ring")
    big = oracle.dense_hamiltonian(spec)
    u_big = expm_hermitian(big, 0.9)
    e = expm_hermitian(chains.single_particle_hamiltonian(spec, particles=m) + spec.field_offset * np.eye(n), 0.9)
    # occupation of (1, 3) evolves by the 2x2 minors of e
    start = oracle.DenseState.occupied(n, (1, 3))
    dense_occ = oracle.occupations(oracle.DenseState(n, u_big @ start.amplitudes))
    compressed = (np.abs(e[:, [0, 2]]) ** 2).sum(axis=1)
    assert np.max(np.abs(dense_occ - compressed)) < 1e-12


def test_perfect_transfer_matrices():
    h = chains.perfect_transfer_hamiltonian(4, "x")
    assert np.allclose(np.diag(h, 1), [0.5 * np.sqrt(3), 1.0, 0.5 * np.sqrt(3)])
    assert np.allclose(np.linalg.eigvalsh(h), [-1.5, -0.5, 0.5, 1.5])
    hy = chains.perfect_transfer_hamiltonian(3, "y")
    assert is_hermitian(hy) and hy[0, 1] == pytest.approx(1j * np.sqrt(2) / 2)
    assert np.allclose(np.diag(chains.perfect_transfer_hamiltonian(3, "z")), [-1, 0, 1])
    with pytest.raises(ValueError):
        chains.perfect_transfer_hamiltonian(3, "w")


@pytest.mark.parametrize("axis", ["x", "y", "z"])
def test_spin_rotation_is_exponential_of_transfer_hamiltonian(axis):
    pauli = {"x": [[0, 1], [1, 0]], "y": [[0, -1j], [1j, 0]], "z": [[1, 0], [0, -1]]}[axis]
    for n in range(2, 9):
        for t in (0.1, 1.3, np.pi):
            d = chains.spin_rotation_matrix(expm_hermitian(np.array(pauli) / 2, t), n)
            assert np.max(np.abs(d - expm_hermitian(chains.perfect_transfer_hamiltonian(n, axis), t))) < 1e-12


def test_spin_rotation_defining_relation(rng):
    from math import comb

    from spinchain.linalg import random_unitary

    n = 5
    v = random_unitary(2, rng)
    x = rng.normal(size=2) + 1j * rng.normal(size=2)

    def p(vec):
        a, b = vec
        return np.array([np.sqrt(comb(n - 1, k)) * a**k * b ** (n - 1 - k) for k in range(n)])

    assert np.allclose(p(v @ x), chains.spin_rotation_matrix(v, n) @ p(x))


def test_spin_rotation_is_homomorphism(rng):
    from spinchain.linalg import random_unitary

    a, b = random_unitary(2, rng), random_unitary(2, rng)
    lhs = chains.spin_rotation_matrix(a @ b, 6)
    rhs = chains.spin_rotation_matrix(a, 6) @ chains.spin_rotation_matrix(b, 6)
    assert np.allclose(lhs, rhs, atol=1e-12)
