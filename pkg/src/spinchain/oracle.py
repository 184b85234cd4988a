"""Brute-force 2**n reference simulator.

Everything here is exponential in the qubit count and exists only to check
the compressed engine. ``dense_forbidden()`` turns every entry point into an
error so the polynomial path can prove it never falls back on this module.
"""
from __future__ import annotations

import contextlib
from dataclasses import dataclass

import numpy as np

from .chains import ChainSpec
from .clifford import (
    DENSE_OPERATOR_CAP,
    CapacityError,
    PauliString,
    j_spin_element,
    number_operator_dense,
)
from .linalg import TOL, max_norm

DENSE_STATE_CAP = 20

_forbidden = 0


class DenseForbidden(RuntimeError):
    pass


@contextlib.contextmanager
def dense_forbidden():
    global _forbidden
    _forbidden += 1
    try:
        yield
    finally:
        _forbidden -= 1


def _guard(n: int, cap: int) -> None:
    if _forbidden:
        raise DenseForbidden("dense oracle invoked inside a dense_forbidden() block")
    if n > cap:
        raise CapacityError(f"dense oracle limited to n <= {cap}, got {n}")


def chi_index(k: int, n: int) -> int:
    """Basis index of the single-excitation state with the unit on qubit k."""
    return 1 << (n - k)


def occupation_index(occupied, n: int) -> int:
    return sum(1 << (n - k) for k in occupied)


@dataclass
class DenseState:
    n: int
    amplitudes: np.ndarray

    def __post_init__(self):
        _guard(self.n, DENSE_STATE_CAP)
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex)
        if self.amplitudes.shape != (2**self.n,):
            raise ValueError(f"expected {2**self.n} amplitudes, got {self.amplitudes.shape}")
        if abs(np.linalg.norm(self.amplitudes) - 1) > TOL.check:
            raise ValueError(f"state norm {np.linalg.norm(self.amplitudes):.12g} differs from 1")

    @classmethod
    def basis(cls, n: int, index: int) -> "DenseState":
        _guard(n, DENSE_STATE_CAP)
        amps = np.zeros(2**n, dtype=complex)
        amps[index] = 1
        return cls(n, amps)

    @classmethod
    def occupied(cls, n: int, nodes) -> "DenseState":
        """Computational basis state with units on the 1-based ``nodes``."""
        return cls.basis(n, occupation_index(nodes, n))

    @classmethod
    def single_particle(cls, psi) -> "DenseState":
        psi = np.asarray(psi, dtype=complex)
        n = psi.shape[0]
        _guard(n, DENSE_STATE_CAP)
        amps = np.zeros(2**n, dtype=complex)
        for k in range(1, n + 1):
            amps[chi_index(k, n)] = psi[k - 1]
        return cls(n, amps)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def single_excitation_amplitudes(self) -> np.ndarray:
        return np.array([self.amplitudes[chi_index(k, self.n)] for k in range(1, self.n + 1)])


def _apply_local(tensor: np.ndarray, g: np.ndarray, q1: int, q2: int, n: int) -> np.ndarray:
    # tensor has n qubit axes first (axis 0 = qubit 1) plus optional trailing axes
    g4 = g.reshape(2, 2, 2, 2)
    out = np.tensordot(g4, tensor, axes=([2, 3], [q1, q2]))
    return np.moveaxis(out, [0, 1], [q1, q2])


def _pair(k: int, n: int) -> tuple[int, int]:
    if 1 <= k <= n - 1:
        return k - 1, k
    if k == n and n > 2:
        return n - 1, 0
    raise IndexError(f"gate position {k} outside 1..{n - 1} (or {n} for the ring wrap)")


def apply_gate_dense(state: DenseState, g, k: int) -> DenseState:
    """Apply 4x4 ``g`` to qubits (k, k+1); position n wraps to (n, 1)."""
    _guard(state.n, DENSE_STATE_CAP)
    g = np.asarray(g, dtype=complex)
    q1, q2 = _pair(k, state.n)
    t = state.amplitudes.reshape((2,) * state.n)
    return DenseState(state.n, _apply_local(t, g, q1, q2, state.n).reshape(-1))


def apply_gate_to_columns(mat: np.ndarray, g, k: int, n: int) -> np.ndarray:
    """Left-multiply a 2**n x m matrix by the embedded gate."""
    _guard(n, DENSE_OPERATOR_CAP)
    q1, q2 = _pair(k, n)
    t = mat.reshape((2,) * n + (mat.shape[1],))
    return _apply_local(t, np.asarray(g, dtype=complex), q1, q2, n).reshape(mat.shape)


def embed_gate(g, k: int, n: int) -> np.ndarray:
    """Explicit 2**n x 2**n matrix of a gate on qubits (k, k+1), k < n."""
    _guard(n, DENSE_OPERATOR_CAP)
    if not 1 <= k <= n - 1:
        raise IndexError(f"gate position {k} outside 1..{n - 1}")
    return np.kron(np.kron(np.eye(2 ** (k - 1)), np.asarray(g, dtype=complex)), np.eye(2 ** (n - k - 1)))


def circuit_unitary_dense(circuit) -> np.ndarray:
    """Dense unitary of a layered circuit (gates applied in list order)."""
    n = circuit.n
    _guard(n, DENSE_OPERATOR_CAP)
    u = np.eye(2**n, dtype=complex)
    for layer in circuit.layers:
        for k, g in layer:
            u = apply_gate_to_columns(u, g, k, n)
    return u


def run_circuit_dense(state: DenseState, circuit) -> DenseState:
    for layer in circuit.layers:
        for k, g in layer:
            state = apply_gate_dense(state, g, k)
    return state


def pauli_sum_dense(terms, n: int) -> np.ndarray:
    """Dense matrix of sum(coefficient * PauliString)."""
    _guard(n, DENSE_OPERATOR_CAP)
    h = np.zeros((2**n, 2**n), dtype=complex)
    for c, p in terms:
        if c != 0:
            h += c * p.to_dense()
    return h


def _letters(n: int, placed: dict[int, str]) -> str:
    return "".join(placed.get(q, "I") for q in range(n))


def chain_pauli_terms(spec: ChainSpec) -> list[tuple[complex, PauliString]]:
    n = spec.n
    terms = []
    for idx, (j, k) in enumerate(spec.link_pairs()):
        a, b = spec.alpha[idx], spec.beta[idx]
        terms += [
            (a / 2, PauliString(0, _letters(n, {j: "X", k: "X"}))),
            (a / 2, PauliString(0, _letters(n, {j: "Y", k: "Y"}))),
            (b / 2, PauliString(0, _letters(n, {j: "Y", k: "X"}))),
            (-b / 2, PauliString(0, _letters(n, {j: "X", k: "Y"}))),
        ]
    for q, d in enumerate(spec.delta):
        terms.append((d, PauliString(0, _letters(n, {q: "Z"}))))
    return terms


def dense_hamiltonian(spec: ChainSpec) -> np.ndarray:
    _guard(spec.n, DENSE_OPERATOR_CAP)
    return pauli_sum_dense(chain_pauli_terms(spec), spec.n)


def number_expectation(state: DenseState, k: int) -> float:
    """<psi| (I - Z_k)/2 |psi>, the occupation of qubit k."""
    _guard(state.n, DENSE_STATE_CAP)
    if not 1 <= k <= state.n:
        raise IndexError(f"node {k} outside 1..{state.n}")
    probs = np.abs(state.amplitudes.reshape((2,) * state.n)) ** 2
    return float(np.moveaxis(probs, k - 1, 0)[1].sum())


def occupations(state: DenseState) -> np.ndarray:
    return np.array([number_expectation(state, k) for k in range(1, state.n + 1)])


def _op_qubits(op: np.ndarray) -> int:
    op = np.asarray(op)
    n = int(round(np.log2(op.shape[0])))
    if op.shape != (2**n, 2**n):
        raise ValueError(f"operator shape {op.shape} is not 2**n square")
    return n


def restrict_single_excitation(op) -> np.ndarray:
    """Matrix elements <chi_j| op |chi_k> over the one-unit states."""
    op = np.asarray(op, dtype=complex)
    n = _op_qubits(op)
    _guard(n, DENSE_OPERATOR_CAP)
    idx = [chi_index(k, n) for k in range(1, n + 1)]
    return op[np.ix_(idx, idx)]


def sector_indices(n: int, m: int) -> np.ndarray:
    return np.array([b for b in range(2**n) if bin(b).count("1") == m])


@dataclass(frozen=True)
class AdmissibilityReport:
    j_commutator: float
    number_commutator: float
    tol: float

    @property
    def commutes_with_j(self) -> bool:
        return self.j_commutator <= self.tol

    @property
    def number_preserving(self) -> bool:
        return self.number_commutator <= self.tol

    @property
    def passed(self) -> bool:
        return self.commutes_with_j and self.number_preserving


def verify_admissibility_dense(u, n: int, tol: float = TOL.check) -> AdmissibilityReport:
    """Commutator norms of ``u`` with the J element and with N^z.

    Both are reported separately: SWAP passes both checks although it is not
    a matchgate, so neither is a full admissibility verdict on its own.
    """
    _guard(n, DENSE_OPERATOR_CAP)
    u = np.asarray(u, dtype=complex)
    j = j_spin_element(n)
    nz = number_operator_dense(n)
    return AdmissibilityReport(max_norm(u @ j - j @ u), max_norm(u @ nz - nz @ u), tol)
