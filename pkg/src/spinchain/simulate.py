"""Compressed engine: admissible evolutions as n x n mode matrices.

A compiled evolution stores ``U`` with ``W a_k W^H = sum_j U[k, j] a_j`` for
the dense qubit evolution ``W``. State amplitudes therefore move with
``U^H``: W|chi_k> = sum_j U^H[j, k] |chi_j>. Nothing here allocates anything
of size 2**n.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .chains import ChainSpec, single_particle_hamiltonian
from .clifford import mode_actions
from .gates import GateClass, admissible_mask, classify_gate, random_admissible_gate
from .linalg import TOL, expm_hermitian, hermitian_eig, is_unitary, unitarity_residual


class OverlappingLayer(ValueError):
    pass


class UnequalParticleNumber(ValueError):
    pass


class NotAdmissibleGate(ValueError):
    def __init__(self, position: int, gate_class: GateClass):
        super().__init__(f"gate at position {position} is {gate_class.value}, not AdmissibleMatchgate")
        self.position = position
        self.gate_class = gate_class


@dataclass(frozen=True)
class CompressedEvolution:
    """Mode matrix ``U`` plus the phase the evolution puts on |00...0>.

    The vacuum phase never affects probabilities; carrying it makes
    amplitudes agree with the dense evolution exactly, not just up to phase.
    """

    U: np.ndarray
    vacuum_phase: complex = 1.0 + 0j

    def __post_init__(self):
        u = np.asarray(self.U, dtype=complex)
        if u.ndim != 2 or u.shape[0] != u.shape[1]:
            raise ValueError(f"mode matrix must be square, got shape {u.shape}")
        object.__setattr__(self, "U", u)

    @property
    def n(self) -> int:
        return self.U.shape[0]

    def then(self, other: "CompressedEvolution") -> "CompressedEvolution":
        """Evolution ``self`` followed by ``other``."""
        return CompressedEvolution(self.U @ other.U, self.vacuum_phase * other.vacuum_phase)

    def power(self, s: int) -> "CompressedEvolution":
        return CompressedEvolution(np.linalg.matrix_power(self.U, s), self.vacuum_phase**s)


@dataclass
class Circuit:
    """Layers of (position, 4x4 gate); positions are 1-based, gate on (k, k+1)."""

    n: int
    layers: list[list[tuple[int, np.ndarray]]] = field(default_factory=list)

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("circuit needs at least two qubits")
        for i, layer in enumerate(self.layers):
            self._check_layer(layer, i)

    def _check_layer(self, layer, i: int) -> None:
        used: set[int] = set()
        for k, _ in layer:
            if not 1 <= k <= self.n - 1:
                raise IndexError(f"layer {i}: position {k} outside 1..{self.n - 1}")
            if {k, k + 1} & used:
                raise OverlappingLayer(f"layer {i}: gate at {k} overlaps another gate")
            used |= {k, k + 1}

    def add_layer(self, layer: Iterable[tuple[int, np.ndarray]]) -> "Circuit":
        layer = [(int(k), np.asarray(g, dtype=complex)) for k, g in layer]
        self._check_layer(layer, len(self.layers))
        self.layers.append(layer)
        return self

    def then(self, other: "Circuit") -> "Circuit":
        if other.n != self.n:
            raise ValueError("circuits act on different qubit counts")
        return Circuit(self.n, self.layers + other.layers)

    @property
    def gates(self) -> list[tuple[int, np.ndarray]]:
        return [pg for layer in self.layers for pg in layer]


@dataclass(frozen=True)
class FockBasisState:
    occupied: tuple[int, ...]

    def __post_init__(self):
        occ = tuple(int(k) for k in self.occupied)
        if any(b <= a for a, b in zip(occ, occ[1:])):
            raise ValueError(f"occupied indices must be strictly increasing: {occ}")
        if occ and occ[0] < 1:
            raise IndexError("occupied indices are 1-based")
        object.__setattr__(self, "occupied", occ)

    @property
    def m(self) -> int:
        return len(self.occupied)


def random_circuit(n: int, depth: int, rng: np.random.Generator) -> Circuit:
    """Brickwork of random admissible gates: odd links, then even links."""
    c = Circuit(n)
    for d in range(depth):
        start = 1 + d % 2
        c.add_layer((k, random_admissible_gate(rng)) for k in range(start, n, 2))
    return c


def compile_circuit(c: Circuit) -> CompressedEvolution:
    """Multiply per-gate mode actions in application order.

    Gates in a layer touch disjoint column pairs (k, k+1) of the running
    product, so a whole layer is one vectorised O(n) update.
    """
    u = np.eye(c.n, dtype=complex)
    phase = 1.0 + 0j
    for layer in c.layers:
        if not layer:
            continue
        pos = np.array([k for k, _ in layer])
        stack = np.stack([g for _, g in layer])
        ok = admissible_mask(stack)
        if not ok.all():
            bad = int(np.argmin(ok))
            raise NotAdmissibleGate(int(pos[bad]), classify_gate(stack[bad]))
        m = mode_actions(stack)
        left, right = u[:, pos - 1], u[:, pos]
        u[:, pos - 1] = left * m[:, 0, 0] + right * m[:, 1, 0]
        u[:, pos] = left * m[:, 0, 1] + right * m[:, 1, 1]
        phase *= np.prod(stack[:, 0, 0])
    return CompressedEvolution(u, complex(phase))


def compile_hamiltonian(h, t: float, offset: float = 0.0) -> CompressedEvolution:
    """Mode matrix of exp(-i H t) for H = sum h[j,k] a+_j a_k + offset.

    The amplitudes evolve with exp(-i h t) = U^H, hence U = exp(+i h t).
    A ``ChainSpec`` may be passed for ``h``; its field offset is then used.
    """
    if isinstance(h, ChainSpec):
        h, offset = single_particle_hamiltonian(h), h.field_offset
    hermitian_eig(h)  # validation
    return CompressedEvolution(expm_hermitian(h, -t), complex(np.exp(-1j * offset * t)))


def _check_dim(e: CompressedEvolution, size: int) -> None:
    if size != e.n:
        raise ValueError(f"dimension mismatch: state has {size} nodes, evolution has {e.n}")


def evolve_single(psi, e: CompressedEvolution) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    _check_dim(e, psi.shape[0])
    return e.vacuum_phase * (e.U.conj().T @ psi)


def single_site_probabilities(j: int, e: CompressedEvolution) -> np.ndarray:
    if not 1 <= j <= e.n:
        raise IndexError(f"initial node {j} outside 1..{e.n}")
    return np.abs(e.U[j - 1, :]) ** 2


def _indices(ks: Sequence[int], n: int) -> list[int]:
    ks = [int(k) for k in ks]
    if any(not 1 <= k <= n for k in ks):
        raise IndexError(f"occupied indices {ks} outside 1..{n}")
    return [k - 1 for k in ks]


def multi_site_probabilities(K, e: CompressedEvolution) -> np.ndarray:
    occ = K.occupied if isinstance(K, FockBasisState) else FockBasisState(tuple(K)).occupied
    rows = _indices(occ, e.n)
    return (np.abs(e.U[rows, :]) ** 2).sum(axis=0)


def multi_amplitude(k_in, k_out, e: CompressedEvolution) -> complex:
    """<K_out| W |K_in> as det of U^H restricted to rows K_out, columns K_in.

    Index lists are taken in creation order, |K> = a+_{k1} ... a+_{km} |0>,
    so permuting an unsorted list changes the sign as it should.
    """
    kin = k_in.occupied if isinstance(k_in, FockBasisState) else tuple(k_in)
    kout = k_out.occupied if isinstance(k_out, FockBasisState) else tuple(k_out)
    if len(kin) != len(kout):
        raise UnequalParticleNumber(f"{len(kin)} particles in, {len(kout)} out")
    if len(kin) == 0:
        return e.vacuum_phase
    for ks in (kin, kout):
        if len(set(ks)) != len(ks):
            return 0j
    v = e.U.conj().T
    sub = v[np.ix_(_indices(kout, e.n), _indices(kin, e.n))]
    return complex(e.vacuum_phase * np.linalg.det(sub))


def check_unitary(e: CompressedEvolution, tol: float = TOL.check) -> float:
    r = unitarity_residual(e.U)
    if not is_unitary(e.U, tol):
        raise ValueError(f"compressed evolution is not unitary (residual {r:.3e})")
    return r
