"""Chain Hamiltonians on the single-excitation (scalar chain) level."""
from __future__ import annotations

from dataclasses import dataclass, field
from math import comb, sqrt

import numpy as np

from .linalg import LinalgError, as_matrix, is_unitary

TOPOLOGIES = ("linear", "ring")


def _floats(xs) -> tuple[float, ...]:
    return tuple(float(x) for x in xs)


@dataclass(frozen=True)
class ChainSpec:
    """Couplings of an XY + chiral + local-field chain.

    ``alpha[k]`` and ``beta[k]`` couple nodes k+1 and k+2 (1-based); for a
    ring the last entry is the wrap link (n, 1). Missing ``beta`` and
    ``delta`` default to zeros.
    """

    n: int
    topology: str = "linear"
    alpha: tuple[float, ...] = ()
    beta: tuple[float, ...] = field(default=None)  # type: ignore[assignment]
    delta: tuple[float, ...] = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        if self.n < 2:
            raise ValueError(f"chain needs n >= 2 nodes, got {self.n}")
        if self.topology not in TOPOLOGIES:
            raise ValueError(f"unknown topology {self.topology!r}")
        links = self.links
        beta = (0.0,) * links if self.beta is None else self.beta
        delta = (0.0,) * self.n if self.delta is None else self.delta
        for name, vals, want in (("alpha", self.alpha, links), ("beta", beta, links), ("delta", delta, self.n)):
            if len(vals) != want:
                raise ValueError(f"{name} has length {len(vals)}, expected {want}")
            if not all(np.isfinite(v) for v in vals):
                raise ValueError(f"{name} contains non-finite values")
        object.__setattr__(self, "alpha", _floats(self.alpha))
        object.__setattr__(self, "beta", _floats(beta))
        object.__setattr__(self, "delta", _floats(delta))

    @property
    def links(self) -> int:
        return self.n - 1 if self.topology == "linear" else self.n

    def link_pairs(self) -> list[tuple[int, int]]:
        """0-based (first, second) node pairs in coefficient order."""
        return [(k, (k + 1) % self.n) for k in range(self.links)]

    @property
    def field_offset(self) -> float:
        """Constant sum(delta); the global energy shift dropped from ``h``."""
        return float(sum(self.delta))

    @classmethod
    def random(cls, n: int, rng: np.random.Generator, topology: str = "linear") -> "ChainSpec":
        links = n - 1 if topology == "linear" else n
        return cls(
            n,
            topology,
            tuple(rng.uniform(-1, 1, links)),
            tuple(rng.uniform(-1, 1, links)),
            tuple(rng.uniform(-1, 1, n)),
        )


def adjacency_hamiltonian(topology: str, n: int) -> np.ndarray:
    if n < 2:
        raise ValueError(f"chain needs n >= 2 nodes, got {n}")
    spec = ChainSpec(n, topology, (1.0,) * (n - 1 if topology == "linear" else n))
    return single_particle_hamiltonian(spec)


def perfect_transfer_hamiltonian(n: int, axis: str = "x") -> np.ndarray:
    """Spin-(n-1)/2 rotation generator about ``axis`` in the node basis."""
    if n < 2:
        raise ValueError(f"chain needs n >= 2 nodes, got {n}")
    h = np.zeros((n, n), dtype=complex)
    if axis == "z":
        h[np.diag_indices(n)] = np.arange(n) - (n - 1) / 2
        return h
    for k in range(1, n):
        c = 0.5 * sqrt(k * (n - k))
        if axis == "x":
            h[k, k - 1] = h[k - 1, k] = c
        elif axis == "y":
            h[k, k - 1], h[k - 1, k] = -1j * c, 1j * c
        else:
            raise ValueError(f"unknown axis {axis!r}")
    return h


def single_particle_hamiltonian(spec: ChainSpec, particles: int = 1) -> np.ndarray:
    """Mode Hamiltonian ``h`` with H = sum_jk h[j,k] a_j^+ a_k + sum(delta).

    The single-excitation block of the qubit Hamiltonian is ``h`` plus
    ``spec.field_offset`` times the identity. On a ring the wrap link picks
    up the Jordan-Wigner string parity, (-1)**(particles - 1), which is
    fixed inside each particle-number sector.
    """
    h = np.zeros((spec.n, spec.n), dtype=complex)
    for idx, (j, k) in enumerate(spec.link_pairs()):
        sign = (-1) ** (particles - 1) if k < j else 1
        a, b = sign * spec.alpha[idx], sign * spec.beta[idx]
        h[j, k] += a + 1j * b
        h[k, j] += a - 1j * b
    h[np.diag_indices(spec.n)] += -2 * np.asarray(spec.delta)
    return h


def spin_rotation_matrix(v, n: int) -> np.ndarray:
    """n x n matrix D(V) with p(V x) = D(V) p(x) on the binomial basis.

    p_k(a, b) = sqrt(C(n-1, k)) a**k b**(n-1-k), k = 0..n-1. The expansion
    is carried out term by term with exact binomial weights.
    """
    v = as_matrix(v)
    if v.shape != (2, 2) or not is_unitary(v):
        raise LinalgError("spin rotation needs a 2x2 unitary")
    s = n - 1
    d = np.zeros((n, n), dtype=complex)
    (v00, v01), (v10, v11) = v
    for k in range(n):
        # (v00 a + v01 b)^k (v10 a + v11 b)^(s-k): pick i a's from the first
        # factor and l a's from the second -> monomial a^(i+l)
        for i in range(k + 1):
            ci = comb(k, i) * v00**i * v01 ** (k - i)
            for l in range(s - k + 1):
                cl = comb(s - k, l) * v10**l * v11 ** (s - k - l)
                d[k, i + l] += ci * cl
        d[k, :] *= sqrt(comb(s, k))
    d /= np.sqrt([comb(s, j) for j in range(n)])[None, :]
    return d
