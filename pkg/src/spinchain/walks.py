"""Coined and continuous quantum walks on scalar chains.

A coined walk on n positions runs on a scalar chain of 2n nodes; node
``2k + c`` carries coin value ``c`` at position ``k`` (both 0-based).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Optional

import numpy as np

from .linalg import LinalgError, as_matrix, expm_hermitian, is_unitary, unitarity_residual

HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
BOUNDARIES = ("cyclic", "reflecting")


def interleave_map(direction: str, index, n: int):
    """``"split"``: scalar s -> (c, k); ``"join"``: (c, k) -> scalar 2k + c."""
    if direction == "split":
        s = int(index)
        if not 0 <= s < 2 * n:
            raise IndexError(f"scalar index {s} outside 0..{2 * n - 1}")
        return s % 2, s // 2
    if direction == "join":
        c, k = index
        if c not in (0, 1) or not 0 <= k < n:
            raise IndexError(f"coin/position ({c}, {k}) out of range for n={n}")
        return 2 * k + c
    raise ValueError(f"unknown direction {direction!r}")


def _exchange(pairs, size: int) -> np.ndarray:
    p = np.eye(size, dtype=complex)
    for a, b in pairs:
        p[[a, b]] = p[[b, a]]
    return p


def exchange_operators(n: int, boundary: str = "cyclic") -> tuple[np.ndarray, np.ndarray]:
    """S1 swaps (2k, 2k+1); S2 swaps (2k+1, 2k+2), wrapping mod 2n on a ring.

    With a reflecting boundary S2 omits the wrap pair, leaving nodes 0 and
    2n-1 fixed.
    """
    size = 2 * n
    s1 = _exchange([(2 * k, 2 * k + 1) for k in range(n)], size)
    last = n if boundary == "cyclic" else n - 1
    s2 = _exchange([(2 * k + 1, (2 * k + 2) % size) for k in range(last)], size)
    return s1, s2


def coin_operator(n: int, coin) -> np.ndarray:
    """Coin acting on every (2k, 2k+1) pair."""
    return np.kron(np.eye(n), coin)


def _check_coin(coin) -> np.ndarray:
    coin = as_matrix(coin)
    if coin.shape != (2, 2) or not is_unitary(coin):
        raise LinalgError(f"coin must be a 2x2 unitary (residual {unitarity_residual(coin):.3e})")
    return coin


def coined_step_operator(n: int, coin=HADAMARD, boundary: str = "cyclic") -> np.ndarray:
    """W = S2 S1 (C on pairs), a 2n x 2n unitary on the scalar chain."""
    if n < 2:
        raise ValueError(f"coined walk needs n >= 2 positions, got {n}")
    if boundary not in BOUNDARIES:
        raise ValueError(f"unknown boundary {boundary!r}")
    coin = _check_coin(coin)
    s1, s2 = exchange_operators(n, boundary)
    return s2 @ s1 @ coin_operator(n, coin)


def cyclic_shift(n: int) -> np.ndarray:
    """U_n: |k> -> |k+1 mod n>."""
    return np.roll(np.eye(n), 1, axis=0)


def interleave_permutation(n: int) -> np.ndarray:
    """P with P|2k+c> = |c>|k>, the coin-register ordering c*n + k."""
    p = np.zeros((2 * n, 2 * n))
    for s in range(2 * n):
        c, k = interleave_map("split", s, n)
        p[c * n + k, s] = 1
    return p


@dataclass
class WalkConfig:
    kind: str
    n: int
    steps: int = 1
    tau: float = 1.0
    coin: np.ndarray = None  # type: ignore[assignment]
    boundary: str = "cyclic"
    initial: object = 0
    hamiltonian: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.kind not in ("coined", "continuous"):
            raise ValueError(f"unknown walk kind {self.kind!r}")
        if self.steps < 0:
            raise ValueError("steps must be non-negative")
        if not np.isfinite(self.tau):
            raise ValueError("tau must be finite")
        if self.coin is None:
            self.coin = HADAMARD
        self.coin = _check_coin(self.coin)

    @property
    def size(self) -> int:
        return 2 * self.n if self.kind == "coined" else self.n


@dataclass
class WalkStep:
    step: int
    probabilities: np.ndarray

    def positions(self, n: int) -> np.ndarray:
        """Coined walks: probability per position, summed over the coin."""
        return self.probabilities.reshape(n, 2).sum(axis=1)


def initial_state(cfg: WalkConfig) -> np.ndarray:
    """Basis node (int, 0-based scalar index), (c, k) pair, or amplitude vector."""
    init = cfg.initial
    psi = np.zeros(cfg.size, dtype=complex)
    if isinstance(init, (int, np.integer)):
        if not 0 <= init < cfg.size:
            raise IndexError(f"initial node {init} outside 0..{cfg.size - 1}")
        psi[init] = 1
    elif isinstance(init, tuple) and len(init) == 2 and cfg.kind == "coined":
        psi[interleave_map("join", init, cfg.n)] = 1
    else:
        psi = np.asarray(init, dtype=complex)
        if psi.shape != (cfg.size,):
            raise ValueError(f"initial state has shape {psi.shape}, expected ({cfg.size},)")
        if abs(np.linalg.norm(psi) - 1) > 1e-10:
            raise ValueError("initial state is not normalised")
    return psi


def step_operator(cfg: WalkConfig) -> np.ndarray:
    if cfg.kind == "coined":
        return coined_step_operator(cfg.n, cfg.coin, cfg.boundary)
    if cfg.hamiltonian is None:
        raise ValueError("continuous walk needs a Hamiltonian")
    h = as_matrix(cfg.hamiltonian)
    if h.shape != (cfg.n, cfg.n):
        raise ValueError(f"Hamiltonian shape {h.shape} does not match n={cfg.n}")
    return expm_hermitian(h, cfg.tau)


def run_walk(cfg: WalkConfig) -> Iterator[WalkStep]:
    """Yield the node distribution after each step, starting with step 0."""
    w = step_operator(cfg)
    psi = initial_state(cfg)
    for s in range(cfg.steps + 1):
        if s:
            psi = w @ psi
        yield WalkStep(s, np.abs(psi) ** 2)
