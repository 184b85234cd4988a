"""Execute parsed experiments, cross-check them against the dense oracle,
and serialise the resulting distributions."""
from __future__ import annotations

import csv
import io
import json
import time
from dataclasses import dataclass
from typing import Callable, Iterable, Optional

import numpy as np

from . import oracle, simulate, walks
from .chains import ChainSpec, single_particle_hamiltonian
from .experiment import ExperimentConfig
from .linalg import expm_hermitian

CSV_HEADER = ("step", "node", "probability")


@dataclass(frozen=True)
class Record:
    step: int
    node: int
    probability: float


@dataclass(frozen=True)
class VerifyResult:
    max_deviation: float
    tol: float
    checked: bool
    note: str = ""

    @property
    def ok(self) -> bool:
        return not self.checked or self.max_deviation <= self.tol


def chain_spec(cfg: ExperimentConfig) -> ChainSpec:
    """ChainSpec equivalent of the [chain] section (named Hamiltonians included)."""
    c = cfg.chain
    n = c.n
    if c.hamiltonian == "spec":
        return ChainSpec(n, c.topology, c.alpha, c.beta, c.delta)
    if c.hamiltonian == "adjacency":
        links = n - 1 if c.topology == "linear" else n
        return ChainSpec(n, c.topology, (1.0,) * links)
    if c.hamiltonian == "perfect_transfer":
        return perfect_transfer_spec(n, c.axis)
    raise ValueError("experiment has no chain Hamiltonian")


def perfect_transfer_spec(n: int, axis: str) -> ChainSpec:
    """Couplings reproducing ``perfect_transfer_hamiltonian(n, axis)`` as mode matrix."""
    c = tuple(0.5 * np.sqrt(k * (n - k)) for k in range(1, n))
    zeros = (0.0,) * (n - 1)
    if axis == "x":
        return ChainSpec(n, "linear", c, zeros)
    if axis == "y":
        return ChainSpec(n, "linear", zeros, c)
    return ChainSpec(n, "linear", zeros, zeros, tuple(-(k - (n - 1) / 2) / 2 for k in range(n)))


def build_circuit(cfg: ExperimentConfig) -> simulate.Circuit:
    c = simulate.Circuit(cfg.n)
    for layer in cfg.circuit:
        c.add_layer((g.position, g.matrix()) for g in layer)
    return c


def step_evolution(cfg: ExperimentConfig) -> simulate.CompressedEvolution:
    """Compressed evolution of one step for Hamiltonian and circuit sources."""
    if cfg.source == "circuit":
        return simulate.compile_circuit(build_circuit(cfg))
    spec = chain_spec(cfg)
    h = single_particle_hamiltonian(spec, particles=len(cfg.walk.initial))
    return simulate.compile_hamiltonian(h, cfg.walk.tau, spec.field_offset)


def compressed_distributions(cfg: ExperimentConfig, evolution=None) -> list[np.ndarray]:
    """Per-step occupation vectors from the compressed engine."""
    if cfg.source == "coined":
        return [s.probabilities for s in walks.run_walk(walk_config(cfg))]
    e = evolution if evolution is not None else step_evolution(cfg)
    occupied = simulate.FockBasisState(cfg.walk.initial)
    current = simulate.CompressedEvolution(np.eye(e.n, dtype=complex))
    out = []
    for s in range(cfg.walk.steps + 1):
        if s:
            current = current.then(e)
        out.append(simulate.multi_site_probabilities(occupied, current))
    return out


def walk_config(cfg: ExperimentConfig) -> walks.WalkConfig:
    c, k = cfg.walk.initial
    return walks.WalkConfig(
        "coined", cfg.n, cfg.walk.steps, coin=cfg.coin_matrix(), boundary=cfg.walk.boundary, initial=(c, k)
    )


def records(cfg: ExperimentConfig, dists: Iterable[np.ndarray]) -> list[Record]:
    out = []
    for step, p in enumerate(dists):
        if cfg.source == "coined":
            if cfg.output.index == "position":
                p = p.reshape(cfg.n, 2).sum(axis=1)
            nodes = range(len(p))
        else:
            nodes = range(1, len(p) + 1)
        out += [Record(step, node, float(v)) for node, v in zip(nodes, p)]
    return out


def run_experiment(cfg: ExperimentConfig) -> list[Record]:
    return records(cfg, compressed_distributions(cfg))


# ------------------------------------------------------------------ oracle


def dense_distributions(cfg: ExperimentConfig) -> list[np.ndarray]:
    """Same distributions computed by brute force."""
    if cfg.source == "coined":
        return _coined_reference(cfg)
    n = cfg.n
    state = oracle.DenseState.occupied(n, cfg.walk.initial)
    if cfg.source == "circuit":
        circuit = build_circuit(cfg)
        step: Callable = lambda st: oracle.run_circuit_dense(st, circuit)  # noqa: E731
    else:
        u = expm_hermitian(oracle.dense_hamiltonian(chain_spec(cfg)), cfg.walk.tau)
        step = lambda st: oracle.DenseState(n, u @ st.amplitudes)  # noqa: E731
    out = []
    for s in range(cfg.walk.steps + 1):
        if s:
            state = step(state)
        out.append(oracle.occupations(state))
    return out


def _coined_reference(cfg: ExperimentConfig) -> list[np.ndarray]:
    """Coined walk expanded node by node from the exchange rules."""
    n, size = cfg.n, 2 * cfg.n
    coin = cfg.coin_matrix()
    cyclic = cfg.walk.boundary == "cyclic"
    psi = np.zeros(size, dtype=complex)
    c0, k0 = cfg.walk.initial
    psi[2 * k0 + c0] = 1

    def s1(s: int) -> int:
        return s ^ 1

    def s2(s: int) -> int:
        if s % 2:  # odd node pairs with the next one
            return (s + 1) % size if cyclic or s + 1 < size else s
        return (s - 1) % size if cyclic or s > 0 else s

    out = [np.abs(psi) ** 2]
    for _ in range(cfg.walk.steps):
        flipped = np.zeros_like(psi)
        for k in range(n):
            flipped[2 * k : 2 * k + 2] = coin @ psi[2 * k : 2 * k + 2]
        moved = np.zeros_like(psi)
        for s in range(size):
            moved[s2(s1(s))] += flipped[s]
        psi = moved
        out.append(np.abs(psi) ** 2)
    return out


def verify_experiment(cfg: ExperimentConfig, max_n: int = 10, tol: float = 1e-9, evolution=None) -> VerifyResult:
    if cfg.source != "coined" and cfg.n > max_n:
        return VerifyResult(0.0, tol, False, f"n={cfg.n} exceeds max-n {max_n}; oracle skipped")
    compressed = compressed_distributions(cfg, evolution)
    dense = dense_distributions(cfg)
    dev = max(float(np.max(np.abs(a - b))) for a, b in zip(compressed, dense))
    return VerifyResult(dev, tol, True)


# ------------------------------------------------------------------ output


def format_probability(p: float) -> str:
    return format(p, ".17g")


def to_csv(recs: Iterable[Record]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in recs:
        w.writerow((r.step, r.node, format_probability(r.probability)))
    return buf.getvalue()


def to_json(recs: Iterable[Record]) -> str:
    return json.dumps(
        [{"step": r.step, "node": r.node, "probability": r.probability} for r in recs], indent=1
    ) + "\n"


def emit(cfg: ExperimentConfig, recs: list[Record]) -> Optional[str]:
    """Write records to the configured destination; return text for stdout."""
    text = to_csv(recs) if cfg.output.format == "csv" else to_json(recs)
    if cfg.output.path is None:
        return text
    with open(cfg.output.path, "w", encoding="utf-8") as fh:
        fh.write(text)
    return None


# ------------------------------------------------------------------ bench


@dataclass(frozen=True)
class BenchRow:
    n: int
    depth: int
    gates: int
    compile_s: float
    evolve_s: float
    path: str


def bench_compressed(n: int, depth: int, rng: np.random.Generator) -> BenchRow:
    circuit = simulate.random_circuit(n, depth, rng)
    with oracle.dense_forbidden():
        t0 = time.perf_counter()
        e = simulate.compile_circuit(circuit)
        t1 = time.perf_counter()
        psi = np.zeros(n, dtype=complex)
        psi[0] = 1
        psi = simulate.evolve_single(psi, e)
        simulate.single_site_probabilities(1, e)
        t2 = time.perf_counter()
    if abs(np.linalg.norm(psi) - 1) > 1e-9:
        raise RuntimeError("norm drift in compressed evolution")
    return BenchRow(n, depth, len(circuit.gates), t1 - t0, t2 - t1, "compressed")


def bench_dense(n: int, depth: int, rng: np.random.Generator) -> tuple[BenchRow, float]:
    """Dense verification of one random circuit; returns timing and max deviation."""
    circuit = simulate.random_circuit(n, depth, rng)
    t0 = time.perf_counter()
    e = simulate.compile_circuit(circuit)
    dev = 0.0
    for j in range(1, n + 1):
        state = oracle.run_circuit_dense(oracle.DenseState.occupied(n, (j,)), circuit)
        dev = max(dev, float(np.max(np.abs(oracle.occupations(state) - simulate.single_site_probabilities(j, e)))))
    t1 = time.perf_counter()
    return BenchRow(n, depth, len(circuit.gates), t1 - t0, 0.0, "dense"), dev
