"""Jordan-Wigner generators, ladder operators and the OSp(2n) <-> U(n) map.

Generators and modes are indexed from 1, qubit 1 is the most significant
bit of a dense basis index.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np

from .gates import GateClass, admissible_mask, classify_gate
from .linalg import TOL, LinalgError, as_matrix, is_unitary, max_norm

DENSE_OPERATOR_CAP = 12

_PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

# single-letter products: (a, b) -> (power of i, letter)
_TABLE: dict[tuple[str, str], tuple[int, str]] = {}
for _a in "IXYZ":
    _TABLE[("I", _a)] = (0, _a)
    _TABLE[(_a, "I")] = (0, _a)
    _TABLE[(_a, _a)] = (0, "I")
for _a, _b, _c in ("XYZ", "YZX", "ZXY"):
    _TABLE[(_a, _b)] = (1, _c)
    _TABLE[(_b, _a)] = (3, _c)


class CapacityError(ValueError):
    pass


class NotSymplectic(ValueError):
    pass


class NotAdmissible(ValueError):
    def __init__(self, gate_class: GateClass, detail: str = ""):
        msg = f"gate is not an admissible matchgate (classified {gate_class.value})"
        super().__init__(msg + (f": {detail}" if detail else ""))
        self.gate_class = gate_class


def _check_dense(n: int) -> None:
    if n > DENSE_OPERATOR_CAP:
        raise CapacityError(f"dense operators limited to n <= {DENSE_OPERATOR_CAP}, got {n}")


@dataclass(frozen=True)
class PauliString:
    """``i**power`` times a tensor product of single-qubit Pauli letters."""

    power: int
    letters: str

    def __post_init__(self):
        if set(self.letters) - set("IXYZ"):
            raise ValueError(f"invalid Pauli letters {self.letters!r}")
        object.__setattr__(self, "power", self.power % 4)

    @property
    def phase(self) -> complex:
        return (1, 1j, -1, -1j)[self.power]

    @property
    def n(self) -> int:
        return len(self.letters)

    def __mul__(self, other: "PauliString") -> "PauliString":
        if self.n != other.n:
            raise ValueError("Pauli strings act on different qubit counts")
        power = self.power + other.power
        out = []
        for a, b in zip(self.letters, other.letters):
            p, c = _TABLE[(a, b)]
            power += p
            out.append(c)
        return PauliString(power, "".join(out))

    def to_dense(self) -> np.ndarray:
        _check_dense(self.n)
        return self.phase * reduce(np.kron, (_PAULI[c] for c in self.letters), np.eye(1))

    def __str__(self) -> str:
        return f"{('', 'i', '-', '-i')[self.power]}{self.letters}"


def jw_generator(k: int, n: int) -> PauliString:
    """Clifford generator e_k, k = 1..2n, as i Z...Z X I...I (or Y for k > n)."""
    if not 1 <= k <= 2 * n:
        raise IndexError(f"generator index {k} outside 1..{2 * n}")
    site, letter = (k, "X") if k <= n else (k - n, "Y")
    return PauliString(1, "Z" * (site - 1) + letter + "I" * (n - site))


@dataclass(frozen=True)
class LadderOperator:
    kind: str
    index: int
    terms: tuple[tuple[complex, PauliString], tuple[complex, PauliString]]

    def to_dense(self) -> np.ndarray:
        return sum(c * p.to_dense() for c, p in self.terms)


def ladder_operator(k: int, n: int, kind: str = "annihilation") -> LadderOperator:
    if not 1 <= k <= n:
        raise IndexError(f"mode index {k} outside 1..{n}")
    e_k, e_kn = jw_generator(k, n), jw_generator(k + n, n)
    if kind == "annihilation":
        terms = ((1 / 2j, e_k), (1j / 2j, e_kn))
    elif kind == "creation":
        terms = ((1 / 2j, e_k), (-1j / 2j, e_kn))
    else:
        raise ValueError(f"unknown ladder kind {kind!r}")
    return LadderOperator(kind, k, terms)


def dense_annihilators(n: int) -> list[np.ndarray]:
    return [ladder_operator(k, n).to_dense() for k in range(1, n + 1)]


def j_matrix(n: int) -> np.ndarray:
    if n < 1:
        raise ValueError("n must be positive")
    z, i = np.zeros((n, n)), np.eye(n)
    return np.block([[z, i], [-i, z]])


def j_spin_element(n: int) -> np.ndarray:
    """Dense prod_k (I + i Z_k)/sqrt(2); diagonal in the computational basis."""
    _check_dense(n)
    ones = np.array([bin(b).count("1") for b in range(2**n)])
    # (1 + i z)/sqrt2 = exp(i pi z / 4) per qubit with z = 1 - 2*bit
    return np.diag(np.exp(1j * np.pi / 4 * (n - 2 * ones)))


def number_operator_dense(n: int) -> np.ndarray:
    _check_dense(n)
    return np.diag([float(bin(b).count("1")) for b in range(2**n)]).astype(complex)


def _is_orthogonal(r: np.ndarray, tol: float) -> bool:
    return max_norm(r.T @ r - np.eye(r.shape[0])) <= tol


def unitary_to_osp(u) -> np.ndarray:
    u = as_matrix(u)
    if u.shape[0] != u.shape[1] or not is_unitary(u):
        raise LinalgError("forward correspondence needs a square unitary matrix")
    re, im = u.real, u.imag
    return np.block([[re, im], [-im, re]])


def osp_to_unitary(r, tol: float = TOL.check) -> np.ndarray:
    r = np.asarray(r)
    if r.ndim != 2 or r.shape[0] != r.shape[1] or r.shape[0] % 2:
        raise LinalgError(f"expected a real 2n x 2n matrix, got shape {r.shape}")
    if np.iscomplexobj(r):
        if max_norm(r.imag) > tol:
            raise LinalgError("rotation matrix must be real")
        r = r.real
    n = r.shape[0] // 2
    j = j_matrix(n)
    if not _is_orthogonal(r, tol):
        raise NotSymplectic("matrix is not orthogonal")
    if max_norm(r @ j - j @ r) > tol:
        raise NotSymplectic(f"matrix does not commute with J (norm {max_norm(r @ j - j @ r):.3e})")
    return r[:n, :n] + 1j * r[:n, n:]


def osp_correspondence(direction: str, m) -> np.ndarray:
    """``direction`` is ``"forward"`` (U(n) -> OSp(2n)) or ``"backward"``."""
    if direction == "forward":
        return unitary_to_osp(m)
    if direction == "backward":
        return osp_to_unitary(m)
    raise ValueError(f"unknown direction {direction!r}")


def xi_matrix(n: int) -> np.ndarray:
    i = np.eye(n)
    return 0.5 * np.block([[i, 1j * i], [i, -1j * i]])


def xi_conjugate(r) -> np.ndarray:
    """Xi R Xi^-1, the complex form of a real 2n x 2n matrix."""
    r = np.asarray(r)
    xi = xi_matrix(r.shape[0] // 2)
    return xi @ r @ np.linalg.inv(xi)


_A2 = np.stack([ladder_operator(k, 2).to_dense() for k in (1, 2)])
_A2_DAG = np.conj(np.swapaxes(_A2, 1, 2))


def mode_actions(stack, tol: float = TOL.check) -> np.ndarray:
    """Batched ``mode_action`` over a (L, 4, 4) stack of admissible gates."""
    stack = np.asarray(stack, dtype=complex)
    ok = admissible_mask(stack)
    if not ok.all():
        bad = int(np.argmin(ok))
        raise NotAdmissible(classify_gate(stack[bad]), f"gate #{bad} in batch")
    g_dag = np.conj(np.swapaxes(stack, 1, 2))
    # conj[l, k] = G_l a_k G_l^H
    conj = np.einsum("lab,kbc,lcd->lkad", stack, _A2, g_dag)
    # m[l, k, j] = Tr(a_j^H conj[l, k]) / 2
    m = np.einsum("jda,lkad->lkj", _A2_DAG, conj) / 2
    rebuilt = np.einsum("lkj,jad->lkad", m, _A2)
    worst = np.abs(conj - rebuilt).max() if len(stack) else 0.0
    if worst > tol:
        raise NotAdmissible(GateClass.ADMISSIBLE_MATCHGATE, f"conjugated ladder operators leave the mode span ({worst:.3e})")
    return m


def mode_action(g, tol: float = TOL.check) -> np.ndarray:
    """2x2 matrix ``m`` with ``G a_k G^H = sum_j m[k, j] a_j`` on two qubits.

    Extracted numerically from the Hilbert-Schmidt overlaps
    Tr(a_j^H a_l) = 2 delta_jl, then checked against the full conjugation.
    """
    g = as_matrix(g)
    cls = classify_gate(g)
    if cls is not GateClass.ADMISSIBLE_MATCHGATE:
        raise NotAdmissible(cls)
    return mode_actions(g[None], tol)[0]
