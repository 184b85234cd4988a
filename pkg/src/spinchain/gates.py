"""Two-qubit gate algebra for nearest-neighbour links.

Basis order for a 4x4 gate is |00>, |01>, |10>, |11> with the left qubit
most significant. The "outer" block lives on {|00>, |11>} (rows/cols 0, 3)
and the "inner" block on {|01>, |10>} (rows/cols 1, 2).
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, fields

import numpy as np

from .linalg import TOL, LinalgError, as_matrix, expm_hermitian, is_unitary, unitarity_residual, unitary_log

OUTER = [0, 3]
INNER = [1, 2]

_I2 = np.eye(2, dtype=complex)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)

IDENTITY = np.eye(4, dtype=complex)
SIGMA = (np.kron(_X, _X) + np.kron(_Y, _Y)) / 2
LAMBDA = (np.kron(_Y, _X) - np.kron(_X, _Y)) / 2
DELTA = (np.kron(_Z, _I2) - np.kron(_I2, _Z)) / 2
DELTA_P = (np.kron(_Z, _I2) + np.kron(_I2, _Z)) / 2
THETA = (np.eye(4) - np.kron(_Z, _Z)) / 2
SIGMA_P = (np.kron(_X, _X) - np.kron(_Y, _Y)) / 2
LAMBDA_P = (np.kron(_Y, _X) + np.kron(_X, _Y)) / 2

SWAP = np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex)
SIGNED_SWAP = np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, -1]], dtype=complex)

# positions that must vanish for the matchgate pattern (0-based)
_MATCH_ZEROS = [(0, 1), (0, 2), (1, 0), (2, 0), (1, 3), (2, 3), (3, 1), (3, 2)]
_CORNERS = [(0, 3), (3, 0)]


class NotAMatchgate(ValueError):
    pass


class NotInTermBasis(ValueError):
    def __init__(self, residual: float):
        super().__init__(f"matrix is outside the two-qubit term basis (residual {residual:.3e})")
        self.residual = residual


class UnknownGate(KeyError):
    pass


class GateClass(str, enum.Enum):
    ADMISSIBLE_MATCHGATE = "AdmissibleMatchgate"
    GENERAL_MATCHGATE = "GeneralMatchgate"
    NUMBER_PRESERVING = "NumberPreserving"
    OTHER = "Other"


@dataclass(frozen=True)
class MatchgateParams:
    """Phase ``theta`` and SU(2) blocks ``A`` (outer) and ``B`` (inner)."""

    theta: float
    A: np.ndarray
    B: np.ndarray

    def __post_init__(self):
        for name in ("A", "B"):
            m = as_matrix(getattr(self, name))
            if m.shape != (2, 2):
                raise LinalgError(f"{name} must be 2x2, got {m.shape}")
            if not is_unitary(m):
                raise LinalgError(f"{name} is not unitary")
            if abs(np.linalg.det(m) - 1) > TOL.check:
                raise LinalgError(f"det {name} = {np.linalg.det(m):.6g}, expected 1")
            object.__setattr__(self, name, m)


@dataclass(frozen=True)
class TermCoefficients:
    lambda0: float = 0.0
    sigma: float = 0.0
    lambda_: float = 0.0
    delta: float = 0.0
    deltaP: float = 0.0
    thetaT: float = 0.0
    sigmaP: float = 0.0
    lambdaP: float = 0.0

    def __post_init__(self):
        for f in fields(self):
            v = float(getattr(self, f.name))
            if not np.isfinite(v):
                raise ValueError(f"{f.name} must be finite")
            object.__setattr__(self, f.name, v)

    @property
    def admissible(self) -> bool:
        return self.sigmaP == 0.0 and self.lambdaP == 0.0 and self.thetaT == 0.0

    def as_dict(self) -> dict[str, float]:
        return {f.name: getattr(self, f.name) for f in fields(self)}


TERM_BASIS = {
    "lambda0": IDENTITY,
    "sigma": SIGMA,
    "lambda_": LAMBDA,
    "delta": DELTA,
    "deltaP": DELTA_P,
    "thetaT": THETA,
    "sigmaP": SIGMA_P,
    "lambdaP": LAMBDA_P,
}


def _gate(g) -> np.ndarray:
    a = as_matrix(g)
    if a.shape != (4, 4):
        raise LinalgError(f"two-qubit gate must be 4x4, got {a.shape}")
    return a


def compose_matchgate(p: MatchgateParams) -> np.ndarray:
    g = np.zeros((4, 4), dtype=complex)
    g[np.ix_(OUTER, OUTER)] = p.A
    g[np.ix_(INNER, INNER)] = p.B
    return np.exp(1j * p.theta) * g


def _pattern_violation(g: np.ndarray, entries, tol: float):
    worst = max(entries, key=lambda ij: abs(g[ij]))
    return worst if abs(g[worst]) > tol else None


def _determinants(g: np.ndarray) -> tuple[complex, complex]:
    return (
        complex(np.linalg.det(g[np.ix_(OUTER, OUTER)])),
        complex(np.linalg.det(g[np.ix_(INNER, INNER)])),
    )


def decompose_matchgate(g, tol: float = TOL.structural_zero) -> MatchgateParams:
    """Split a matchgate into ``(theta, A, B)`` with ``A, B`` in SU(2).

    ``theta`` is half the phase of the common block determinant, so it lies
    in (-pi/2, pi/2]; the other solution ``(theta + pi, -A, -B)`` is never
    returned.
    """
    g = _gate(g)
    bad = _pattern_violation(g, _MATCH_ZEROS, tol)
    if bad is not None:
        raise NotAMatchgate(f"entry ({bad[0] + 1},{bad[1] + 1}) = {g[bad]:.3g} should vanish")
    det_outer, det_inner = _determinants(g)
    if abs(det_outer - det_inner) > tol:
        raise NotAMatchgate(
            f"block determinants differ: outer {det_outer:.6g}, inner {det_inner:.6g}"
        )
    theta = float(np.angle(det_outer)) / 2
    if theta <= -np.pi / 2:
        theta += np.pi
    phase = np.exp(-1j * theta)
    return MatchgateParams(theta, phase * g[np.ix_(OUTER, OUTER)], phase * g[np.ix_(INNER, INNER)])


def hamiltonian_from_terms(c: TermCoefficients) -> np.ndarray:
    h = np.zeros((4, 4), dtype=complex)
    for name, basis in TERM_BASIS.items():
        h += getattr(c, name) * basis
    return h


_BASIS_STACK = np.stack([b.ravel() for b in TERM_BASIS.values()], axis=1)
_REAL_BASIS = np.vstack([_BASIS_STACK.real, _BASIS_STACK.imag])


def terms_from_hamiltonian(h, tol: float = TOL.term_residual) -> TermCoefficients:
    """Real coefficients of ``h`` over the eight-element term basis.

    Identity and Theta overlap in trace, so the projection is a real least
    squares fit rather than independent traces.
    """
    h = _gate(h)
    target = np.concatenate([h.ravel().real, h.ravel().imag])
    coef, *_ = np.linalg.lstsq(_REAL_BASIS, target, rcond=None)
    residual = float(np.max(np.abs(_REAL_BASIS @ coef - target)))
    if residual > tol:
        raise NotInTermBasis(residual)
    coef = np.where(np.abs(coef) < TOL.construction, 0.0, coef)
    return TermCoefficients(*coef)


def gate_generator(g) -> np.ndarray:
    """Principal-branch Hermitian ``h`` with ``g == exp(-i h)``."""
    return unitary_log(_gate(g))


def classify_gate(g, tol: float = TOL.structural_zero) -> GateClass:
    g = _gate(g)
    if not is_unitary(g):
        raise LinalgError(f"gate is not unitary (residual {unitarity_residual(g):.3e})")
    if _pattern_violation(g, _MATCH_ZEROS, tol) is not None:
        return GateClass.OTHER
    det_outer, det_inner = _determinants(g)
    det_ok = abs(det_outer - det_inner) <= tol
    number_preserving = _pattern_violation(g, _CORNERS, tol) is None
    if number_preserving:
        return GateClass.ADMISSIBLE_MATCHGATE if det_ok else GateClass.NUMBER_PRESERVING
    return GateClass.GENERAL_MATCHGATE if det_ok else GateClass.OTHER


def admissible_mask(stack: np.ndarray, tol: float = TOL.structural_zero) -> np.ndarray:
    """Vectorised AdmissibleMatchgate test over a (L, 4, 4) stack."""
    stack = np.asarray(stack, dtype=complex)
    eye = np.eye(4)
    unitary = np.abs(np.conj(np.swapaxes(stack, 1, 2)) @ stack - eye).max(axis=(1, 2)) <= TOL.check
    zeros = _MATCH_ZEROS + _CORNERS
    rows, cols = zip(*zeros)
    pattern = np.abs(stack[:, rows, cols]).max(axis=1) <= tol
    det_outer = stack[:, 0, 0] * stack[:, 3, 3] - stack[:, 0, 3] * stack[:, 3, 0]
    det_inner = stack[:, 1, 1] * stack[:, 2, 2] - stack[:, 1, 2] * stack[:, 2, 1]
    return unitary & pattern & (np.abs(det_outer - det_inner) <= tol)


def builtin_gate(name: str, *params: float) -> np.ndarray:
    """Named gates: swap, signed_swap, xy(a), chiral(a), phase_z(d, dp)."""
    arity = {"swap": 0, "signed_swap": 0, "xy": 1, "chiral": 1, "phase_z": 2}
    if name not in arity:
        raise UnknownGate(name)
    if len(params) != arity[name]:
        raise ValueError(f"{name} takes {arity[name]} parameter(s), got {len(params)}")
    if name == "swap":
        return SWAP.copy()
    if name == "signed_swap":
        return SIGNED_SWAP.copy()
    if name == "xy":
        return expm_hermitian(SIGMA, params[0])
    if name == "chiral":
        return expm_hermitian(LAMBDA, params[0])
    return expm_hermitian(params[0] * DELTA + params[1] * DELTA_P, 1.0)


def random_admissible_gate(rng: np.random.Generator) -> np.ndarray:
    from .linalg import random_su2

    phi = rng.uniform(-np.pi, np.pi)
    a = np.diag([np.exp(1j * phi), np.exp(-1j * phi)])
    return compose_matchgate(MatchgateParams(rng.uniform(-np.pi, np.pi), a, random_su2(rng)))


def random_matchgate(rng: np.random.Generator) -> np.ndarray:
    from .linalg import random_su2

    return compose_matchgate(
        MatchgateParams(rng.uniform(-np.pi, np.pi), random_su2(rng), random_su2(rng))
    )
