"""Small dense complex-matrix kernel.

Matrices are plain ``numpy`` arrays of dtype ``complex128``. Every routine
validates its input shape and returns fresh arrays; nothing is mutated in
place.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Tolerances:
    construction: float = 1e-12
    check: float = 1e-10
    structural_zero: float = 1e-10
    term_residual: float = 1e-8


TOL = Tolerances()


class LinalgError(ValueError):
    """Raised for malformed matrix input (shape, hermiticity, unitarity)."""


def as_matrix(m) -> np.ndarray:
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2:
        raise LinalgError(f"expected a 2-d matrix, got shape {a.shape}")
    return a


def _square(m) -> np.ndarray:
    a = as_matrix(m)
    if a.shape[0] != a.shape[1] or a.shape[0] == 0:
        raise LinalgError(f"expected a non-empty square matrix, got shape {a.shape}")
    return a


def dagger(m) -> np.ndarray:
    return as_matrix(m).conj().T


def max_norm(m) -> float:
    a = np.asarray(m)
    return float(np.max(np.abs(a))) if a.size else 0.0


def is_hermitian(m, tol: float = TOL.construction) -> bool:
    a = _square(m)
    return max_norm(a - a.conj().T) <= tol


def unitarity_residual(m) -> float:
    a = _square(m)
    return max_norm(a.conj().T @ a - np.eye(a.shape[0]))


def is_unitary(m, tol: float = TOL.check) -> bool:
    return unitarity_residual(m) <= tol


def hermitian_eig(h, tol: float = TOL.construction) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decompose a Hermitian matrix.

    Returns ``(eigenvalues, eigenvectors)`` with ascending real eigenvalues and
    a unitary matrix whose columns are the eigenvectors, so that
    ``h == V @ diag(w) @ V^H``.
    """
    a = _square(h)
    if not is_hermitian(a, tol):
        raise LinalgError(
            f"matrix is not Hermitian (max |H - H^H| = {max_norm(a - a.conj().T):.3e})"
        )
    # symmetrize so eigh sees exactly Hermitian input
    w, v = np.linalg.eigh(0.5 * (a + a.conj().T))
    return w, v


def expm_hermitian(h, t: float) -> np.ndarray:
    """Return ``exp(-i h t)`` for Hermitian ``h`` (units with hbar = 1)."""
    w, v = hermitian_eig(h)
    return (v * np.exp(-1j * w * t)) @ v.conj().T


def unitary_log(u, tol: float = TOL.check) -> np.ndarray:
    """Hermitian generator ``h`` with ``u == exp(-i h)``.

    Eigenphases are taken on the principal branch (-pi, pi]; a phase sitting
    on the cut is mapped to +pi, i.e. the generator eigenvalue -pi.
    """
    a = _square(u)
    if not is_unitary(a, tol):
        raise LinalgError(f"matrix is not unitary (residual {unitarity_residual(a):.3e})")
    # A unitary is normal, so a Schur form is diagonal with unitary Z.
    from scipy.linalg import schur

    t, z = schur(a, output="complex")
    phases = np.angle(np.diag(t))
    phases = np.where(phases <= -np.pi + 1e-12, np.pi, phases)
    h = (z * (-phases)) @ z.conj().T
    return 0.5 * (h + h.conj().T)


def determinant(m) -> complex:
    """Determinant by LU factorisation with partial pivoting."""
    return complex(np.linalg.det(_square(m)))


def random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR of a complex Ginibre matrix."""
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_hermitian(n: int, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return scale * 0.5 * (z + z.conj().T)


def random_su2(rng: np.random.Generator) -> np.ndarray:
    a, b, c, d = rng.standard_normal(4)
    norm = np.sqrt(a * a + b * b + c * c + d * d)
    alpha = complex(a, b) / norm
    beta = complex(c, d) / norm
    return np.array([[alpha, beta], [-np.conj(beta), np.conj(alpha)]])
