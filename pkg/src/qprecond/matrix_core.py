"""Dense complex matrix primitives.

Matrices are plain ``numpy`` arrays of dtype ``complex128``. Every function
here returns a fresh array and never mutates its arguments.
"""

from __future__ import annotations

from functools import lru_cache
from typing import NamedTuple

import numpy as np

from .errors import (
    ConvergenceError,
    DimensionMismatchError,
    InvalidStateError,
    NotHermitianError,
)

DEFAULT_TOL = 1e-9
JACOBI_TOL = 1e-12
JACOBI_MAX_SWEEPS = 100


class HermitianEigenDecomposition(NamedTuple):
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def as_matrix(A) -> np.ndarray:
    """Coerce ``A`` to a finite square complex128 array (copying)."""
    M = np.array(A, dtype=np.complex128)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] == 0:
        raise DimensionMismatchError(f"expected a non-empty square matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValueError("matrix contains NaN or Inf entries")
    return M


def _same_dim(A: np.ndarray, B: np.ndarray) -> None:
    if A.shape != B.shape:
        raise DimensionMismatchError(f"dimension mismatch: {A.shape} vs {B.shape}")


def identity(n: int) -> np.ndarray:
    return np.eye(n, dtype=np.complex128)


def matrix_unit(n: int, i: int, j: int) -> np.ndarray:
    """E_ij: one in position (i, j), zero elsewhere."""
    E = np.zeros((n, n), dtype=np.complex128)
    E[i, j] = 1.0
    return E


def matrix_units(n: int):
    """Yield ``(i, j, E_ij)`` over the full matrix-unit basis of M_n, row-major."""
    for i in range(n):
        for j in range(n):
            yield i, j, matrix_unit(n, i, j)


def multiply(A, B) -> np.ndarray:
    A, B = as_matrix(A), as_matrix(B)
    _same_dim(A, B)
    return A @ B


def adjoint(A) -> np.ndarray:
    return as_matrix(A).conj().T


def trace(A) -> complex:
    return complex(np.trace(as_matrix(A)))


def frobenius_inner(A, B) -> complex:
    """<A, B> = Tr(A B*)."""
    A, B = as_matrix(A), as_matrix(B)
    _same_dim(A, B)
    return complex(np.sum(A * B.conj()))


def frobenius_norm(A) -> float:
    return float(np.linalg.norm(np.asarray(A), "fro"))


def diagonal_pinch(A) -> np.ndarray:
    """Keep the diagonal of ``A`` and zero every off-diagonal entry."""
    return np.diag(np.diag(as_matrix(A)))


def hermitian_residual(A) -> float:
    A = np.asarray(A)
    return frobenius_norm(A - A.conj().T)


def is_hermitian(A, tol: float = DEFAULT_TOL) -> bool:
    return hermitian_residual(as_matrix(A)) <= tol


def is_unitary(U, tol: float = DEFAULT_TOL) -> bool:
    U = as_matrix(U)
    eye = np.eye(U.shape[0])
    return (
        frobenius_norm(U.conj().T @ U - eye) <= tol
        and frobenius_norm(U @ U.conj().T - eye) <= tol
    )


@lru_cache(maxsize=None)
def _round_robin(n: int) -> tuple[tuple[np.ndarray, np.ndarray], ...]:
    # Circle-method tournament: each round is a set of disjoint (p, q) pairs,
    # and every pair of indices meets exactly once per sweep.
    m = n + (n % 2)
    players = list(range(m))
    rounds = []
    for _ in range(m - 1):
        pairs = [(players[k], players[m - 1 - k]) for k in range(m // 2)]
        pairs = [(min(p, q), max(p, q)) for p, q in pairs if p < n and q < n]
        rounds.append((np.array([p for p, _ in pairs]), np.array([q for _, q in pairs])))
        players = [players[0], players[-1]] + players[1:-1]
    return tuple(rounds)


def _off_norm(A: np.ndarray) -> float:
    # Computed from the off-diagonal entries directly; subtracting the
    # diagonal mass from the total cancels catastrophically near convergence.
    off = A[~np.eye(A.shape[0], dtype=bool)]
    return float(np.linalg.norm(off))


def hermitian_eig(
    A,
    tol: float = DEFAULT_TOL,
    jacobi_tol: float = JACOBI_TOL,
    max_sweeps: int = JACOBI_MAX_SWEEPS,
) -> HermitianEigenDecomposition:
    """Spectral decomposition of a Hermitian matrix by cyclic Jacobi rotations.

    Each sweep visits every off-diagonal pair once, in round-robin order so
    that the rotations within a round act on disjoint index pairs and can be
    applied together as a single unitary similarity. A complex pair
    ``[[a, b], [conj(b), d]]`` is first made real by the phase
    ``diag(1, exp(-i arg b))`` and then annihilated by a plane rotation.

    Parameters
    ----------
    A : array_like
        Hermitian matrix (checked to within ``tol`` in Frobenius norm).
    tol : float
        Hermiticity tolerance.
    jacobi_tol : float
        Stop once the off-diagonal Frobenius norm is at most
        ``jacobi_tol * ||A||_F``.
    max_sweeps : int
        Raise :class:`ConvergenceError` if not converged after this many sweeps.

    Returns
    -------
    HermitianEigenDecomposition
        Ascending real eigenvalues and a unitary matrix whose columns are the
        matching eigenvectors.
    """
    A = as_matrix(A)
    if hermitian_residual(A) > tol:
        raise NotHermitianError(f"matrix is not Hermitian (residual {hermitian_residual(A):.3e})")
    n = A.shape[0]
    A = 0.5 * (A + A.conj().T)
    V = np.eye(n, dtype=np.complex128)
    scale = frobenius_norm(A)
    target = jacobi_tol * scale

    sweeps = 0
    while scale > 0 and _off_norm(A) > target:
        if sweeps >= max_sweeps:
            raise ConvergenceError("Jacobi eigensolver did not converge", _off_norm(A))
        for P, Q in _round_robin(n):
            b = A[P, Q]
            absb = np.abs(b)
            phase = np.exp(1j * np.angle(b))
            theta = 0.5 * np.arctan2(2.0 * absb, A[P, P].real - A[Q, Q].real)
            c, s = np.cos(theta), np.sin(theta)
            J = np.eye(n, dtype=np.complex128)
            J[P, P] = c
            J[P, Q] = -s
            J[Q, P] = phase.conj() * s
            J[Q, Q] = phase.conj() * c
            A = J.conj().T @ A @ J
            A = 0.5 * (A + A.conj().T)
            V = V @ J
        sweeps += 1

    w = np.diag(A).real.copy()
    order = np.argsort(w, kind="stable")
    return HermitianEigenDecomposition(w[order], V[:, order])


def is_psd(A, tol: float = DEFAULT_TOL) -> bool:
    """True iff the smallest eigenvalue of Hermitian ``A`` is at least ``-tol``."""
    return bool(hermitian_eig(A, tol=tol).eigenvalues[0] >= -tol)


def min_eigenvalue(A, tol: float = DEFAULT_TOL) -> float:
    return float(hermitian_eig(A, tol=tol).eigenvalues[0])


def psd_sqrt(A, tol: float = DEFAULT_TOL, inverse: bool = False) -> np.ndarray:
    """Square root (or inverse square root) of a PSD matrix via its spectrum."""
    w, V = hermitian_eig(A, tol=tol)
    if w[0] < -tol:
        raise ValueError(f"matrix is not PSD (min eigenvalue {w[0]:.3e})")
    w = np.clip(w, 0.0, None)
    if inverse:
        if w[0] <= tol:
            raise ValueError("matrix is singular; no inverse square root")
        w = 1.0 / w
    return (V * np.sqrt(w)) @ V.conj().T


def density_violations(rho, tol: float = DEFAULT_TOL) -> list[str]:
    """Return the list of density-matrix invariants that ``rho`` violates."""
    rho = as_matrix(rho)
    problems = []
    herm = hermitian_residual(rho)
    if herm > tol:
        problems.append(f"not Hermitian (residual {herm:.3e})")
        return problems
    lam = min_eigenvalue(rho, tol=tol)
    if lam < -tol:
        problems.append(f"not PSD (min eigenvalue {lam:.3e})")
    tr = np.trace(rho)
    if abs(tr - 1.0) > tol:
        problems.append(f"trace {tr.real:.12g} != 1")
    return problems


def is_density(rho, tol: float = DEFAULT_TOL) -> bool:
    return not density_violations(rho, tol)


def as_density(rho, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Validate ``rho`` as a density matrix and return it as a fresh array."""
    problems = density_violations(rho, tol)
    if problems:
        raise InvalidStateError("invalid density matrix: " + "; ".join(problems))
    return as_matrix(rho)


def frozen(A: np.ndarray) -> np.ndarray:
    """Read-only copy, used for matrices held inside immutable containers."""
    M = np.array(A, dtype=np.complex128)
    M.setflags(write=False)
    return M
