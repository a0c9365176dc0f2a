"""Trigonometric transform unitaries and the projection families built from them."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import DimensionMismatchError, NotUnitaryError
from .matrix_core import DEFAULT_TOL, as_matrix, frobenius_norm, frozen, is_unitary

KINDS = ("fourier", "sine", "hartley")


@dataclass(frozen=True)
class GridSpec:
    n: int
    points: np.ndarray
    interval: tuple[float, float]

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.shape != (self.n,):
            raise DimensionMismatchError(f"grid has {pts.size} points, expected {self.n}")
        lo, hi = self.interval
        if np.any(pts < lo) or np.any(pts > hi):
            raise ValueError(f"grid points leave the interval [{lo}, {hi}]")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)


def fourier_grid(n: int) -> GridSpec:
    """x_i = 2*pi*i/n, which lies in [0, 2*pi)."""
    _check_order(n)
    return GridSpec(n, 2.0 * np.pi * np.arange(n) / n, (0.0, 2.0 * np.pi))


def sine_grid(n: int) -> GridSpec:
    """x_i = (i+1)*pi/(n+1) on [0, pi]."""
    _check_order(n)
    return GridSpec(n, (np.arange(n) + 1.0) * np.pi / (n + 1), (0.0, np.pi))


def _check_order(n: int) -> None:
    if not isinstance(n, (int, np.integer)) or isinstance(n, bool) or n < 1:
        raise ValueError(f"transform order must be a positive integer, got {n!r}")


def _checked(U: np.ndarray, name: str, tol: float) -> np.ndarray:
    if not is_unitary(U, tol):
        raise NotUnitaryError(f"{name} failed its unitarity self-check")
    return U


def vandermonde_matrix(funcs: Callable[[int, np.ndarray], np.ndarray], grid: GridSpec) -> np.ndarray:
    """Generalized Vandermonde matrix ``V[i, j] = v_j(x_i)``.

    ``funcs(j, x)`` evaluates the j-th function of the table at the grid
    points ``x`` (vectorized).
    """
    cols = []
    for j in range(grid.n):
        try:
            col = np.asarray(funcs(j, grid.points), dtype=np.complex128)
        except Exception as exc:
            raise ValueError(f"function table failed to evaluate column {j}") from exc
        col = np.broadcast_to(col, (grid.n,))
        if not np.all(np.isfinite(col)):
            raise ValueError(f"function table produced non-finite values in column {j}")
        cols.append(col)
    return np.stack(cols, axis=1)


def vandermonde_unitary(
    funcs: Callable[[int, np.ndarray], np.ndarray], grid: GridSpec, tol: float = DEFAULT_TOL
) -> tuple[np.ndarray, bool]:
    """Build the generalized Vandermonde matrix and report whether it is unitary."""
    V = vandermonde_matrix(funcs, grid)
    return V, is_unitary(V, tol)


def fourier_functions(n: int) -> Callable[[int, np.ndarray], np.ndarray]:
    return lambda j, x: np.exp(1j * j * x) / np.sqrt(n)


def sine_functions(n: int) -> Callable[[int, np.ndarray], np.ndarray]:
    return lambda j, x: np.sqrt(2.0 / (n + 1)) * np.sin((j + 1) * x)


def hartley_functions(n: int) -> Callable[[int, np.ndarray], np.ndarray]:
    return lambda j, x: (np.sin(j * x) + np.cos(j * x)) / np.sqrt(n)


def fourier_unitary(n: int, tol: float = DEFAULT_TOL) -> np.ndarray:
    """F_n with entries exp(i*j*x_i)/sqrt(n) on the Fourier grid."""
    _check_order(n)
    return _checked(vandermonde_matrix(fourier_functions(n), fourier_grid(n)), "fourier", tol)


def sine_unitary(n: int, tol: float = DEFAULT_TOL) -> np.ndarray:
    """G_n with entries sqrt(2/(n+1)) * sin((j+1)*x_i) on the sine grid."""
    _check_order(n)
    return _checked(vandermonde_matrix(sine_functions(n), sine_grid(n)), "sine", tol)


def hartley_unitary(n: int, tol: float = DEFAULT_TOL) -> np.ndarray:
    """H_n with entries (sin(j*x_i) + cos(j*x_i))/sqrt(n).

    Evaluated on the Fourier grid, where the cas kernel is orthogonal.
    """
    _check_order(n)
    return _checked(vandermonde_matrix(hartley_functions(n), fourier_grid(n)), "hartley", tol)


def transform_unitary(kind: str, n: int, tol: float = DEFAULT_TOL) -> np.ndarray:
    builders = {"fourier": fourier_unitary, "sine": sine_unitary, "hartley": hartley_unitary}
    if kind not in builders:
        raise ValueError(f"unknown transform kind {kind!r}; expected one of {', '.join(KINDS)}")
    return builders[kind](n, tol)


@dataclass(frozen=True)
class ProjectionSet:
    """Mutually orthogonal Hermitian projections that resolve the identity."""

    dim: int
    projections: tuple[np.ndarray, ...]

    def __post_init__(self):
        projs = tuple(frozen(as_matrix(P)) for P in self.projections)
        object.__setattr__(self, "projections", projs)
        problems = projection_set_violations(projs, self.dim, DEFAULT_TOL)
        if problems:
            raise ValueError("invalid projection set: " + "; ".join(problems))

    def __len__(self):
        return len(self.projections)

    def __iter__(self):
        return iter(self.projections)

    def ranks(self) -> list[int]:
        return [int(round(np.trace(P).real)) for P in self.projections]


def projection_set_violations(projs: Sequence[np.ndarray], dim: int, tol: float) -> list[str]:
    problems = []
    if not projs:
        return ["empty projection set"]
    for k, P in enumerate(projs):
        if P.shape != (dim, dim):
            return [f"projection {k} has shape {P.shape}, expected {(dim, dim)}"]
        if frobenius_norm(P - P.conj().T) > tol:
            problems.append(f"projection {k} is not Hermitian")
        if frobenius_norm(P @ P - P) > tol:
            problems.append(f"projection {k} is not idempotent")
    for j in range(len(projs)):
        for k in range(j + 1, len(projs)):
            if frobenius_norm(projs[j] @ projs[k]) > tol:
                problems.append(f"projections {j} and {k} are not orthogonal")
    if frobenius_norm(sum(projs) - np.eye(dim)) > tol:
        problems.append("projections do not sum to the identity")
    return problems


def rank_one_projections(U, tol: float = DEFAULT_TOL) -> ProjectionSet:
    """p_j = u_j u_j^* for the columns u_j of a unitary ``U``."""
    U = as_matrix(U)
    if not is_unitary(U, tol):
        raise NotUnitaryError("rank_one_projections needs a unitary matrix")
    return ProjectionSet(U.shape[0], tuple(np.outer(U[:, j], U[:, j].conj()) for j in range(U.shape[0])))


def validate_partition(dim: int, partition: Sequence[Sequence[int]]) -> tuple[tuple[int, ...], ...]:
    blocks = tuple(tuple(int(i) for i in block) for block in partition)
    seen: set[int] = set()
    for block in blocks:
        if not block:
            raise ValueError("partition contains an empty block")
        for i in block:
            if not 0 <= i < dim:
                raise ValueError(f"partition index {i} outside 0..{dim - 1}")
            if i in seen:
                raise ValueError(f"partition blocks overlap at index {i}")
            seen.add(i)
    if len(seen) != dim:
        missing = sorted(set(range(dim)) - seen)
        raise ValueError(f"partition does not cover indices {missing}")
    return blocks


def singleton_partition(dim: int) -> tuple[tuple[int, ...], ...]:
    return tuple((i,) for i in range(dim))


def block_projections(dim: int, partition: Sequence[Sequence[int]]) -> ProjectionSet:
    """Coordinate projections onto the blocks of a partition of 0..dim-1."""
    blocks = validate_partition(dim, partition)
    projs = []
    for block in blocks:
        P = np.zeros((dim, dim), dtype=np.complex128)
        P[list(block), list(block)] = 1.0
        projs.append(P)
    return ProjectionSet(dim, tuple(projs))
