"""Stochastic matrices of Holevo channels and idempotency / inverse probes."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .channel_reps import HolevoChannel, basis_residual, compose
from .errors import DimensionMismatchError
from .matrix_core import DEFAULT_TOL, as_matrix, frobenius_norm, hermitian_eig, matrix_units

INDEPENDENCE_TOL = 1e-8


@dataclass(frozen=True)
class StochasticMatrix:
    """Real nonnegative matrix whose columns are probability vectors."""

    entries: np.ndarray
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        A = np.array(self.entries, dtype=float)
        if A.ndim != 2 or A.shape[0] != A.shape[1] or A.size == 0:
            raise DimensionMismatchError(f"stochastic matrix must be square, got shape {A.shape}")
        if not np.all(np.isfinite(A)):
            raise ValueError("stochastic matrix has non-finite entries")
        if A.min() < -self.tol:
            raise ValueError(f"stochastic matrix has negative entry {A.min():.3e}")
        col_err = np.abs(A.sum(axis=0) - 1.0).max()
        if col_err > self.tol:
            raise ValueError(f"columns do not sum to one (max deviation {col_err:.3e})")
        A.setflags(write=False)
        object.__setattr__(self, "entries", A)

    @property
    def size(self) -> int:
        return self.entries.shape[0]


def is_probability_vector(v, tol: float = DEFAULT_TOL) -> bool:
    v = np.asarray(v, dtype=float)
    return v.ndim == 1 and v.min() >= -tol and abs(v.sum() - 1.0) <= tol


def _pairings(A_list: Sequence[np.ndarray], B_list: Sequence[np.ndarray]) -> np.ndarray:
    # M[i, k] = Tr(A_i B_k)
    A, B = np.stack(A_list), np.stack(B_list)
    return np.einsum("iab,kba->ik", A, B)


def cross_stochastic(povm: Sequence, densities: Sequence) -> np.ndarray:
    """Real matrix M[i, k] = Tr(povm_i density_k)."""
    povm = [as_matrix(F) for F in povm]
    densities = [as_matrix(R) for R in densities]
    if not povm or not densities:
        raise ValueError("cross_stochastic needs non-empty operator lists")
    dims = {M.shape for M in povm + densities}
    if len(dims) != 1:
        raise DimensionMismatchError(f"operators have mismatched shapes {sorted(dims)}")
    return _pairings(povm, densities).real


def stochastic_of(ch: HolevoChannel) -> StochasticMatrix:
    """A[i, j] = Tr(F_i R_j); column j is the outcome distribution of R_j."""
    return StochasticMatrix(cross_stochastic(ch.povm, ch.densities), tol=ch.tol)


def modified_product(ch1: HolevoChannel, ch2: HolevoChannel) -> StochasticMatrix:
    """Stochastic matrix of ``ch1`` after ``ch2`` from pairings alone.

    For ch1 = (F, R) and ch2 = (H, S) this is B @ C with
    B[i, k] = Tr(H_i R_k) and C[k, j] = Tr(F_k S_j).
    """
    if ch1.dim != ch2.dim:
        raise DimensionMismatchError(f"channels act on dims {ch1.dim} and {ch2.dim}")
    B = cross_stochastic(ch2.povm, ch1.densities)
    C = cross_stochastic(ch1.povm, ch2.densities)
    return StochasticMatrix(B @ C, tol=max(ch1.tol, ch2.tol))


def idempotency_residual(ch) -> float:
    """max over matrix units of ||Phi(Phi(E_ij)) - Phi(E_ij)||_F."""
    worst = 0.0
    for _, _, E in matrix_units(ch.dim):
        once = ch.apply(E)
        worst = max(worst, frobenius_norm(ch.apply(once) - once))
    return worst


def is_idempotent_operational(ch, tol: float = DEFAULT_TOL) -> bool:
    return idempotency_residual(ch) <= tol


def density_spanning_set(n: int) -> list[np.ndarray]:
    """n^2 density matrices spanning the Hermitian matrices on C^n.

    E_ii, (E_ii + E_jj + E_ij + E_ji)/2 and (E_ii + E_jj + iE_ji - iE_ij)/2.
    """
    out = []
    for i in range(n):
        E = np.zeros((n, n), dtype=np.complex128)
        E[i, i] = 1.0
        out.append(E)
    for i in range(n):
        for j in range(i + 1, n):
            X = np.zeros((n, n), dtype=np.complex128)
            X[i, i] = X[j, j] = X[i, j] = X[j, i] = 0.5
            out.append(X)
            Y = np.zeros((n, n), dtype=np.complex128)
            Y[i, i] = Y[j, j] = 0.5
            Y[j, i] = 0.5j
            Y[i, j] = -0.5j
            out.append(Y)
    return out


def densities_independent(densities: Sequence[np.ndarray], tol: float = INDEPENDENCE_TOL) -> bool:
    """Linear independence via the numerical rank of the Gram matrix."""
    vecs = np.stack([np.asarray(R).ravel() for R in densities])
    gram = vecs.conj() @ vecs.T
    w = hermitian_eig(gram, tol=max(tol, 1e-9)).eigenvalues
    return bool(w[0] > tol * max(w[-1], 1.0))


@dataclass(frozen=True)
class HolevoIdempotency:
    """Outcome of the steady-state test.

    ``applicable`` is False when the densities are linearly dependent, in
    which case ``idempotent`` is None and no verdict is given.
    """

    applicable: bool
    idempotent: bool | None
    residual: float | None
    worst_state: np.ndarray | None
    reason: str = ""

    def __bool__(self):
        return bool(self.idempotent)


def is_idempotent_holevo(ch: HolevoChannel, tol: float = DEFAULT_TOL) -> HolevoIdempotency:
    """Idempotency of a Holevo channel as a steady-state condition.

    Checks A v(rho) = v(rho) with v(rho)_k = Tr(rho F_k) and A the
    stochastic matrix, for rho over a spanning family of densities. The
    criterion only characterizes idempotency when the densities R_k are
    linearly independent; otherwise the result is marked inapplicable.
    """
    if not densities_independent(ch.densities):
        return HolevoIdempotency(False, None, None, None, "characterization inapplicable: densities are linearly dependent")
    A = stochastic_of(ch).entries
    F = np.stack(ch.povm)
    worst, worst_rho = -1.0, None
    for rho in density_spanning_set(ch.dim):
        v = np.einsum("ab,kba->k", rho, F).real
        r = float(np.linalg.norm(A @ v - v))
        if r > worst:
            worst, worst_rho = r, rho
    return HolevoIdempotency(True, worst <= tol, worst, worst_rho)


def is_idempotent_stochastic(A: StochasticMatrix, tol: float = DEFAULT_TOL) -> bool:
    M = A.entries
    return float(np.linalg.norm(M @ M - M)) <= tol


@dataclass(frozen=True)
class IdentityCheck:
    name: str
    residual: float
    tol: float

    @property
    def holds(self) -> bool:
        return self.residual <= self.tol


def _check_dims(*channels) -> None:
    dims = {ch.dim for ch in channels}
    if len(dims) != 1:
        raise DimensionMismatchError(f"channels act on different dims {sorted(dims)}")


def generalized_inverse_probe(a, a_dagger, tol: float = DEFAULT_TOL) -> dict[str, IdentityCheck]:
    """Test a a' a = a, a' a a' = a', and idempotency of a a' and a' a."""
    _check_dims(a, a_dagger)
    return {
        "generalized_inverse": IdentityCheck("a.a'.a = a", basis_residual(compose(a, a_dagger, a), a), tol),
        "semi_inverse": IdentityCheck("a'.a.a' = a'", basis_residual(compose(a_dagger, a, a_dagger), a_dagger), tol),
        "a_adag_idempotent": IdentityCheck("a.a' idempotent", idempotency_residual(compose(a, a_dagger)), tol),
        "adag_a_idempotent": IdentityCheck("a'.a idempotent", idempotency_residual(compose(a_dagger, a)), tol),
    }


def resource_destroying_check(delta, phi, tol: float = DEFAULT_TOL) -> dict[str, IdentityCheck]:
    """Identities linking a resource-destroying map delta with a channel phi.

    ``absorb_left`` and ``absorb_right`` together form phi.delta = delta =
    delta.phi; ``commute_left`` is phi.delta = delta.phi.delta and
    ``commute_right`` is delta.phi = delta.phi.delta. The ``fixes_*``
    entries test the reverse absorption phi.delta = phi = delta.phi, which
    is what a permutation channel satisfies against its own P_U.
    """
    _check_dims(delta, phi)
    return {
        "absorb_left": IdentityCheck("phi.delta = delta", basis_residual(compose(phi, delta), delta), tol),
        "absorb_right": IdentityCheck("delta.phi = delta", basis_residual(compose(delta, phi), delta), tol),
        "commute_left": IdentityCheck(
            "phi.delta = delta.phi.delta", basis_residual(compose(phi, delta), compose(delta, phi, delta)), tol
        ),
        "commute_right": IdentityCheck(
            "delta.phi = delta.phi.delta", basis_residual(compose(delta, phi), compose(delta, phi, delta)), tol
        ),
        "fixes_left": IdentityCheck("delta.phi = phi", basis_residual(compose(delta, phi), phi), tol),
        "fixes_right": IdentityCheck("phi.delta = phi", basis_residual(compose(phi, delta), phi), tol),
    }
