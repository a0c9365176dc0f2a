"""Channel representations, conversions between them, and axiom checks.

Every channel type exposes ``dim`` and a linear ``apply(A)`` on M_n, so any
two channels can be composed or compared on the matrix-unit basis.
Composition follows operator order: ``compose(f, g)`` applies ``g`` first.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Protocol, Sequence

import numpy as np

from .errors import (
    DimensionMismatchError,
    InvalidChannelError,
    NotCompletelyPositiveError,
    NotHermitianError,
    NotUnitaryError,
)
from .matrix_core import (
    DEFAULT_TOL,
    as_density,
    as_matrix,
    density_violations,
    frobenius_inner,
    frobenius_norm,
    frozen,
    hermitian_eig,
    hermitian_residual,
    is_unitary,
    matrix_units,
    min_eigenvalue,
)
from .transform_unitaries import (
    ProjectionSet,
    block_projections,
    rank_one_projections,
    singleton_partition,
    validate_partition,
)


class Channel(Protocol):
    dim: int

    def apply(self, A: np.ndarray) -> np.ndarray: ...


def _check_input(dim: int, A) -> np.ndarray:
    A = as_matrix(A)
    if A.shape != (dim, dim):
        raise DimensionMismatchError(f"channel acts on {dim}x{dim} matrices, got {A.shape}")
    return A


# --------------------------------------------------------------------------
# Pinchings and preconditioner maps
# --------------------------------------------------------------------------


def pinching_apply(spec: ProjectionSet, A) -> np.ndarray:
    """Sum of P_k A P_k over the projections of ``spec``."""
    A = _check_input(spec.dim, A)
    return sum(P @ A @ P for P in spec.projections)


@dataclass(frozen=True)
class PreconditionerChannel:
    """A -> U Psi(U^* A U) U^* for a unitary U and a pinching Psi.

    With rank-one coordinate projections this is the diagonal preconditioner
    P_U; coarser partitions give the block variant.
    """

    U: np.ndarray
    pinching: ProjectionSet
    partition: tuple[tuple[int, ...], ...] | None = None

    def __post_init__(self):
        U = as_matrix(self.U)
        if not is_unitary(U):
            raise NotUnitaryError("preconditioner channel needs a unitary U")
        if self.pinching.dim != U.shape[0]:
            raise DimensionMismatchError(
                f"pinching acts on dimension {self.pinching.dim}, U has dimension {U.shape[0]}"
            )
        object.__setattr__(self, "U", frozen(U))

    @property
    def dim(self) -> int:
        return self.U.shape[0]

    @property
    def is_rank_one(self) -> bool:
        return all(r == 1 for r in self.pinching.ranks())

    def apply(self, A) -> np.ndarray:
        return preconditioner_apply(self, A)


def preconditioner(U, partition: Sequence[Sequence[int]] | None = None) -> PreconditionerChannel:
    """Preconditioner channel of ``U`` pinched on coordinate blocks.

    ``partition=None`` means singleton blocks, i.e. the diagonal map P_U.
    """
    U = as_matrix(U)
    n = U.shape[0]
    blocks = singleton_partition(n) if partition is None else validate_partition(n, partition)
    return PreconditionerChannel(U, block_projections(n, blocks), blocks)


def preconditioner_apply(ch: PreconditionerChannel, A) -> np.ndarray:
    A = _check_input(ch.dim, A)
    U = ch.U
    return U @ pinching_apply(ch.pinching, U.conj().T @ A @ U) @ U.conj().T


# --------------------------------------------------------------------------
# Kraus form
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class KrausChannel:
    dim: int
    kraus_ops: tuple[np.ndarray, ...]

    def __post_init__(self):
        if not self.kraus_ops:
            raise InvalidChannelError("a Kraus channel needs at least one operator")
        ops = tuple(frozen(as_matrix(K)) for K in self.kraus_ops)
        for k, K in enumerate(ops):
            if K.shape != (self.dim, self.dim):
                raise DimensionMismatchError(
                    f"Kraus operator {k} has shape {K.shape}, expected {(self.dim, self.dim)}"
                )
        object.__setattr__(self, "kraus_ops", ops)

    def __len__(self):
        return len(self.kraus_ops)

    def completeness_residual(self) -> float:
        """||sum_k V_k^* V_k - I||_F."""
        total = sum(K.conj().T @ K for K in self.kraus_ops)
        return frobenius_norm(total - np.eye(self.dim))

    def is_trace_preserving(self, tol: float = DEFAULT_TOL) -> bool:
        return self.completeness_residual() <= tol

    def apply(self, S) -> np.ndarray:
        return kraus_apply(self, S)


def kraus_channel(ops: Sequence) -> KrausChannel:
    ops = [as_matrix(K) for K in ops]
    if not ops:
        raise InvalidChannelError("a Kraus channel needs at least one operator")
    return KrausChannel(ops[0].shape[0], tuple(ops))


def identity_channel(n: int) -> KrausChannel:
    return KrausChannel(n, (np.eye(n, dtype=np.complex128),))


def kraus_apply(ch: KrausChannel, S) -> np.ndarray:
    """sum_k V_k S V_k^*."""
    S = _check_input(ch.dim, S)
    ops = np.stack(ch.kraus_ops)
    return np.sum(ops @ S @ ops.conj().transpose(0, 2, 1), axis=0)


def kraus_from_preconditioner(ch: PreconditionerChannel) -> KrausChannel:
    """Kraus operators V_k = U P_k U^* of a preconditioner channel."""
    U = ch.U
    return KrausChannel(ch.dim, tuple(U @ P @ U.conj().T for P in ch.pinching.projections))


def compose_kraus(ch1: KrausChannel, ch2: KrausChannel) -> KrausChannel:
    """Kraus form of ``ch1`` after ``ch2``: all products A_k B_l."""
    if ch1.dim != ch2.dim:
        raise DimensionMismatchError(f"cannot compose channels on dims {ch1.dim} and {ch2.dim}")
    return KrausChannel(ch1.dim, tuple(A @ B for A in ch1.kraus_ops for B in ch2.kraus_ops))


def permutation_channel(U, perm: Sequence[int]) -> KrausChannel:
    """T -> U Pi_S(sigma(U^* T U)) U^*, moving diagonal entry j to slot perm[j].

    Realized by the rank-one operators u_{S(j)} u_j^* built from the columns
    of ``U``.
    """
    U = as_matrix(U)
    n = U.shape[0]
    if not is_unitary(U):
        raise NotUnitaryError("permutation channel needs a unitary U")
    perm = [int(s) for s in perm]
    if sorted(perm) != list(range(n)):
        raise ValueError(f"{perm} is not a permutation of 0..{n - 1}")
    ops = tuple(np.outer(U[:, perm[j]], U[:, j].conj()) for j in range(n))
    ch = KrausChannel(n, ops)
    if not ch.is_trace_preserving():
        raise InvalidChannelError("permutation channel failed its trace-preservation self-check")
    return ch


# --------------------------------------------------------------------------
# Holevo (measure-and-prepare) form
# --------------------------------------------------------------------------


def _holevo_violations(povm, densities, tol) -> list[str]:
    problems = []
    if len(povm) != len(densities):
        return [f"{len(povm)} POVM elements but {len(densities)} densities"]
    if not povm:
        return ["empty Holevo form"]
    n = povm[0].shape[0]
    for k, (F, R) in enumerate(zip(povm, densities)):
        if F.shape != (n, n) or R.shape != (n, n):
            return [f"component {k} has mismatched dimensions"]
        if hermitian_residual(F) > tol:
            problems.append(f"POVM element {k} is not Hermitian")
        elif min_eigenvalue(F, tol) < -tol:
            problems.append(f"POVM element {k} is not PSD")
        problems.extend(f"density {k}: {p}" for p in density_violations(R, tol))
    if frobenius_norm(sum(povm) - np.eye(n)) > tol:
        problems.append("POVM does not resolve the identity")
    return problems


@dataclass(frozen=True)
class HolevoChannel:
    """rho -> sum_k Tr(rho F_k) R_k for a POVM {F_k} and densities {R_k}."""

    povm: tuple[np.ndarray, ...]
    densities: tuple[np.ndarray, ...]
    tol: float = field(default=DEFAULT_TOL, compare=False)

    def __post_init__(self):
        povm = tuple(frozen(as_matrix(F)) for F in self.povm)
        dens = tuple(frozen(as_matrix(R)) for R in self.densities)
        problems = _holevo_violations(povm, dens, self.tol)
        if problems:
            raise InvalidChannelError("invalid Holevo form: " + "; ".join(problems))
        object.__setattr__(self, "povm", povm)
        object.__setattr__(self, "densities", dens)

    @property
    def dim(self) -> int:
        return self.povm[0].shape[0]

    def __len__(self):
        return len(self.povm)

    def apply(self, A) -> np.ndarray:
        A = _check_input(self.dim, A)
        weights = np.einsum("ij,kji->k", A, np.stack(self.povm))
        return np.einsum("k,kij->ij", weights, np.stack(self.densities))


def holevo_apply(ch: HolevoChannel, rho, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Apply a Holevo channel to a density matrix, checking both ends."""
    rho = as_density(_check_input(ch.dim, rho), tol)
    return as_density(ch.apply(rho), tol)


def constant_channel(sigma) -> HolevoChannel:
    """The replacement channel rho -> Tr(rho) sigma."""
    sigma = as_matrix(sigma)
    return HolevoChannel((np.eye(sigma.shape[0], dtype=np.complex128),), (sigma,))


def holevo_from_preconditioner(U, tol: float = DEFAULT_TOL) -> HolevoChannel:
    """Classical-quantum form of P_U: POVM and densities are both u_j u_j^*."""
    U = as_matrix(U)
    if not is_unitary(U, tol):
        raise NotUnitaryError("holevo_from_preconditioner needs a unitary U")
    projs = rank_one_projections(U, tol).projections
    return HolevoChannel(projs, projs)


def holevo_compose(ch1: HolevoChannel, ch2: HolevoChannel) -> HolevoChannel:
    """Holevo form of ``ch1`` after ``ch2``.

    With ch1 = (F, R) and ch2 = (H, S) the result keeps the POVM H and uses
    the densities L_j = sum_k Tr(F_k S_j) R_k.
    """
    if ch1.dim != ch2.dim:
        raise DimensionMismatchError(f"cannot compose channels on dims {ch1.dim} and {ch2.dim}")
    F, R = np.stack(ch1.povm), np.stack(ch1.densities)
    S = np.stack(ch2.densities)
    weights = np.einsum("kab,jba->jk", F, S)
    L = np.einsum("jk,kab->jab", weights, R)
    return HolevoChannel(ch2.povm, tuple(L), tol=max(ch1.tol, ch2.tol))


# --------------------------------------------------------------------------
# Generic maps and composition
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class LinearMap:
    """An arbitrary linear map on M_n given as a callable (need not be CP)."""

    dim: int
    func: Callable[[np.ndarray], np.ndarray]
    name: str = "linear map"

    def apply(self, A) -> np.ndarray:
        return as_matrix(self.func(_check_input(self.dim, A)))


def transpose_map(n: int) -> LinearMap:
    return LinearMap(n, lambda A: A.T, "transpose")


@dataclass(frozen=True)
class ComposedChannel:
    """``parts[0]`` after ``parts[1]`` after ... (rightmost applied first)."""

    parts: tuple

    @property
    def dim(self) -> int:
        return self.parts[0].dim

    def apply(self, A) -> np.ndarray:
        for ch in reversed(self.parts):
            A = ch.apply(A)
        return A


def compose(*channels) -> ComposedChannel:
    if not channels:
        raise ValueError("compose needs at least one channel")
    dims = {ch.dim for ch in channels}
    if len(dims) != 1:
        raise DimensionMismatchError(f"cannot compose channels on dims {sorted(dims)}")
    return ComposedChannel(tuple(channels))


def basis_residual(lhs, rhs) -> float:
    """max_ij ||lhs(E_ij) - rhs(E_ij)||_F; zero iff the linear maps coincide."""
    if lhs.dim != rhs.dim:
        raise DimensionMismatchError(f"cannot compare maps on dims {lhs.dim} and {rhs.dim}")
    return max(frobenius_norm(lhs.apply(E) - rhs.apply(E)) for _, _, E in matrix_units(lhs.dim))


# --------------------------------------------------------------------------
# Choi and Stinespring
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class ChoiMatrix:
    """Unnormalized Choi matrix sum_ij E_ij (x) Phi(E_ij); trace n when TP."""

    mat: np.ndarray
    input_dim: int

    def __post_init__(self):
        M = as_matrix(self.mat)
        if M.shape[0] != self.input_dim**2:
            raise DimensionMismatchError(
                f"Choi matrix of a map on M_{self.input_dim} must be {self.input_dim**2}-dimensional"
            )
        object.__setattr__(self, "mat", frozen(M))

    def block(self, i: int, j: int) -> np.ndarray:
        n = self.input_dim
        return np.array(self.mat[i * n : (i + 1) * n, j * n : (j + 1) * n])

    def output_partial_trace(self) -> np.ndarray:
        """Trace out the output factor: entry (i, j) is Tr(Phi(E_ij))."""
        n = self.input_dim
        return np.trace(self.mat.reshape(n, n, n, n), axis1=1, axis2=3)


def choi_matrix(ch) -> ChoiMatrix:
    n = ch.dim
    C = np.zeros((n * n, n * n), dtype=np.complex128)
    for i, j, E in matrix_units(n):
        C[i * n : (i + 1) * n, j * n : (j + 1) * n] = ch.apply(E)
    return ChoiMatrix(C, n)


def is_completely_positive(C: ChoiMatrix, tol: float = DEFAULT_TOL) -> bool:
    if hermitian_residual(C.mat) > tol:
        raise NotHermitianError("Choi matrix is not Hermitian")
    return min_eigenvalue(C.mat, tol) >= -tol


def kraus_from_choi(C: ChoiMatrix, rank_tol: float = DEFAULT_TOL, tol: float = DEFAULT_TOL) -> KrausChannel:
    """Minimal Kraus form from the spectral decomposition of the Choi matrix.

    Each eigenpair (lam, v) with lam > rank_tol contributes the operator
    sqrt(lam) * reshape(v, (n, n)).T.
    """
    n = C.input_dim
    w, V = hermitian_eig(C.mat, tol)
    if w[0] < -tol:
        raise NotCompletelyPositiveError(f"Choi matrix has eigenvalue {w[0]:.3e}; map is not CP")
    ops = [np.sqrt(lam) * V[:, k].reshape(n, n).T for k, lam in enumerate(w) if lam > rank_tol]
    if not ops:
        ops = [np.zeros((n, n), dtype=np.complex128)]
    # Largest weight first.
    return KrausChannel(n, tuple(reversed(ops)))


def to_kraus(ch) -> KrausChannel:
    """Kraus form of any channel; native where one exists, else via Choi."""
    if isinstance(ch, KrausChannel):
        return ch
    if isinstance(ch, PreconditionerChannel):
        return kraus_from_preconditioner(ch)
    return kraus_from_choi(choi_matrix(ch))


@dataclass(frozen=True)
class StinespringIsometry:
    """V : C^n -> C^n (x) C^d with row index ``a * env_dim + k`` for output a, environment k."""

    V: np.ndarray
    input_dim: int
    env_dim: int

    def __post_init__(self):
        V = np.array(self.V, dtype=np.complex128)
        if V.shape != (self.input_dim * self.env_dim, self.input_dim):
            raise DimensionMismatchError(f"isometry has shape {V.shape}")
        V.setflags(write=False)
        object.__setattr__(self, "V", V)

    def isometry_residual(self) -> float:
        return frobenius_norm(self.V.conj().T @ self.V - np.eye(self.input_dim))

    def apply(self, S) -> np.ndarray:
        """Tr_E(V S V^*)."""
        n, d = self.input_dim, self.env_dim
        S = _check_input(n, S)
        big = (self.V @ S @ self.V.conj().T).reshape(n, d, n, d)
        return np.trace(big, axis1=1, axis2=3)

    @property
    def dim(self) -> int:
        return self.input_dim


def stinespring_isometry(ch: KrausChannel, tol: float = DEFAULT_TOL) -> StinespringIsometry:
    if not ch.is_trace_preserving(tol):
        raise InvalidChannelError(
            f"Stinespring isometry needs a trace-preserving channel "
            f"(completeness residual {ch.completeness_residual():.3e})"
        )
    n, d = ch.dim, len(ch)
    ops = np.stack(ch.kraus_ops)  # (k, a, i)
    V = ops.transpose(1, 0, 2).reshape(n * d, n)
    return StinespringIsometry(V, n, d)


# --------------------------------------------------------------------------
# Axiom verification
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class CheckResult:
    check: str
    residual: float | None
    tol: float
    passed: bool
    detail: str = ""

    def as_dict(self) -> dict:
        return {
            "check": self.check,
            "residual": None if self.residual is None else float(self.residual),
            "tol": float(self.tol),
            "pass": bool(self.passed),
            "detail": self.detail,
        }


@dataclass(frozen=True)
class ChannelReport:
    results: tuple[CheckResult, ...]

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def __getitem__(self, name: str) -> CheckResult:
        for r in self.results:
            if r.check == name:
                return r
        raise KeyError(name)

    def names(self) -> list[str]:
        return [r.check for r in self.results]


def _random_complex(rng: np.random.Generator, n: int) -> np.ndarray:
    return rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))


def verify_channel_axioms(ch, tol: float = DEFAULT_TOL, seed: int = 0, pairs: int = 5) -> ChannelReport:
    """Check the defining properties of a channel numerically.

    Linearity and adjoint preservation are probed on random matrices drawn
    from ``seed``; trace preservation on the full matrix-unit basis. The
    Pythagoras identity applies to preconditioner channels only. Failures
    are recorded in the report; nothing is raised.
    """
    rng = np.random.default_rng(seed)
    n = ch.dim
    results = []

    lin = 0.0
    adj = 0.0
    for _ in range(pairs):
        A, B = _random_complex(rng, n), _random_complex(rng, n)
        a, b = complex(*rng.standard_normal(2)), complex(*rng.standard_normal(2))
        scale = max(1.0, frobenius_norm(a * A + b * B), abs(a) * frobenius_norm(A) + abs(b) * frobenius_norm(B))
        lin = max(lin, frobenius_norm(ch.apply(a * A + b * B) - a * ch.apply(A) - b * ch.apply(B)) / scale)
        adj = max(adj, frobenius_norm(ch.apply(A.conj().T) - ch.apply(A).conj().T) / max(1.0, frobenius_norm(A)))
    results.append(CheckResult("linearity", lin, tol, lin <= tol))
    results.append(CheckResult("adjoint_preservation", adj, tol, adj <= tol))

    tp = max(abs(np.trace(ch.apply(E)) - (1.0 if i == j else 0.0)) for i, j, E in matrix_units(n))
    results.append(CheckResult("trace_preservation", float(tp), tol, tp <= tol))

    if isinstance(ch, PreconditionerChannel):
        pyth = 0.0
        for _ in range(pairs):
            A = _random_complex(rng, n)
            PA = ch.apply(A)
            lhs = frobenius_norm(A - PA) ** 2
            rhs = frobenius_norm(A) ** 2 - frobenius_norm(PA) ** 2
            pyth = max(pyth, abs(lhs - rhs) / frobenius_norm(A) ** 2)
        results.append(CheckResult("pythagoras", pyth, tol, pyth <= tol))

    C = choi_matrix(ch)
    herm = hermitian_residual(C.mat)
    if herm > tol:
        results.append(CheckResult("choi_psd", None, tol, False, f"Choi matrix not Hermitian ({herm:.3e})"))
        results.append(CheckResult("kraus_completeness", None, tol, False, "no Kraus form: map is not CP"))
    else:
        lam = min_eigenvalue(C.mat, tol)
        results.append(CheckResult("choi_psd", max(0.0, -lam), tol, lam >= -tol, f"min eigenvalue {lam:.3e}"))
        if lam >= -tol:
            comp = (ch if isinstance(ch, KrausChannel) else to_kraus(ch)).completeness_residual()
            results.append(CheckResult("kraus_completeness", comp, tol, comp <= tol))
        else:
            results.append(CheckResult("kraus_completeness", None, tol, False, "no Kraus form: map is not CP"))
    return ChannelReport(tuple(results))


def self_adjoint_residual(ch, A, B) -> float:
    """|<Phi(A), B> - <A, Phi(B)>| for a map that should be an orthogonal projection."""
    return abs(frobenius_inner(ch.apply(A), B) - frobenius_inner(A, ch.apply(B)))
