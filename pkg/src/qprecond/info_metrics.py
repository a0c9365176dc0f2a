"""Entanglement fidelity, entanglement-breaking tests, block codes and capacity."""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from itertools import product
from typing import Sequence

import numpy as np

from .channel_reps import KrausChannel, PreconditionerChannel, preconditioner, to_kraus
from .errors import DimensionMismatchError, InvalidStateError, ResourceBudgetError
from .matrix_core import (
    DEFAULT_TOL,
    as_density,
    as_matrix,
    density_violations,
    frobenius_norm,
    frozen,
    hermitian_residual,
    min_eigenvalue,
)
from .transform_unitaries import rank_one_projections, transform_unitary

DEFAULT_MAX_DIM = 64
DEFAULT_MAX_OPS = 4096

PROVED_EB = "proved-EB"
PROVED_NOT_CQ = "proved-not-c-q-form"
UNDETERMINED = "undetermined"


def entanglement_fidelity(S, ch, tol: float = DEFAULT_TOL) -> float:
    """sum_k |Tr(V_k S)|^2 over a Kraus form of ``ch``."""
    kraus = to_kraus(ch)
    S = as_density(S, tol)
    if S.shape != (kraus.dim, kraus.dim):
        raise DimensionMismatchError(f"state has shape {S.shape}, channel acts on dimension {kraus.dim}")
    return float(sum(abs(np.trace(K @ S)) ** 2 for K in kraus.kraus_ops))


def is_rank_one_kraus(ch: KrausChannel, tol: float = DEFAULT_TOL) -> bool:
    """True iff every Kraus operator has second singular value at most ``tol``.

    A rank-one Kraus form is sufficient for the channel to be
    entanglement-breaking.
    """
    for K in ch.kraus_ops:
        s = np.linalg.svd(K, compute_uv=False)
        if len(s) > 1 and s[1] > tol:
            return False
    return True


def cq_structure_test(ch: PreconditionerChannel) -> str:
    """'c-q' when every pinching block has rank one, else 'not c-q'.

    A block of rank > 1 fixes every pure state supported inside it, which a
    measure-and-prepare form with rank-one outputs cannot reproduce.
    """
    return "c-q" if ch.is_rank_one else "not c-q"


def eb_classification(ch, tol: float = DEFAULT_TOL) -> str:
    """Entanglement-breaking verdict at one of three confidence levels."""
    if isinstance(ch, PreconditionerChannel):
        if ch.is_rank_one:
            return PROVED_EB
        return PROVED_NOT_CQ
    if is_rank_one_kraus(to_kraus(ch), tol):
        return PROVED_EB
    return UNDETERMINED


def _kron_all(mats: Sequence[np.ndarray]) -> np.ndarray:
    return reduce(np.kron, mats)


def tensor_power_channel(
    ch: KrausChannel, n: int, max_dim: int = DEFAULT_MAX_DIM, max_ops: int = DEFAULT_MAX_OPS
) -> KrausChannel:
    """n-fold memoryless extension: Kraus operators are all n-fold tensor products."""
    if n < 1:
        raise ValueError("tensor power needs n >= 1")
    dim, count = ch.dim**n, len(ch) ** n
    if dim > max_dim or count > max_ops:
        raise ResourceBudgetError(
            f"tensor power {n} needs dimension {dim} and {count} Kraus operators "
            f"(budget: dimension {max_dim}, {max_ops} operators)"
        )
    if n == 1:
        return ch
    return KrausChannel(dim, tuple(_kron_all(ops) for ops in product(ch.kraus_ops, repeat=n)))


@dataclass(frozen=True)
class Code:
    """Block code for the n-fold channel.

    ``states[i]`` encodes message i and ``observable[i]`` decodes it.
    Observable elements beyond ``len(states)`` are outcomes that decode to no
    message (for instance the complement of the codeword projections).
    """

    block_length: int
    states: tuple[np.ndarray, ...]
    observable: tuple[np.ndarray, ...]
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        states = tuple(frozen(as_matrix(S)) for S in self.states)
        obs = tuple(frozen(as_matrix(M)) for M in self.observable)
        if not states:
            raise ValueError("a code needs at least one message")
        if len(obs) < len(states):
            raise ValueError(f"{len(states)} messages but only {len(obs)} decoding outcomes")
        dim = states[0].shape[0]
        for k, M in enumerate(states + obs):
            if M.shape != (dim, dim):
                raise DimensionMismatchError(f"code operator {k} has shape {M.shape}, expected {(dim, dim)}")
        for i, S in enumerate(states):
            problems = density_violations(S, self.tol)
            if problems:
                raise InvalidStateError(f"code state {i}: " + "; ".join(problems))
        for j, M in enumerate(obs):
            if hermitian_residual(M) > self.tol or min_eigenvalue(M, self.tol) < -self.tol:
                raise ValueError(f"observable element {j} is not PSD")
        if frobenius_norm(sum(obs) - np.eye(dim)) > self.tol:
            raise ValueError("observable does not resolve the identity")
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "observable", obs)

    @property
    def dim(self) -> int:
        return self.states[0].shape[0]

    @property
    def size(self) -> int:
        return len(self.states)

    @property
    def rate(self) -> float:
        return float(np.log2(self.size)) / self.block_length


def apply_tensor_power(ch: KrausChannel, S, n: int, max_dim: int = DEFAULT_MAX_DIM) -> np.ndarray:
    """Phi^{(x)n}(S) computed one tensor factor at a time.

    Equivalent to ``tensor_power_channel(ch, n).apply(S)`` without
    materializing the len(ch)**n product operators.
    """
    d = ch.dim
    if d**n > max_dim:
        raise ResourceBudgetError(f"tensor power {n} needs dimension {d**n} (budget {max_dim})")
    S = as_matrix(S)
    if S.shape != (d**n, d**n):
        raise DimensionMismatchError(f"state has shape {S.shape}, expected {(d**n, d**n)}")
    # superop[a, b, c, e] = sum_k K[a, c] conj(K[b, e])
    ops = np.stack(ch.kraus_ops)
    superop = np.einsum("kac,kbe->abce", ops, ops.conj())
    T = S.reshape((d,) * (2 * n))
    for f in range(n):
        T = np.tensordot(superop, T, axes=([2, 3], [f, n + f]))
        # New axes 0, 1 are the output indices of factor f; move them back in place.
        T = np.moveaxis(T, [0, 1], [f, n + f])
    return T.reshape(d**n, d**n)


def decoding_probabilities(ch: KrausChannel, code: Code, max_dim: int = DEFAULT_MAX_DIM) -> np.ndarray:
    """P[j, i] = Tr(Phi^{(x)n}[S_i] M_j): probability of outcome j given message i."""
    n = code.block_length
    if ch.dim**n != code.dim:
        raise DimensionMismatchError(
            f"code lives on dimension {code.dim}, channel power on dimension {ch.dim**n}"
        )
    outputs = np.stack([apply_tensor_power(ch, S, n, max_dim) for S in code.states])
    M = np.stack(code.observable)
    return np.einsum("jab,iba->ji", M, outputs).real


def code_error_probability(ch: KrausChannel, code: Code, max_dim: int = DEFAULT_MAX_DIM) -> float:
    """max_i (1 - P(i, i))."""
    P = decoding_probabilities(ch, code, max_dim)
    return float(max(1.0 - P[i, i] for i in range(code.size)))


def preconditioner_capacity(J: int) -> float:
    """Classical capacity log2(J) of P_U over J distinguishable basis states."""
    if not isinstance(J, (int, np.integer)) or isinstance(J, bool) or J < 1:
        raise ValueError(f"code size J must be a positive integer, got {J!r}")
    return float(np.log2(J))


def capacity_code(U, block_length: int, J: int | None = None, scheme: str = "product") -> Code:
    """Zero-error code for P_U built from the rank-one projections p_j of U.

    With ``scheme="product"`` the codewords are all J**n products
    p_{j1} (x) ... (x) p_{jn}, giving rate log2(J) at every block length.
    With ``scheme="repetition"`` message j is p_j^{(x)n} (J codewords).
    Each codeword decodes with its own projection; whatever identity mass
    is left over becomes one extra no-message outcome.
    """
    projs = rank_one_projections(U).projections
    J = len(projs) if J is None else J
    if not 1 <= J <= len(projs):
        raise ValueError(f"code size must lie in 1..{len(projs)}, got {J}")
    if block_length < 1:
        raise ValueError("block length must be positive")
    if scheme == "product":
        words = [_kron_all(ps) for ps in product(projs[:J], repeat=block_length)]
    elif scheme == "repetition":
        words = [_kron_all([p] * block_length) for p in projs[:J]]
    else:
        raise ValueError(f"unknown code scheme {scheme!r}")
    rest = np.eye(words[0].shape[0], dtype=np.complex128) - sum(words)
    rest = 0.5 * (rest + rest.conj().T)
    extra = (rest,) if frobenius_norm(rest) > DEFAULT_TOL else ()
    return Code(block_length, tuple(words), tuple(words) + extra)


@dataclass(frozen=True)
class CapacityWitness:
    kind: str
    J: int
    block_length: int
    scheme: str
    capacity: float
    error_probability: float
    rate: float

    def as_dict(self) -> dict:
        return {
            "kind": self.kind,
            "J": self.J,
            "block_length": self.block_length,
            "scheme": self.scheme,
            "capacity": self.capacity,
            "error_probability": self.error_probability,
            "rate": self.rate,
        }


def capacity_witness(
    J: int, block_length: int = 1, kind: str = "fourier", scheme: str = "product", max_dim: int = DEFAULT_MAX_DIM
) -> CapacityWitness:
    """Capacity of P_U on C^J with the explicit zero-error code that attains it."""
    capacity = preconditioner_capacity(J)
    U = transform_unitary(kind, J)
    ch = to_kraus(preconditioner(U))
    code = capacity_code(U, block_length, scheme=scheme)
    pe = code_error_probability(ch, code, max_dim)
    return CapacityWitness(kind, J, block_length, scheme, capacity, pe, code.rate)
