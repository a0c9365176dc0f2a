"""Seeded random matrices, states and channels for property sweeps."""

from __future__ import annotations

import numpy as np

from .channel_reps import HolevoChannel, KrausChannel
from .matrix_core import psd_sqrt


def random_complex(rng: np.random.Generator, n: int) -> np.ndarray:
    return rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))


def random_hermitian(rng: np.random.Generator, n: int) -> np.ndarray:
    X = random_complex(rng, n)
    return 0.5 * (X + X.conj().T)


def random_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    """Haar-distributed unitary from the QR decomposition of a Ginibre matrix."""
    Q, R = np.linalg.qr(random_complex(rng, n))
    d = np.diag(R)
    return Q * (d / np.abs(d))


def random_density(rng: np.random.Generator, n: int, rank: int | None = None) -> np.ndarray:
    X = rng.standard_normal((n, rank or n)) + 1j * rng.standard_normal((n, rank or n))
    rho = X @ X.conj().T
    return rho / np.trace(rho).real


def random_povm(rng: np.random.Generator, n: int, m: int) -> list[np.ndarray]:
    """F_k = T^{-1/2} G_k T^{-1/2} with Wishart G_k and T = sum G_k."""
    G = [random_density(rng, n) for _ in range(m)]
    T_inv_half = psd_sqrt(sum(G), inverse=True)
    F = [T_inv_half @ g @ T_inv_half for g in G]
    return [0.5 * (f + f.conj().T) for f in F]


def random_kraus_channel(rng: np.random.Generator, n: int, d: int) -> KrausChannel:
    """Trace-preserving channel with ``d`` Kraus operators cut from a random isometry."""
    Q, _ = np.linalg.qr(rng.standard_normal((n * d, n)) + 1j * rng.standard_normal((n * d, n)))
    return KrausChannel(n, tuple(Q[k * n : (k + 1) * n] for k in range(d)))


def random_holevo_channel(rng: np.random.Generator, n: int, m: int) -> HolevoChannel:
    return HolevoChannel(tuple(random_povm(rng, n, m)), tuple(random_density(rng, n) for _ in range(m)))


def random_partition(rng: np.random.Generator, n: int, blocks: int | None = None) -> list[list[int]]:
    """Random partition of 0..n-1 into ``blocks`` non-empty sets."""
    blocks = blocks or int(rng.integers(1, n + 1))
    labels = np.concatenate([np.arange(blocks), rng.integers(0, blocks, n - blocks)])
    rng.shuffle(labels)
    return [sorted(int(i) for i in np.flatnonzero(labels == b)) for b in range(blocks)]


def random_idempotent_holevo(rng: np.random.Generator, n: int, m: int) -> HolevoChannel:
    """Idempotent Holevo channel with linearly independent densities.

    The ``m`` components are split into groups, each attached to one block of
    a rotated coordinate partition. POVM elements of a group are weighted
    copies of the block projection; densities of a group are supported in
    that block, so the channel maps every output back to itself.
    """
    if m > n * n:
        raise ValueError(f"at most {n * n} independent densities exist on C^{n}")
    # Each group needs at least one component, and a block of size s holds at
    # most s^2 independent densities.
    while True:
        n_groups = int(rng.integers(1, min(n, m) + 1))
        partition = random_partition(rng, n, n_groups)
        capacity = [len(b) ** 2 for b in partition]
        if sum(capacity) >= m:
            break
    counts = [1] * n_groups
    for _ in range(m - n_groups):
        open_groups = [g for g in range(n_groups) if counts[g] < capacity[g]]
        counts[int(rng.choice(open_groups))] += 1
    W = random_unitary(rng, n)
    povm, dens = [], []
    for block, count in zip(partition, counts):
        P = np.zeros((n, n), dtype=np.complex128)
        P[block, block] = 1.0
        weights = rng.dirichlet(np.ones(count))
        for w in weights:
            povm.append(w * (W @ P @ W.conj().T))
            R = np.zeros((n, n), dtype=np.complex128)
            R[np.ix_(block, block)] = random_density(rng, len(block))
            dens.append(W @ R @ W.conj().T)
    order = rng.permutation(len(povm))
    return HolevoChannel(tuple(povm[k] for k in order), tuple(dens[k] for k in order))


def perturbed_holevo(rng: np.random.Generator, ch: HolevoChannel, eps: float) -> HolevoChannel:
    """Mix every density of ``ch`` with weight ``eps`` of a fresh random state."""
    n = ch.dim
    return HolevoChannel(
        ch.povm, tuple((1 - eps) * R + eps * random_density(rng, n) for R in ch.densities)
    )
