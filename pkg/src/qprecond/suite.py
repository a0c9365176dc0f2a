"""Deterministic randomized invariant suite.

Each check draws from its own generator seeded by ``(seed, crc32(name))`` so
results do not depend on which other checks run or in what order. Records
are sorted by check name, then by their canonical params JSON.
"""

from __future__ import annotations

import json
import zlib
from dataclasses import dataclass
from itertools import permutations, product
from typing import Callable, Iterator

import numpy as np

from . import channel_reps as cr
from . import holevo_semigroup as hs
from . import info_metrics as im
from .matrix_core import (
    DEFAULT_TOL,
    diagonal_pinch,
    frobenius_inner,
    frobenius_norm,
    hermitian_eig,
    is_psd,
)
from .random_instances import (
    random_complex,
    random_density,
    random_hermitian,
    random_holevo_channel,
    random_idempotent_holevo,
    random_kraus_channel,
    random_partition,
    perturbed_holevo,
)
from .transform_unitaries import KINDS, block_projections, rank_one_projections, transform_unitary


@dataclass(frozen=True)
class RunConfig:
    tolerance: float = DEFAULT_TOL
    seed: int = 0
    trials: int = 100
    memory_budget: int = im.DEFAULT_MAX_DIM

    def __post_init__(self):
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if self.memory_budget < 1:
            raise ValueError("memory budget must be positive")


@dataclass(frozen=True)
class Record:
    check: str
    params: dict
    residual: float | None
    tol: float | None
    passed: bool

    def as_dict(self) -> dict:
        return {"check": self.check, "params": self.params, "residual": self.residual, "tol": self.tol, "pass": self.passed}

    def sort_key(self):
        return (self.check, json.dumps(self.params, sort_keys=True))


Check = Callable[[np.random.Generator, RunConfig], Iterator[Record]]
_CHECKS: dict[str, Check] = {}


def check(name: str):
    def register(fn):
        _CHECKS[name] = fn
        return fn

    return register


def _rec(name, params, residual, tol) -> Record:
    residual = float(residual)
    return Record(name, params, residual, tol, bool(residual <= tol))


def _flag(name, params, ok) -> Record:
    return Record(name, params, None, None, bool(ok))


def _rng(seed: int, name: str) -> np.random.Generator:
    return np.random.default_rng([seed, zlib.crc32(name.encode())])


def _blocks_for(n: int) -> list[list[list[int]]]:
    """Singleton partition plus a contiguous two-block split when n > 1."""
    out = [[[i] for i in range(n)]]
    if n > 1:
        out.append([list(range(n // 2)), list(range(n // 2, n))])
    return out


# ---------------------------------------------------------------- matrix_core


@check("matrix_core.pinch_trace")
def _pinch_trace(rng, cfg):
    worst = 0.0
    for _ in range(cfg.trials):
        A = random_complex(rng, int(rng.integers(1, 33)))
        worst = max(worst, abs(np.trace(diagonal_pinch(A)) - np.trace(A)))
    yield _rec("matrix_core.pinch_trace", {"trials": cfg.trials}, worst, cfg.tolerance)


@check("matrix_core.eig_reconstruction")
def _eig_reconstruction(rng, cfg):
    for n in (1, 2, 4, 8, 16, 32):
        A = random_hermitian(rng, n)
        w, V = hermitian_eig(A)
        yield _rec("matrix_core.eig_reconstruction", {"n": n}, frobenius_norm(A - (V * w) @ V.conj().T) / frobenius_norm(A), 1e-9)


@check("matrix_core.inner_conjugate_symmetry")
def _inner_sym(rng, cfg):
    worst = 0.0
    for _ in range(cfg.trials):
        n = int(rng.integers(1, 9))
        A, B = random_complex(rng, n), random_complex(rng, n)
        worst = max(worst, abs(frobenius_inner(A, B) - np.conj(frobenius_inner(B, A))))
    yield _rec("matrix_core.inner_conjugate_symmetry", {"trials": cfg.trials}, worst, cfg.tolerance)


def _two_by_two_cases():
    vals = (-1, 0, 1)
    for a, d, re, imag in product(vals, repeat=4):
        yield np.array([[a, complex(re, imag)], [complex(re, -imag), d]], dtype=np.complex128)


@check("matrix_core.psd_oracle")
def _psd_oracle(rng, cfg):
    mismatches = 0
    for A in _two_by_two_cases():
        a, d = A[0, 0].real, A[1, 1].real
        det = a * d - abs(A[0, 1]) ** 2
        oracle = (a + d) >= 0 and det >= 0
        mismatches += is_psd(A) != oracle
    yield _flag("matrix_core.psd_oracle", {"cases": 81}, mismatches == 0)


@check("matrix_core.eig_oracle")
def _eig_oracle(rng, cfg):
    worst = 0.0
    for A in _two_by_two_cases():
        a, d, b = A[0, 0].real, A[1, 1].real, A[0, 1]
        mid, rad = 0.5 * (a + d), np.sqrt(0.25 * (a - d) ** 2 + abs(b) ** 2)
        worst = max(worst, np.abs(hermitian_eig(A).eigenvalues - [mid - rad, mid + rad]).max())
    yield _rec("matrix_core.eig_oracle", {"cases": 81}, worst, 1e-10)


# -------------------------------------------------------- transform_unitaries


@check("transform_unitaries.unitary")
def _unitary(rng, cfg):
    for kind in KINDS:
        worst = 0.0
        for n in range(1, 33):
            U = transform_unitary(kind, n)
            worst = max(worst, frobenius_norm(U.conj().T @ U - np.eye(n)), frobenius_norm(U @ U.conj().T - np.eye(n)))
        yield _rec("transform_unitaries.unitary", {"kind": kind, "n": "1..32"}, worst, cfg.tolerance)


@check("transform_unitaries.rank_one_projections")
def _rank_one(rng, cfg):
    for kind in KINDS:
        worst = 0.0
        for n in (1, 2, 4, 8, 16):
            for p in rank_one_projections(transform_unitary(kind, n)):
                worst = max(worst, abs(np.trace(p) - 1), frobenius_norm(p @ p - p))
        yield _rec("transform_unitaries.rank_one_projections", {"kind": kind}, worst, 1e-10)


@check("transform_unitaries.block_identity")
def _block_identity(rng, cfg):
    worst = 0.0
    for _ in range(cfg.trials):
        n = int(rng.integers(1, 17))
        projs = block_projections(n, random_partition(rng, n))
        worst = max(worst, np.abs(sum(projs.projections) - np.eye(n)).max())
    yield _rec("transform_unitaries.block_identity", {"trials": cfg.trials}, worst, 0.0)


# --------------------------------------------------------------- channel_reps


def _preconditioner_cases(sizes):
    for kind in KINDS:
        for n in sizes:
            U = transform_unitary(kind, n)
            for blocks in _blocks_for(n):
                yield kind, n, len(blocks), cr.preconditioner(U, blocks)


@check("channel_reps.idempotent")
def _idempotent(rng, cfg):
    for kind, n, nb, ch in _preconditioner_cases((2, 4, 8, 16)):
        worst = 0.0
        for _ in range(50):
            A = random_complex(rng, n)
            PA = ch.apply(A)
            worst = max(worst, frobenius_norm(ch.apply(PA) - PA) / max(1.0, frobenius_norm(A)))
        yield _rec("channel_reps.idempotent", {"kind": kind, "n": n, "blocks": nb}, worst, cfg.tolerance)


@check("channel_reps.trace_and_pythagoras")
def _thm1(rng, cfg):
    for kind, n, nb, ch in _preconditioner_cases((2, 4, 8, 16)):
        tr, py = 0.0, 0.0
        for _ in range(50):
            A = random_complex(rng, n)
            PA = ch.apply(A)
            tr = max(tr, abs(np.trace(PA) - np.trace(A)))
            lhs = frobenius_norm(A - PA) ** 2
            rhs = frobenius_norm(A) ** 2 - frobenius_norm(PA) ** 2
            py = max(py, abs(lhs - rhs) / frobenius_norm(A) ** 2)
        params = {"kind": kind, "n": n, "blocks": nb}
        yield _rec("channel_reps.trace_preservation", params, tr, 1e-10)
        yield _rec("channel_reps.pythagoras", params, py, 1e-8)


@check("channel_reps.self_adjoint")
def _self_adjoint(rng, cfg):
    for kind, n, nb, ch in _preconditioner_cases((2, 4, 8, 16)):
        worst = 0.0
        for _ in range(10):
            A, B = random_complex(rng, n), random_complex(rng, n)
            worst = max(worst, cr.self_adjoint_residual(ch, A, B) / (frobenius_norm(A) * frobenius_norm(B)))
        yield _rec("channel_reps.self_adjoint", {"kind": kind, "n": n, "blocks": nb}, worst, cfg.tolerance)


@check("channel_reps.fixed_points")
def _fixed_points(rng, cfg):
    for kind in KINDS:
        for n in (2, 4, 8, 16):
            U = transform_unitary(kind, n)
            ch = cr.preconditioner(U)
            A = U @ np.diag(rng.standard_normal(n) + 1j * rng.standard_normal(n)) @ U.conj().T
            yield _rec("channel_reps.fixed_points", {"kind": kind, "n": n}, frobenius_norm(ch.apply(A) - A), cfg.tolerance)


@check("channel_reps.representation_coherence")
def _coherence(rng, cfg):
    for kind, n, nb, ch in _preconditioner_cases(range(1, 9)):
        kraus = cr.kraus_from_preconditioner(ch)
        from_choi = cr.kraus_from_choi(cr.choi_matrix(ch))
        res = max(cr.basis_residual(ch, kraus), cr.basis_residual(ch, from_choi))
        params = {"kind": kind, "n": n, "blocks": nb}
        yield _rec("channel_reps.representation_coherence", params, res, 1e-8)
        yield _rec("channel_reps.kraus_completeness", params, kraus.completeness_residual(), 1e-10)


@check("channel_reps.choi_psd")
def _choi_psd(rng, cfg):
    channels = [("preconditioner", ch) for _, _, _, ch in _preconditioner_cases((1, 2, 3, 4, 5, 6, 7, 8))]
    for _ in range(cfg.trials // 10 + 1):
        n = int(rng.integers(1, 5))
        channels.append(("random_kraus", random_kraus_channel(rng, n, int(rng.integers(1, 5)))))
        channels.append(("random_holevo", random_holevo_channel(rng, n, int(rng.integers(1, 5)))))
    worst = {}
    for family, ch in channels:
        lam = hermitian_eig(cr.choi_matrix(ch).mat).eigenvalues[0]
        worst[family] = max(worst.get(family, 0.0), -lam)
    for family, w in worst.items():
        yield _rec("channel_reps.choi_psd", {"family": family}, max(w, 0.0), cfg.tolerance)
    yield _flag("channel_reps.transpose_not_cp", {"n": 2}, not cr.is_completely_positive(cr.choi_matrix(cr.transpose_map(2))))


@check("channel_reps.choi_partial_trace")
def _choi_partial_trace(rng, cfg):
    worst = 0.0
    for _ in range(cfg.trials):
        n = int(rng.integers(1, 5))
        C = cr.choi_matrix(random_kraus_channel(rng, n, int(rng.integers(1, 5))))
        worst = max(worst, frobenius_norm(C.output_partial_trace() - np.eye(n)))
    yield _rec("channel_reps.choi_partial_trace", {"trials": cfg.trials}, worst, cfg.tolerance)


@check("channel_reps.holevo_compose")
def _holevo_compose(rng, cfg):
    worst, worst_density = 0.0, 0.0
    for _ in range(cfg.trials):
        n = int(rng.integers(1, 5))
        c1 = random_holevo_channel(rng, n, int(rng.integers(1, 5)))
        c2 = random_holevo_channel(rng, n, int(rng.integers(1, 5)))
        comp = cr.holevo_compose(c1, c2)
        rho = random_density(rng, n)
        worst = max(worst, frobenius_norm(comp.apply(rho) - c1.apply(c2.apply(rho))))
        for L in comp.densities:
            w = hermitian_eig(L).eigenvalues
            worst_density = max(worst_density, abs(np.trace(L) - 1), -w[0], frobenius_norm(L - L.conj().T))
    yield _rec("channel_reps.holevo_compose_sequential", {"trials": cfg.trials}, worst, cfg.tolerance)
    yield _rec("holevo_semigroup.composed_densities", {"trials": cfg.trials}, worst_density, 1e-9)


# ---------------------------------------------------------- holevo_semigroup


@check("holevo_semigroup.functoriality")
def _functoriality(rng, cfg):
    worst, col = 0.0, 0.0
    for _ in range(cfg.trials):
        n = int(rng.integers(1, 5))
        c1 = random_holevo_channel(rng, n, int(rng.integers(1, 5)))
        c2 = random_holevo_channel(rng, n, int(rng.integers(1, 5)))
        direct = hs.stochastic_of(cr.holevo_compose(c1, c2)).entries
        worst = max(worst, np.abs(direct - hs.modified_product(c1, c2).entries).max())
        col = max(col, np.abs(hs.stochastic_of(c1).entries.sum(axis=0) - 1).max())
    yield _rec("holevo_semigroup.functoriality", {"trials": cfg.trials}, worst, 1e-9)
    yield _rec("holevo_semigroup.column_stochastic", {"trials": cfg.trials}, col, cfg.tolerance)


@check("holevo_semigroup.stochastic_identity")
def _stochastic_identity(rng, cfg):
    for kind in KINDS:
        worst = 0.0
        for n in range(1, 9):
            A = hs.stochastic_of(cr.holevo_from_preconditioner(transform_unitary(kind, n))).entries
            worst = max(worst, np.abs(A - np.eye(n)).max())
        yield _rec("holevo_semigroup.stochastic_identity", {"kind": kind, "n": "1..8"}, worst, 1e-12)


def idempotency_instances(rng: np.random.Generator, trials: int):
    """Holevo channels with independent densities, mixing idempotent and not."""
    made = 0
    while made < trials:
        n = int(rng.integers(2, 5))
        m = int(rng.integers(1, 5))
        family = made % 3
        if family == 0:
            ch = random_idempotent_holevo(rng, n, m)
        elif family == 1:
            ch = perturbed_holevo(rng, random_idempotent_holevo(rng, n, m), 1e-3)
        else:
            ch = random_holevo_channel(rng, n, m)
        if hs.densities_independent(ch.densities):
            made += 1
            yield ch


@check("holevo_semigroup.idempotency_agreement")
def _idempotency_agreement(rng, cfg):
    disagreements, idempotent = 0, 0
    for ch in idempotency_instances(rng, cfg.trials):
        op = hs.is_idempotent_operational(ch, 1e-8)
        idempotent += op
        disagreements += op != hs.is_idempotent_holevo(ch, 1e-8).idempotent
    yield Record(
        "holevo_semigroup.idempotency_agreement",
        {"trials": cfg.trials, "idempotent": idempotent},
        float(disagreements),
        0.0,
        disagreements == 0,
    )


@check("holevo_semigroup.resource_destroying")
def _rdc(rng, cfg):
    for kind in KINDS:
        for n in (2, 3, 4, 8):
            U = transform_unitary(kind, n)
            delta = cr.preconditioner(U)
            for blocks in _blocks_for(n)[1:] + [[list(range(n))]]:
                report = hs.resource_destroying_check(delta, cr.preconditioner(U, blocks), 1e-9)
                res = max(report["absorb_left"].residual, report["absorb_right"].residual)
                yield _rec("holevo_semigroup.resource_destroying_eq40", {"kind": kind, "n": n, "blocks": len(blocks)}, res, 1e-9)


@check("holevo_semigroup.permutation_channels")
def _permutations(rng, cfg):
    for kind in KINDS:
        for n in (1, 2, 3, 4):
            U = transform_unitary(kind, n)
            P = cr.preconditioner(U)
            item1, dichotomy_ok = 0.0, True
            for perm in permutations(range(n)):
                phi_s = cr.permutation_channel(U, perm)
                item1 = max(
                    item1,
                    cr.basis_residual(cr.compose(P, phi_s), phi_s),
                    cr.basis_residual(cr.compose(phi_s, P), phi_s),
                )
                involution = all(perm[perm[j]] == j for j in range(n))
                squares_to_p = cr.basis_residual(cr.compose(phi_s, phi_s), P) <= 1e-9
                dichotomy_ok &= involution == squares_to_p
            yield _rec("holevo_semigroup.permutation_absorption", {"kind": kind, "n": n}, item1, 1e-9)
            yield _flag("holevo_semigroup.permutation_square", {"kind": kind, "n": n}, dichotomy_ok)


# -------------------------------------------------------------- info_metrics


@check("info_metrics.fidelity")
def _fidelity(rng, cfg):
    ident_worst, range_worst = 0.0, 0.0
    for _ in range(cfg.trials):
        n = int(rng.integers(1, 5))
        S = random_density(rng, n)
        ident_worst = max(ident_worst, abs(im.entanglement_fidelity(S, cr.identity_channel(n)) - 1))
        fe = im.entanglement_fidelity(S, random_kraus_channel(rng, n, int(rng.integers(1, 5))))
        range_worst = max(range_worst, -fe, fe - 1)
    yield _rec("info_metrics.fidelity_identity", {"trials": cfg.trials}, ident_worst, 1e-12)
    yield _rec("info_metrics.fidelity_range", {"trials": cfg.trials}, max(range_worst, 0.0), cfg.tolerance)
    dephase = cr.preconditioner(np.eye(2))
    examples = [
        (np.full((2, 2), 0.5), dephase, 0.5),
        (np.diag([1.0, 0.0]), dephase, 1.0),
        (random_density(rng, 3), cr.identity_channel(3), 1.0),
    ]
    worst = max(abs(im.entanglement_fidelity(S, ch) - v) for S, ch, v in examples)
    yield _rec("info_metrics.fidelity_examples", {"cases": 3}, worst, 1e-10)


@check("info_metrics.capacity")
def _capacity(rng, cfg):
    for kind in KINDS:
        for J in (2, 3, 4):
            for n in (1, 2, 3):
                if J**n > cfg.memory_budget:
                    continue
                w = im.capacity_witness(J, n, kind, max_dim=cfg.memory_budget)
                params = {"kind": kind, "J": J, "block_length": n}
                yield _rec("info_metrics.capacity_code", params, abs(w.error_probability), 1e-12)
                yield _flag("info_metrics.capacity_value", params, w.capacity == np.log2(J) and w.rate == w.capacity)


@check("info_metrics.tensor_power_completeness")
def _tensor_completeness(rng, cfg):
    worst = 0.0
    for _ in range(max(1, cfg.trials // 10)):
        ch = random_kraus_channel(rng, 2, int(rng.integers(1, 4)))
        for n in (1, 2, 3):
            worst = max(worst, im.tensor_power_channel(ch, n).completeness_residual())
    yield _rec("info_metrics.tensor_power_completeness", {"trials": max(1, cfg.trials // 10)}, worst, cfg.tolerance)


@check("info_metrics.eb_dichotomy")
def _eb(rng, cfg):
    for kind in KINDS:
        ok = True
        for n in range(1, 9):
            U = transform_unitary(kind, n)
            p_u = cr.preconditioner(U)
            ok &= im.is_rank_one_kraus(cr.kraus_from_preconditioner(p_u)) and im.cq_structure_test(p_u) == "c-q"
            for blocks in _blocks_for(n)[1:] + ([[list(range(n))]] if n > 1 else []):
                ch = cr.preconditioner(U, blocks)
                rank_one = all(len(b) == 1 for b in blocks)
                ok &= im.is_rank_one_kraus(cr.kraus_from_preconditioner(ch)) == rank_one
                ok &= (im.cq_structure_test(ch) == "c-q") == rank_one
        yield _flag("info_metrics.eb_dichotomy", {"kind": kind, "n": "1..8"}, ok)


def run_suite(cfg: RunConfig = RunConfig(), only: list[str] | None = None) -> list[Record]:
    records = []
    for name, fn in _CHECKS.items():
        if only and not any(name.startswith(prefix) for prefix in only):
            continue
        for r in fn(_rng(cfg.seed, name), cfg):
            records.append(Record(r.check, {**r.params, "seed": cfg.seed}, r.residual, r.tol, r.passed))
    return sorted(records, key=Record.sort_key)


def format_records(records: list[Record]) -> str:
    return "".join(json.dumps(r.as_dict(), sort_keys=True) + "\n" for r in records)


def check_names() -> list[str]:
    return sorted(_CHECKS)
