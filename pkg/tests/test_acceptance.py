"""Acceptance gate: one test per criterion, each logging a PASS/FAIL line."""

import itertools
import math
import time

import numpy as np

from qprecond import channel_reps as cr
from qprecond import holevo_semigroup as hs
from qprecond import info_metrics as im
from qprecond.matrix_core import frobenius_norm, hermitian_eig
from qprecond.random_instances import (
    random_complex,
    random_density,
    random_holevo_channel,
    random_kraus_channel,
)
from qprecond.suite import idempotency_instances
from qprecond.transform_unitaries import KINDS, transform_unitary

SWEEP_SIZES = (2, 4, 8, 16)


def partitions(n):
    """Rank-one blocks plus two coarser shapes (contiguous halves and one big block)."""
    yield [[i] for i in range(n)]
    if n > 1:
        yield [list(range(n // 2)), list(range(n // 2, n))]
        yield [list(range(n))]
    if n > 2:
        yield [[0, 1]] + [[i] for i in range(2, n)]


def sweep_cases():
    for kind in KINDS:
        for n in SWEEP_SIZES:
            U = transform_unitary(kind, n)
            for blocks in partitions(n):
                yield kind, n, blocks, cr.preconditioner(U, blocks)


def test_criterion_01_idempotency(record_criterion):
    rng = np.random.default_rng(101)
    start = time.perf_counter()
    worst = 0.0
    for _, n, _, ch in sweep_cases():
        for _ in range(50):
            A = random_complex(rng, n)
            PA = ch.apply(A)
            worst = max(worst, frobenius_norm(ch.apply(PA) - PA) / max(1.0, frobenius_norm(A)))
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-9 and elapsed < 10.0
    assert record_criterion(1, "projection idempotency", ok, f"max scaled residual {worst:.2e} (tol 1e-9), {elapsed:.2f}s (limit 10s)")


def test_criterion_02_trace_and_pythagoras(record_criterion):
    rng = np.random.default_rng(102)
    tr, py = 0.0, 0.0
    for _, n, _, ch in sweep_cases():
        for _ in range(50):
            A = random_complex(rng, n)
            PA = ch.apply(A)
            tr = max(tr, abs(np.trace(PA) - np.trace(A)))
            lhs = frobenius_norm(A - PA) ** 2
            rhs = frobenius_norm(A) ** 2 - frobenius_norm(PA) ** 2
            py = max(py, abs(lhs - rhs) / frobenius_norm(A) ** 2)
    ok = tr <= 1e-10 and py <= 1e-8
    assert record_criterion(2, "trace preservation and Pythagoras", ok, f"trace {tr:.2e} (tol 1e-10), Pythagoras rel {py:.2e} (tol 1e-8)")


def test_criterion_03_kraus_coherence(record_criterion):
    routes, comp = 0.0, 0.0
    for kind in KINDS:
        for n in range(1, 9):
            U = transform_unitary(kind, n)
            for blocks in partitions(n):
                ch = cr.preconditioner(U, blocks)
                kraus = cr.kraus_from_preconditioner(ch)
                from_choi = cr.kraus_from_choi(cr.choi_matrix(ch))
                routes = max(routes, cr.basis_residual(ch, kraus), cr.basis_residual(ch, from_choi), cr.basis_residual(kraus, from_choi))
                comp = max(comp, kraus.completeness_residual())
    ok = routes <= 1e-8 and comp <= 1e-10
    assert record_criterion(3, "three representation routes", ok, f"route disagreement {routes:.2e} (tol 1e-8), completeness {comp:.2e} (tol 1e-10)")


def constructed_channels():
    rng = np.random.default_rng(104)
    for kind in KINDS:
        for n in range(1, 9):
            U = transform_unitary(kind, n)
            for blocks in partitions(n):
                yield cr.preconditioner(U, blocks)
            yield cr.holevo_from_preconditioner(U)
        for n in (2, 3, 4):
            U = transform_unitary(kind, n)
            for perm in itertools.permutations(range(n)):
                yield cr.permutation_channel(U, perm)
    for _ in range(30):
        n = int(rng.integers(1, 5))
        a = random_kraus_channel(rng, n, int(rng.integers(1, 5)))
        b = random_kraus_channel(rng, n, int(rng.integers(1, 5)))
        yield a
        yield cr.compose_kraus(a, b)
        h1 = random_holevo_channel(rng, n, int(rng.integers(1, 5)))
        h2 = random_holevo_channel(rng, n, int(rng.integers(1, 5)))
        yield h1
        yield cr.holevo_compose(h1, h2)


def test_criterion_04_choi_positivity(record_criterion):
    lowest, count = np.inf, 0
    for ch in constructed_channels():
        lowest = min(lowest, hermitian_eig(cr.choi_matrix(ch).mat).eigenvalues[0])
        count += 1
    transpose_rejected = not cr.is_completely_positive(cr.choi_matrix(cr.transpose_map(2)))
    ok = lowest >= -1e-9 and transpose_rejected
    detail = f"{count} channels, min Choi eigenvalue {lowest:.2e} (floor -1e-9), transpose map rejected: {transpose_rejected}"
    assert record_criterion(4, "Choi positivity", ok, detail)


def test_criterion_05_stochastic_identity(record_criterion):
    worst = 0.0
    for kind in KINDS:
        for n in range(1, 9):
            A = hs.stochastic_of(cr.holevo_from_preconditioner(transform_unitary(kind, n))).entries
            worst = max(worst, np.abs(A - np.eye(n)).max())
    ok = worst <= 1e-12
    assert record_criterion(5, "stochastic matrix of P_U is the identity", ok, f"max entry deviation {worst:.2e} (tol 1e-12)")


def test_criterion_06_composition_theorem(record_criterion):
    rng = np.random.default_rng(106)
    worst, density = 0.0, 0.0
    for _ in range(100):
        n = int(rng.integers(1, 5))
        c1 = random_holevo_channel(rng, n, int(rng.integers(1, 5)))
        c2 = random_holevo_channel(rng, n, int(rng.integers(1, 5)))
        comp = cr.holevo_compose(c1, c2)
        worst = max(worst, np.abs(hs.stochastic_of(comp).entries - hs.modified_product(c1, c2).entries).max())
        for L in comp.densities:
            w = hermitian_eig(L).eigenvalues
            density = max(density, abs(np.trace(L) - 1), frobenius_norm(L - L.conj().T), -w[0])
    ok = worst <= 1e-9 and density <= 1e-9
    assert record_criterion(6, "composition as modified product", ok, f"100 pairs, max entry gap {worst:.2e}, density violation {density:.2e} (tol 1e-9)")


def test_criterion_07_idempotency_characterization(record_criterion):
    rng = np.random.default_rng(107)
    witnesses, idempotent = [], 0
    for k, ch in enumerate(idempotency_instances(rng, 100)):
        op = hs.is_idempotent_operational(ch, 1e-8)
        res = hs.is_idempotent_holevo(ch, 1e-8)
        idempotent += op
        if op != res.idempotent:
            witnesses.append((k, ch.dim, len(ch), hs.idempotency_residual(ch), res.residual))
    ok = not witnesses
    detail = f"100 channels ({idempotent} idempotent), disagreements: {len(witnesses)}"
    if witnesses:
        detail += f", first witness (index, n, m, operational residual, steady-state residual) = {witnesses[0]}"
    assert record_criterion(7, "idempotency characterization", ok, detail)


def test_criterion_08_capacity(record_criterion):
    worst, exact = 0.0, True
    for kind in KINDS:
        for J in (2, 3, 4):
            for n in (1, 2, 3):
                w = im.capacity_witness(J, n, kind)
                worst = max(worst, abs(w.error_probability))
                exact &= w.capacity == math.log2(J) and w.rate == w.capacity
    ok = worst <= 1e-12 and exact
    assert record_criterion(8, "zero-error code attains log2 J", ok, f"max error probability {worst:.2e} (tol 1e-12), capacity exact: {exact}")


def test_criterion_09_resource_destroying(record_criterion):
    eq40, item1, dichotomy = 0.0, 0.0, True
    for kind in KINDS:
        for n in (2, 3, 4, 8):
            U = transform_unitary(kind, n)
            delta = cr.preconditioner(U)
            for blocks in list(partitions(n))[1:]:
                r = hs.resource_destroying_check(delta, cr.preconditioner(U, blocks), 1e-9)
                eq40 = max(eq40, r["absorb_left"].residual, r["absorb_right"].residual)
        for n in (1, 2, 3, 4):
            U = transform_unitary(kind, n)
            P = cr.preconditioner(U)
            for perm in itertools.permutations(range(n)):
                phi_s = cr.permutation_channel(U, perm)
                item1 = max(item1, cr.basis_residual(cr.compose(P, phi_s), phi_s), cr.basis_residual(cr.compose(phi_s, P), phi_s))
                involution = all(perm[perm[j]] == j for j in range(n))
                dichotomy &= (cr.basis_residual(cr.compose(phi_s, phi_s), P) <= 1e-9) == involution
    ok = eq40 <= 1e-9 and item1 <= 1e-9 and dichotomy
    detail = f"absorption {eq40:.2e}, permutation absorption {item1:.2e} (tol 1e-9), square = P_U iff involution: {dichotomy}"
    assert record_criterion(9, "resource-destroying identities", ok, detail)


def test_criterion_10_entanglement_fidelity(record_criterion):
    rng = np.random.default_rng(110)
    ident = max(abs(im.entanglement_fidelity(random_density(rng, n), cr.identity_channel(n)) - 1) for n in range(1, 9) for _ in range(10))
    dephase = cr.preconditioner(np.eye(2))
    examples = [
        (random_density(rng, 3), cr.identity_channel(3), 1.0),
        (np.full((2, 2), 0.5), dephase, 0.5),
        (np.diag([1.0, 0.0]), dephase, 1.0),
    ]
    tagged = max(abs(im.entanglement_fidelity(S, ch) - v) for S, ch, v in examples)
    ok = ident <= 1e-12 and tagged <= 1e-10
    assert record_criterion(10, "entanglement fidelity", ok, f"identity channel {ident:.2e} (tol 1e-12), tagged examples {tagged:.2e} (tol 1e-10)")


def test_criterion_11_eb_dichotomy(record_criterion):
    accepted, rejected, mistakes = 0, 0, 0
    for kind in KINDS:
        for n in range(1, 9):
            U = transform_unitary(kind, n)
            for blocks in partitions(n):
                ch = cr.preconditioner(U, blocks)
                rank_one_blocks = all(len(b) == 1 for b in blocks)
                verdict = im.is_rank_one_kraus(cr.kraus_from_preconditioner(ch))
                cq = im.cq_structure_test(ch) == "c-q"
                if verdict != rank_one_blocks or cq != rank_one_blocks:
                    mistakes += 1
                elif verdict:
                    accepted += 1
                else:
                    rejected += 1
    ok = mistakes == 0
    assert record_criterion(11, "EB / c-q dichotomy", ok, f"P_U accepted {accepted}, block variants rejected {rejected}, mistakes {mistakes}")


def test_criterion_12_eigensolver_oracle(record_criterion):
    worst = 0.0
    vals = (-1, 0, 1)
    for a, d, re, im_ in itertools.product(vals, repeat=4):
        b = complex(re, im_)
        A = np.array([[a, b], [b.conjugate(), d]])
        mid, rad = 0.5 * (a + d), math.sqrt(0.25 * (a - d) ** 2 + abs(b) ** 2)
        worst = max(worst, np.abs(hermitian_eig(A).eigenvalues - [mid - rad, mid + rad]).max())
    ok = worst <= 1e-10
    assert record_criterion(12, "eigensolver vs characteristic polynomial", ok, f"81 matrices, max eigenvalue error {worst:.2e} (tol 1e-10)")
