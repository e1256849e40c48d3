"""Exit criteria, each at its stated tolerance and runtime budget."""

import subprocess
import sys
import time

import numpy as np

from conftest import random_hermitian, random_matrix, random_system
from ortho_block import (HBasis, Measure, MatrixMeasure, Polynomial, SobolevSpec,
                         block_partition, build_banded, build_L_pointmass, build_L_sobolev,
                         decompose, extract_recurrence, generate, krein_report,
                         matrix_to_scalars, minimal_h, orthonormal_family, reconstruct,
                         verify_three_term)
from ortho_block.demos import accumulating_measure
from ortho_block.jacobi import recurrence_residual, system_from_banded
from ortho_block.matpoly import lq, normalized_blocks, scalars_to_matrices
from ortho_block.measures import check_psd, orthonormality_residual


def band_residual(table, N):
    i, j = np.indices(table.shape)
    return float(np.abs(table[np.abs(i - j) > N]).max(initial=0.0))


def test_example_decomposition(criterion):
    p = Polynomial([1, 2, 3, 4, 5, 6])
    basis = HBasis.monomial(3)
    parts = decompose(p, basis)
    best = np.inf
    for _ in range(5):
        t = time.perf_counter()
        decompose(p, basis)
        best = min(best, time.perf_counter() - t)
    ok = [q.coeffs.tolist() for q in parts] == [[1, 4], [2, 5], [3, 6]] and best < 1e-3
    criterion(1, ok, f"parts {[q.coeffs.real.tolist() for q in parts]}, {best * 1e3:.3f} ms")


def test_forward_equivalence(criterion):
    t = time.perf_counter()
    worst = 0.0
    for seed in range(20):
        rng = np.random.default_rng(seed)
        N = 1 + seed % 4
        count = N * -(-13 // N)  # whole blocks covering n <= 12
        sys_ = random_system(rng, N, count + N)
        P = scalars_to_matrices(sys_.polynomials(count), HBasis(sys_.h))
        blocks = block_partition(build_banded(sys_, count))
        worst = max(worst, verify_three_term(P, blocks))
    elapsed = time.perf_counter() - t
    criterion(2, worst <= 1e-9 and elapsed < 5,
              f"max three-term residual {worst:.2e} (<= 1e-9), {elapsed:.2f} s")


def test_converse_equivalence(criterion):
    worst_band = worst_unit = 0.0
    degrees_ok = True
    for seed in range(12):
        rng = np.random.default_rng(100 + seed)
        N = 1 + seed % 3
        nb = -(-13 // N)
        A = [random_matrix(rng, N) for _ in range(nb - 1)]
        if N > 1:
            assert all(np.abs(np.triu(a, 1)).max() > 0 for a in A)
        B = [random_hermitian(rng, N) for _ in range(nb)]
        blocks, U = normalized_blocks(A, B)
        h = Polynomial(np.r_[rng.uniform(-0.5, 0.5, N), 1.0])
        p = matrix_to_scalars(generate(blocks, np.eye(N), nb), HBasis(h))
        degrees_ok &= all(q.degree == n for n, q in enumerate(p))
        sys_ = system_from_banded(blocks.to_banded(), h, p[:N])
        worst_band = max(worst_band, recurrence_residual(sys_, p))
        worst_unit = max(worst_unit, max(np.abs(u @ u.conj().T - np.eye(N)).max() for u in U))
    criterion(3, degrees_ok and worst_band <= 1e-9 and worst_unit <= 1e-12,
              f"exact degrees {degrees_ok}, band residual {worst_band:.2e} (<= 1e-9), "
              f"unitarity {worst_unit:.2e} (<= 1e-12)")


def test_derivative_sobolev_band(criterion):
    t = time.perf_counter()
    spec = SobolevSpec.marcellan_ronveaux(Measure.chebyshev(200), 0.0, 1, 1.0)
    h = minimal_h(spec)
    fam = orthonormal_family(spec, 31)
    off = band_residual(fam.multiplication_table(h), 2)
    rs = extract_recurrence(spec, fam, h)
    lead = float(np.abs(rs.c[2:, 1]).min())
    elapsed = time.perf_counter() - t
    ok = h == Polynomial([0, 0, 1]) and off <= 1e-9 and lead > 1e-6 and elapsed < 2
    criterion(4, ok, f"off-band {off:.2e} (<= 1e-9), min |c_n,2| {lead:.3f} (> 1e-6), "
                     f"{elapsed:.2f} s")


def test_matrix_orthonormality(criterion):
    t = time.perf_counter()
    mu = Measure.chebyshev(200)
    spec = SobolevSpec.marcellan_ronveaux(mu, 0.0, 1, 1.0)
    basis = HBasis(minimal_h(spec))
    P = scalars_to_matrices(orthonormal_family(spec, 22).polynomials(), basis)
    L = build_L_sobolev(2, [(0, 1, 1.0, 0.0)])
    res = orthonormality_residual(P, MatrixMeasure(mu, 2, L), basis)
    elapsed = time.perf_counter() - t
    criterion(5, res <= 1e-8 and elapsed < 5,
              f"max |<P_n,P_m> - delta I| {res:.2e} for n,m <= 10 (<= 1e-8), {elapsed:.2f} s")


def test_difference_sobolev(criterion):
    mu = Measure.chebyshev(200)
    spec = SobolevSpec.difference(mu, 2, 0.0, 1.0)
    L = spec.L()
    L_ok = np.array_equal(L, [[0, 0], [0, 1]]) and np.array_equal(
        build_L_pointmass(2, [1, -1], [0, 1]), L)
    h = minimal_h(spec)
    off = band_residual(orthonormal_family(spec, 31).multiplication_table(h), 2)
    limit = orthonormal_family(SobolevSpec.marcellan_ronveaux(mu, 0.0, 1, 1.0), 8).polynomials()
    gaps = []
    for delta in (1.0, 0.1, 0.01):
        q = orthonormal_family(SobolevSpec.difference(mu, 2, 0.0, delta, normalized=True),
                               8).polynomials()
        gaps.append(max(float(np.abs(a.padded(8) - b.padded(8)).max())
                        for a, b in zip(q, limit)))
    monotone = gaps[0] > gaps[1] > gaps[2]
    ok = L_ok and h == Polynomial([0, -1, 1]) and off <= 1e-9 and monotone and gaps[-1] <= 1e-2
    criterion(6, ok, f"L ok {L_ok}, off-band {off:.2e} (<= 1e-9), coefficient gaps "
                     f"{', '.join(f'{g:.3g}' for g in gaps)} monotone {monotone}, "
                     f"final {gaps[-1]:.3g} (<= 1e-2)")


def test_N1_degeneration(criterion):
    mu = Measure.chebyshev(200)
    spec = SobolevSpec(mu)
    h = minimal_h(spec)
    fam = orthonormal_family(spec, 20)
    rs = extract_recurrence(spec, fam, h)
    expected = np.r_[np.sqrt(0.5), np.full(18, 0.5)]
    off = float(np.abs(rs.c[1:, 0] - expected).max())
    diag = float(np.abs(rs.c0).max())
    basis = HBasis(h)
    P = scalars_to_matrices(fam.polynomials(), basis)
    orth = orthonormality_residual(P, MatrixMeasure(mu, 1, spec.L()), basis)
    ok = h == Polynomial.x() and off <= 1e-10 and diag <= 1e-10 and orth <= 1e-8
    criterion(7, ok, f"|c_n,1 - (1/sqrt2, 1/2, ...)| {off:.2e}, |c_n,0| {diag:.2e} (<= 1e-10), "
                     f"scalar orthonormality {orth:.2e}")


def test_krein_diagnostics(criterion):
    t = time.perf_counter()
    h = Polynomial([-1, 0, 1])
    mu = accumulating_measure()
    r25, r50 = (krein_report(mu, h, s, 0.1) for s in (25, 50))
    control = krein_report(Measure.chebyshev(200), h, 50, 0.1)
    elapsed = time.perf_counter() - t
    trend = r50.near_fraction >= r25.near_fraction - 0.05
    decay = r50.decay_tail / r50.decay_head
    ctl = control.decay_tail / control.decay_head
    ok = trend and r50.near_fraction >= 0.8 and decay <= 0.1 and ctl >= 0.5 and elapsed < 3
    criterion(8, ok, f"near_fraction {r25.near_fraction:.2f} -> {r50.near_fraction:.2f} "
                     f"(trend {trend}, >= 0.8 at 50), tail/head {decay:.3f} (<= 0.1), "
                     f"control tail/head {ctl:.3f} (>= 0.5), {elapsed:.2f} s")


def test_round_trip_and_invariance(criterion, tmp_path):
    t = time.perf_counter()
    rng = np.random.default_rng(9)
    checks = {}

    worst = 0.0
    for N in (1, 2, 3, 4):
        basis = HBasis(Polynomial(np.r_[rng.uniform(-0.5, 0.5, N), 1.0]))
        for deg in range(8 * N + 1):
            p = Polynomial(rng.normal(size=deg + 1))
            err = np.abs(reconstruct(decompose(p, basis), basis).padded(deg + 1) - p.coeffs)
            worst = max(worst, err.max() / np.abs(p.coeffs).max())
    checks["hbasis round trip"] = worst <= 1e-12

    exact = True
    for N in (1, 2, 3):
        J = build_banded(random_system(rng, N, 5 * N), 4 * N)
        exact &= np.array_equal(block_partition(J).to_banded().to_dense(), J.to_dense())
    checks["block reassembly"] = exact

    lq_ok = True
    for N in (1, 2, 3):
        M = random_matrix(rng, N)
        Lm, Q = lq(M)
        phases = np.exp(1j * rng.uniform(0, 2 * np.pi, N))
        L2, Q2 = lq((Lm * phases) @ (phases.conj()[:, None] * Q))
        d = np.diag(Lm)
        lq_ok &= bool(np.all(d.real > 0) and np.all(d.imag == 0)
                      and np.allclose(L2, Lm, atol=1e-12) and np.allclose(Q2, Q, atol=1e-12))
    checks["LQ uniqueness"] = lq_ok

    psd = True
    for _ in range(10):
        N = int(rng.integers(2, 5))
        L = build_L_sobolev(N, [(0, int(rng.integers(1, N)), rng.uniform(0, 2),
                                 rng.uniform(-1, 1))])
        L = L + build_L_pointmass(N, rng.normal(size=3), rng.uniform(-1, 1, 3))
        check_psd(L)
        psd &= np.linalg.eigvalsh(L).min() >= -1e-12 * max(np.trace(L), 1.0)
    checks["L semidefinite"] = bool(psd)

    outs = []
    for i in range(2):
        out = tmp_path / f"demo{i}.txt"
        subprocess.run([sys.executable, "-m", "ortho_block", "demo", "sobolev-legendre",
                        "--seed", "42", "--out", str(out)], check=True)
        outs.append(out.read_bytes())
    checks["CLI reproducible"] = outs[0] == outs[1]

    elapsed = time.perf_counter() - t
    ok = all(checks.values()) and elapsed < 60
    failed = [k for k, v in checks.items() if not v]
    criterion(9, ok, f"{len(checks) - len(failed)}/{len(checks)} invariants green"
                     + (f" (failing: {', '.join(failed)})" if failed else "")
                     + f", round trip {worst:.1e}, {elapsed:.2f} s")
