"""Canonical end-to-end scenarios behind ``ortho-block demo``."""

from __future__ import annotations

import numpy as np

from .errors import VerificationFailure
from .hbasis import HBasis
from .krein import krein_report
from .matpoly import scalars_to_matrices
from .measures import Measure, MatrixMeasure, orthonormality_residual
from .polycore import Polynomial
from .sobolev import (SobolevSpec, extract_recurrence, inner, minimal_h,
                      orthonormal_family)


def accumulating_measure(terms=25):
    """``sum_k 2^-k (delta_{1-1/(k+1)} + delta_{-1+1/(k+1)})``, k = 1..terms."""
    support = []
    for k in range(1, terms + 1):
        support += [(1 - 1 / (k + 1), 2.0 ** -k), (-1 + 1 / (k + 1), 2.0 ** -k)]
    return Measure.from_support(support)


def _f(x):
    return format(float(x), ".17g")


def _band_residual(fam, h):
    T = fam.multiplication_table(h)
    N = h.degree
    n = len(T)
    return max((abs(T[i, j]) for i in range(n) for j in range(n) if abs(i - j) > N),
               default=0.0)


def sobolev_legendre(cfg):
    mu = Measure.legendre(200)
    spec = SobolevSpec.marcellan_ronveaux(mu, 0.0, 1, 1.0)
    h = minimal_h(spec)
    fam = orthonormal_family(spec, 30)
    p = fam.polynomials()
    basis = HBasis(h)
    P = scalars_to_matrices(p[:22], basis)
    orth = orthonormality_residual(P, MatrixMeasure(mu, basis.N, spec.L()), basis)
    rs = extract_recurrence(spec, fam, h)

    rng = np.random.default_rng(cfg.seed)
    sym = 0.0
    for _ in range(5):
        a = Polynomial(rng.standard_normal(rng.integers(1, 26)))
        b = Polynomial(rng.standard_normal(rng.integers(1, 26)))
        lhs, rhs = inner(spec, h * a, b), inner(spec, a, h * b)
        sym = max(sym, abs(lhs - rhs) / (1 + abs(inner(spec, a, b))))

    lines = [
        "demo sobolev-legendre",
        "measure: uniform on [-1, 1], derivative term lambda=1 at c=0 (order 1)",
        f"h: {[_f(z.real) for z in h.coeffs]}",
        f"N: {basis.N}",
        f"L: {spec.L().tolist()}",
        f"family_gram_residual: {_f(np.abs(fam.gram() - np.eye(len(fam))).max())}",
        f"band_residual: {_f(_band_residual(fam, h))}",
        f"min_abs_c_n_N: {_f(np.abs(rs.c[basis.N:, basis.N - 1]).min())}",
        f"matrix_orthonormality_residual: {_f(orth)}",
        f"symmetry_residual(seed={cfg.seed}): {_f(sym)}",
    ]
    text = "\n".join(lines) + "\n"
    if orth > cfg.tol:
        raise VerificationFailure(text + "orthonormality residual above tolerance", orth)
    return text


def bavinck_difference(cfg):
    mu = Measure.chebyshev(200)
    lines = ["demo bavinck-difference", "measure: Chebyshev, N=2, c=(0, delta)"]
    spec = SobolevSpec.difference(mu, 2, 0.0, 1.0)
    h = minimal_h(spec)
    L = spec.L()
    fam = orthonormal_family(spec, 30)
    basis = HBasis(h)
    # h = x(x-1) maps [-1, 1] onto [-1/4, 2]; monomial evaluation of the
    # components loses accuracy past degree ~16
    P = scalars_to_matrices(fam.polynomials()[:14], basis)
    orth = orthonormality_residual(P, MatrixMeasure(mu, 2, L), basis)
    lines += [
        "delta: 1",
        f"a: {list(spec.point_a)}",
        f"h: {[_f(z.real) for z in h.coeffs]}",
        f"L: {L.tolist()}",
        f"band_residual: {_f(_band_residual(fam, h))}",
        f"matrix_orthonormality_residual(n<7): {_f(orth)}",
        "convergence to the derivative family (weights scaled by 1/delta):",
    ]
    limit = orthonormal_family(SobolevSpec.marcellan_ronveaux(mu, 0.0, 1, 1.0), 8).polynomials()
    for delta in (1.0, 0.1, 0.01):
        q = orthonormal_family(SobolevSpec.difference(mu, 2, 0.0, delta, normalized=True),
                               8).polynomials()
        gap = max(float(np.abs(a.padded(8) - b.padded(8)).max()) for a, b in zip(q, limit))
        lines.append(f"  delta={delta}: max_coefficient_gap={_f(gap)}")
    text = "\n".join(lines) + "\n"
    if orth > cfg.tol:
        raise VerificationFailure(text + "orthonormality residual above tolerance", orth)
    return text


def krein_accumulation(cfg):
    from .cli import _krein_text
    mu = accumulating_measure()
    h = Polynomial([-1.0, 0.0, 1.0])
    text, _ = _krein_text(mu, h, [10, 25, 50], 0.1)
    return text


def run(name, cfg):
    return {"sobolev-legendre": sobolev_legendre,
            "bavinck-difference": bavinck_difference,
            "krein-accumulation": krein_accumulation}[name](cfg)
