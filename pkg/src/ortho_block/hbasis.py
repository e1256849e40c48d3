"""Expansion of polynomials in the basis ``{x**m * h(x)**i}``.

A polynomial ``p`` is written as ``sum_m x**m * part_m(h(x))`` with
``0 <= m < N = deg h``.  ``part_m`` is the m-th component polynomial.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, MultiplicityTooLow
from .polycore import Polynomial, _divmod_arrays, derivative, evaluate

MULTIPLICITY_TOL = 1e-9


@dataclass(frozen=True)
class HBasis:
    """Basis generated by ``h`` with ``N = deg h`` slots."""

    h: Polynomial

    def __post_init__(self):
        if self.h.degree < 1:
            raise ValueError("h must have degree >= 1")

    @property
    def N(self):
        return self.h.degree

    @classmethod
    def monomial(cls, N):
        """The basis for ``h(x) = x**N``."""
        return cls(Polynomial.monomial(N))


def decompose(p, basis):
    """Return the N component polynomials of ``p``.

    ``p`` is divided repeatedly by ``h``; the i-th remainder contributes its
    ``x**j`` coefficient as the ``t**i`` coefficient of component ``j``.
    """
    N = basis.N
    hc = basis.h.coeffs
    rems = []
    q = p.coeffs
    while q.size:
        q, r = _divmod_arrays(q, hc)
        rems.append(np.pad(r, (0, N - len(r))))
    if not rems:
        return [Polynomial() for _ in range(N)]
    table = np.array(rems)  # table[i, j]: coefficient of x**j h**i
    # component degrees are fixed by deg p, so only exact zeros are trimmed
    return [Polynomial(table[:, j], tol=0.0) for j in range(N)]


def reconstruct(parts, basis):
    """Inverse of :func:`decompose`: ``sum_m x**m * parts[m](h(x))``.

    Evaluated as Horner's rule in h over the remainders
    ``r_i(x) = sum_m parts[m][i] x**m``, which undoes the divisions of
    :func:`decompose` step by step and loses far less to cancellation than
    composing each part with h.
    """
    if len(parts) != basis.N:
        raise DimensionMismatch(f"expected {basis.N} parts, got {len(parts)}")
    depth = max(q.degree for q in parts) + 1
    if depth == 0:
        return Polynomial()
    table = np.array([q.padded(depth)[:depth] for q in parts])  # table[m, i]
    out = np.zeros(1, dtype=complex)
    for i in range(depth - 1, -1, -1):
        out = np.convolve(out, basis.h.coeffs)
        out[: basis.N] += table[:, i]
    return Polynomial(out)


def root_multiplicity(h, c, tol=MULTIPLICITY_TOL):
    """Number of consecutive vanishing derivatives ``h, h', ...`` at ``c``."""
    scale = 1.0 + float(np.max(np.abs(h.coeffs)))
    m = 0
    d = h
    while m <= h.degree and abs(evaluate(d, c)) <= tol * scale:
        m += 1
        d = derivative(d)
    return m


def derivatives_at_root(p, basis, c, j):
    """``p^(j)(c)`` from the component values at zero, for ``c`` a root of h.

    Valid when ``c`` is a root of ``h`` of multiplicity at least ``j + 1``;
    then only the constant terms of the components contribute::

        p^(j)(c) = sum_n n!/(n-j)! c**(n-j) part_n(0)
    """
    if j < 0:
        raise ValueError("derivative order must be nonnegative")
    mult = root_multiplicity(basis.h, c)
    if mult < j + 1:
        raise MultiplicityTooLow(
            f"c={c} is a root of h of multiplicity {mult}, need {j + 1}")
    parts = decompose(p, basis)
    total = 0j
    for n in range(j, basis.N):
        total += math.perm(n, j) * c ** (n - j) * parts[n].coeff(0)
    return total
