"""Banded Hermitian N-Jacobi matrices and their N x N block form.

The recurrence

    h(x) p_n = c[n,0] p_n + sum_{k=1..N} (conj(c[n,k]) p_{n-k} + c[n+k,k] p_{n+k})

is encoded by the Hermitian matrix with entries ``j[n, n+k] = c[n+k, k]``
for ``0 <= k <= N``.  Cutting it into N x N blocks gives Hermitian diagonal
blocks ``E_n`` and lower-triangular off-diagonal blocks ``D_n``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .errors import (CoefficientMissing, DegreeMismatch, NotDivisible,
                     SingularD)
from .polycore import Polynomial

HERMITIAN_TOL = 1e-12
SINGULAR_TOL = 1e-12


@dataclass(frozen=True)
class RecurrenceSystem:
    """Coefficients and initial values of a (2N+1)-term recurrence.

    ``c0[n]`` is the real diagonal coefficient ``c[n,0]``; ``c[n, k-1]`` holds
    ``c[n,k]`` for ``1 <= k <= N``.  Entries ``c[n,k]`` with ``n < k`` never
    enter the recurrence and are ignored.
    """

    N: int
    h: Polynomial
    c0: np.ndarray
    c: np.ndarray
    initial: tuple = field(default=())

    def __post_init__(self):
        c0 = np.asarray(self.c0, dtype=complex)
        if np.any(np.abs(c0.imag) > 0):
            raise ValueError("c[n,0] must be real")
        object.__setattr__(self, "c0", c0.real.astype(float))
        c = np.asarray(self.c, dtype=complex).reshape(-1, self.N)
        object.__setattr__(self, "c", c)
        if self.h.degree != self.N:
            raise DegreeMismatch(f"deg h = {self.h.degree}, expected N = {self.N}")
        lead = c[self.N:, self.N - 1] if len(c) > self.N else c[:0, 0]
        if np.any(lead == 0):
            raise ValueError("c[n,N] must be nonzero for every n >= N")
        init = tuple(self.initial) or tuple(
            Polynomial.monomial(k) for k in range(self.N))
        if len(init) != self.N or any(p.degree != k for k, p in enumerate(init)):
            raise ValueError("initial polynomials must have degrees 0..N-1")
        object.__setattr__(self, "initial", init)

    @property
    def length(self):
        """Number of indices n for which every c[n,k] is defined."""
        return min(len(self.c0), len(self.c))

    def coefficient(self, n, k):
        if k == 0:
            if n >= len(self.c0):
                raise CoefficientMissing(f"c[{n},0] is not defined")
            return complex(self.c0[n])
        if n >= len(self.c) or not 1 <= k <= self.N:
            raise CoefficientMissing(f"c[{n},{k}] is not defined")
        return self.c[n, k - 1]

    def polynomials(self, count):
        """Run the scalar recurrence forward and return ``p_0 .. p_{count-1}``."""
        N, h = self.N, self.h
        p = list(self.initial[:count])
        for n in range(0, count - N):
            acc = h * p[n] - self.coefficient(n, 0) * p[n]
            for k in range(1, N + 1):
                if n - k >= 0:
                    acc = acc - np.conj(self.coefficient(n, k)) * p[n - k]
            for k in range(1, N):
                acc = acc - self.coefficient(n + k, k) * p[n + k]
            p.append(acc / self.coefficient(n + N, N))
        return p


class BandedHermitian:
    """Finite section of a Hermitian matrix with half-bandwidth N.

    Only the main and upper diagonals are stored: ``diags[k][n]`` is the
    entry ``(n, n+k)``.  ``polluted`` counts trailing rows that differ from
    the infinite operator because of truncation.
    """

    def __init__(self, N, diags, polluted=0):
        self.N = int(N)
        self.diags = [np.asarray(d, dtype=complex) for d in diags]
        if len(self.diags) != self.N + 1:
            raise ValueError("need N+1 stored diagonals")
        self.size = len(self.diags[0])
        for k, d in enumerate(self.diags):
            if len(d) != max(self.size - k, 0):
                raise ValueError(f"diagonal {k} has wrong length")
        if np.any(np.abs(self.diags[0].imag) > 0):
            raise ValueError("main diagonal must be real")
        self.polluted = int(polluted)

    def __getitem__(self, idx):
        n, m = idx
        if not (0 <= n < self.size and 0 <= m < self.size):
            raise IndexError(idx)
        k = m - n
        if abs(k) > self.N:
            return 0j
        if k >= 0:
            return self.diags[k][n]
        return np.conj(self.diags[-k][m])

    def to_dense(self):
        A = np.zeros((self.size, self.size), dtype=complex)
        for k, d in enumerate(self.diags):
            if len(d):
                idx = np.arange(len(d))
                A[idx, idx + k] = d
                if k:
                    A[idx + k, idx] = np.conj(d)
        return A

    def entries(self):
        """Yield ``(row, col, value)`` for every stored band position."""
        for n in range(self.size):
            for m in range(max(0, n - self.N), min(self.size, n + self.N + 1)):
                yield n, m, self[n, m]

    @classmethod
    def from_dense(cls, A, N, polluted=0):
        A = np.asarray(A, dtype=complex)
        size = A.shape[0]
        diags = [np.array([A[i, i + k] for i in range(size - k)], dtype=complex)
                 for k in range(N + 1)]
        diags[0] = diags[0].real.astype(complex)
        return cls(N, diags, polluted)


@dataclass(frozen=True)
class BlockJacobi:
    """Block tridiagonal form: ``E[n]`` on the diagonal, ``D[n-1]`` = D_n above it.

    ``D`` is stored zero-based, so ``D[0]`` is D_1.
    """

    N: int
    E: tuple
    D: tuple

    def __post_init__(self):
        E = tuple(np.asarray(e, dtype=complex).reshape(self.N, self.N) for e in self.E)
        D = tuple(np.asarray(d, dtype=complex).reshape(self.N, self.N) for d in self.D)
        object.__setattr__(self, "E", E)
        object.__setattr__(self, "D", D)

    def D_at(self, n):
        """D_n for the one-based block index n >= 1."""
        return self.D[n - 1]

    def validate(self, check_singular=True):
        for n, e in enumerate(self.E):
            if np.max(np.abs(e - e.conj().T), initial=0.0) > HERMITIAN_TOL * max(1.0, np.abs(e).max()):
                raise ValueError(f"E_{n} is not Hermitian")
        for n, d in enumerate(self.D, start=1):
            if np.any(np.triu(d, 1) != 0):
                raise ValueError(f"D_{n} is not lower triangular")
            if check_singular:
                check_nonsingular(d, n)
        return self

    def to_dense(self):
        N, nb = self.N, len(self.E)
        A = np.zeros((N * nb, N * nb), dtype=complex)
        for n, e in enumerate(self.E):
            A[n * N:(n + 1) * N, n * N:(n + 1) * N] = e
        for n, d in enumerate(self.D[: nb - 1], start=1):
            A[(n - 1) * N:n * N, n * N:(n + 1) * N] = d
            A[n * N:(n + 1) * N, (n - 1) * N:n * N] = d.conj().T
        return A

    def to_banded(self):
        """Reassemble the banded matrix (inverse of :func:`block_partition`)."""
        return BandedHermitian.from_dense(self.to_dense(), self.N)

    def to_json(self):
        return {"N": self.N, "E": [_mat_json(e) for e in self.E],
                "D": [_mat_json(d) for d in self.D]}

    @classmethod
    def from_json(cls, data):
        return cls(int(data["N"]), tuple(_mat_from_json(e) for e in data["E"]),
                   tuple(_mat_from_json(d) for d in data["D"]))


def _mat_json(A):
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(A)]


def _mat_from_json(rows):
    return np.array([[complex(*z) if isinstance(z, (list, tuple)) else complex(z)
                      for z in row] for row in rows], dtype=complex)


def check_nonsingular(d, n):
    N = d.shape[0]
    norm = np.linalg.norm(d)
    det = np.prod(np.diag(d)) if not np.any(np.triu(d, 1)) else np.linalg.det(d)
    if norm == 0 or abs(det) <= SINGULAR_TOL * norm ** N:
        raise SingularD(f"D_{n} is numerically singular (|det| = {abs(det):.3g})")


def build_banded(sys, size):
    """Section ``size x size`` of the N-Jacobi matrix of ``sys``."""
    if size < 1:
        raise ValueError("size must be >= 1")
    N = sys.N
    diags = [np.array([sys.coefficient(n, 0) for n in range(size)])]
    for k in range(1, N + 1):
        diags.append(np.array([sys.coefficient(n + k, k) for n in range(size - k)],
                              dtype=complex))
    return BandedHermitian(N, diags)


def block_partition(J, check=True):
    """Split ``J`` into ``E_n`` (n >= 0) and lower-triangular ``D_n`` (n >= 1)."""
    N = J.N
    if J.size % N:
        raise NotDivisible(f"size {J.size} is not a multiple of N = {N}")
    A = J.to_dense()
    nb = J.size // N
    E = [A[n * N:(n + 1) * N, n * N:(n + 1) * N] for n in range(nb)]
    D = [np.tril(A[(n - 1) * N:n * N, n * N:(n + 1) * N]) for n in range(1, nb)]
    blocks = BlockJacobi(N, tuple(E), tuple(D))
    if check:
        blocks.validate()
    return blocks


def tridiagonal(a, b, size):
    """Sparse ``size x size`` Jacobi matrix, diagonal ``b``, off-diagonal ``a``.

    ``a[i]`` couples rows ``i`` and ``i+1`` (the coefficient a_{i+1}).
    """
    b = np.asarray(b, dtype=float)[:size]
    a = np.asarray(a, dtype=float)[: size - 1]
    if len(b) < size or len(a) < size - 1:
        raise CoefficientMissing(f"recurrence coefficients too short for size {size}")
    return sp.diags([a, b, a], [-1, 0, 1], shape=(size, size), format="csr")


def h_of_tridiagonal(a, b, h, size, N=None):
    """Section of ``h(J)`` for the tridiagonal ``J`` given by ``a, b``.

    Horner's rule on the ``size x size`` section of J.  Entries in the last
    ``deg h`` rows and columns feel the truncation and are flagged as
    polluted on the result.
    """
    deg = h.degree
    if N is not None and deg != N:
        raise DegreeMismatch(f"deg h = {deg}, expected {N}")
    if deg < 1:
        raise DegreeMismatch("h must have degree >= 1")
    J = tridiagonal(a, b, size).astype(complex)
    eye = sp.identity(size, dtype=complex, format="csr")
    H = h.leading * eye
    for coef in h.coeffs[-2::-1]:
        H = H @ J + coef * eye
    H = H.toarray()
    diags = [np.array([H[i, i + k] for i in range(size - k)]) for k in range(deg + 1)]
    diags[0] = diags[0].real.astype(complex)
    return BandedHermitian(deg, diags, polluted=min(deg, size))


def decay_profile(J):
    """Per-block size ``max(|E_k|_F, |D_k|_F)`` over the unpolluted blocks."""
    N = J.N
    clean = J.size - J.polluted
    nb = clean // N
    A = J.to_dense()
    out = []
    for k in range(nb):
        e = np.linalg.norm(A[k * N:(k + 1) * N, k * N:(k + 1) * N])
        d = np.linalg.norm(A[(k - 1) * N:k * N, k * N:(k + 1) * N]) if k else 0.0
        out.append(float(max(e, d)))
    return out


def recurrence_residual(sys, p):
    """Largest coefficient error of ``h p_n`` against the banded expansion.

    Checks every n with ``n + N < len(p)``; the error is measured relative
    to ``1 + max|coeff(h p_n)|``.
    """
    N = sys.N
    worst = 0.0
    for n in range(len(p) - N):
        lhs = sys.h * p[n]
        rhs = sys.coefficient(n, 0) * p[n]
        for k in range(1, N + 1):
            if n - k >= 0:
                rhs = rhs + np.conj(sys.coefficient(n, k)) * p[n - k]
            rhs = rhs + sys.coefficient(n + k, k) * p[n + k]
        diff = (lhs - rhs).coeffs
        scale = 1.0 + float(np.max(np.abs(lhs.coeffs), initial=0.0))
        worst = max(worst, float(np.max(np.abs(diff), initial=0.0)) / scale)
    return worst


def system_from_banded(J, h, initial=()):
    """Read the recurrence coefficients back off the diagonals of ``J``.

    ``c[m,k] = J[m-k, m]``; coefficients with ``m < k`` are set to zero since
    they never enter the recurrence.
    """
    N, size = J.N, J.size
    c0 = J.diags[0].real.copy()
    c = np.zeros((size, N), dtype=complex)
    for k in range(1, N + 1):
        c[k:, k - 1] = J.diags[k]
    return RecurrenceSystem(N, h, c0, c, tuple(initial))


def system_to_json(sys):
    return {
        "N": sys.N,
        "h": sys.h.to_json(),
        "c0": [float(v) for v in sys.c0],
        "c": [[[float(z.real), float(z.imag)] for z in row] for row in sys.c],
        "initial": [p.to_json() for p in sys.initial],
    }


def system_from_json(data):
    N = int(data["N"])
    c = np.array([[complex(*z) if isinstance(z, (list, tuple)) else complex(z) for z in row]
                  for row in data["c"]], dtype=complex).reshape(-1, N)
    init = tuple(Polynomial.from_json(p) for p in data.get("initial", ()))
    return RecurrenceSystem(N, Polynomial.from_json(data["h"]), data["c0"], c, init)
