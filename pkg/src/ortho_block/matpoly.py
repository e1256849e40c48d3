"""N x N matrix polynomials and their link to scalar (2N+1)-term families.

Row ``m`` of ``P_n`` holds the components of ``p_{nN+m}`` in the h-basis,
and ``P_n`` satisfy

    x P_n = D_{n+1} P_{n+1} + E_n P_n + D_n^* P_{n-1}.

Matrix coefficients always act from the left.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import solve_triangular

from .errors import DegreeViolation, NotTriangular, SingularA, SingularD
from .hbasis import decompose, reconstruct
from .jacobi import BlockJacobi, check_nonsingular
from .polycore import Polynomial

TRIANGULAR_TOL = 1e-11


class MatrixPolynomial:
    """``sum_i coeffs[i] x**i`` with ``coeffs`` of shape ``(deg+1, N, N)``."""

    def __init__(self, coeffs, N=None):
        c = np.asarray(coeffs, dtype=complex)
        if c.ndim == 2:
            c = c[None]
        if N is None:
            N = c.shape[-1]
        c = c.reshape(-1, N, N)
        nz = [i for i in range(len(c)) if np.any(c[i] != 0)]
        c = c[: nz[-1] + 1] if nz else c[:0]
        c = c.copy()
        c.setflags(write=False)
        self.N = int(N)
        self.coeffs = c

    @classmethod
    def zero(cls, N):
        return cls(np.zeros((0, N, N)), N)

    @classmethod
    def identity(cls, N):
        return cls(np.eye(N)[None], N)

    @property
    def degree(self):
        return len(self.coeffs) - 1

    def coeff(self, i):
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return np.zeros((self.N, self.N), dtype=complex)

    @property
    def leading(self):
        return self.coeff(self.degree)

    def padded(self, length):
        out = np.zeros((max(length, len(self.coeffs)), self.N, self.N), dtype=complex)
        out[: len(self.coeffs)] = self.coeffs
        return out

    def __add__(self, other):
        n = max(len(self.coeffs), len(other.coeffs))
        return MatrixPolynomial(self.padded(n) + other.padded(n), self.N)

    def __sub__(self, other):
        n = max(len(self.coeffs), len(other.coeffs))
        return MatrixPolynomial(self.padded(n) - other.padded(n), self.N)

    def shift(self):
        """Multiply by the scalar ``x``."""
        if self.degree < 0:
            return self
        return MatrixPolynomial(np.concatenate(
            [np.zeros((1, self.N, self.N)), self.coeffs]), self.N)

    def lmul(self, A):
        """Left multiplication ``A @ P(x)`` by a constant matrix."""
        return MatrixPolynomial(np.einsum("ij,kjl->kil", A, self.coeffs), self.N)

    def __call__(self, x):
        """Value at ``x``; an array input yields shape ``x.shape + (N, N)``."""
        x = np.asarray(x, dtype=complex)
        out = np.zeros(x.shape + (self.N, self.N), dtype=complex)
        for c in self.coeffs[::-1]:
            out = out * x[..., None, None] + c
        return out

    def entry(self, m, j):
        """Scalar polynomial in position ``(m, j)``."""
        return Polynomial(self.coeffs[:, m, j])

    def to_json(self):
        return [[[[float(z.real), float(z.imag)] for z in row] for row in c]
                for c in self.coeffs]

    @classmethod
    def from_json(cls, data, N):
        arr = np.array([[[complex(*z) if isinstance(z, (list, tuple)) else complex(z)
                          for z in row] for row in c] for c in data], dtype=complex)
        return cls(arr.reshape(-1, N, N), N)

    def __repr__(self):
        return f"MatrixPolynomial(N={self.N}, degree={self.degree})"


def scalars_to_matrix(p, basis, n):
    """Assemble ``P_n`` whose row m holds the components of ``p[nN+m]``."""
    N = basis.N
    rows = []
    for m in range(N):
        k = n * N + m
        if k >= len(p):
            raise IndexError(f"need p_{k} to build P_{n}")
        if p[k].degree != k:
            raise DegreeViolation(f"deg p_{k} = {p[k].degree}, expected {k}")
        rows.append(decompose(p[k], basis))
    coeffs = np.zeros((n + 1, N, N), dtype=complex)
    for m, parts in enumerate(rows):
        for j, part in enumerate(parts):
            coeffs[: part.degree + 1, m, j] = part.coeffs
    return MatrixPolynomial(coeffs, N)


def scalars_to_matrices(p, basis):
    """All complete ``P_n`` that fit in ``p``."""
    return [scalars_to_matrix(p, basis, n) for n in range(len(p) // basis.N)]


def _lower_leading(P, n):
    lead = P.coeff(n).copy()
    scale = max(np.abs(lead).max(initial=0.0), 1e-300)
    upper = np.triu(lead, 1)
    if np.abs(upper).max(initial=0.0) > TRIANGULAR_TOL * scale:
        raise NotTriangular(f"leading coefficient of P_{n} is not lower triangular")
    if np.any(np.abs(np.diag(lead)) <= TRIANGULAR_TOL * scale) or P.degree > n:
        raise NotTriangular(f"leading coefficient of P_{n} has a vanishing diagonal")
    coeffs = P.padded(n + 1)
    # round-off above the diagonal would raise the scalar degree
    coeffs[n] = np.tril(lead)
    return MatrixPolynomial(coeffs, P.N)


def matrix_to_scalars(P, basis):
    """Scalar family ``p_{nN+m}(x) = sum_j x**j P_{n,m,j}(h(x))``."""
    N = basis.N
    out = []
    for n, Pn in enumerate(P):
        Pn = _lower_leading(Pn, n)
        for m in range(N):
            out.append(reconstruct([Pn.entry(m, j) for j in range(N)], basis))
    return out


def generate(blocks, P0, count):
    """Run the block recurrence forward from ``P0`` and return ``P_0..P_{count-1}``."""
    N = blocks.N
    P0 = P0 if isinstance(P0, MatrixPolynomial) else MatrixPolynomial(P0, N)
    if P0.degree != 0:
        raise ValueError("P0 must be a constant matrix polynomial")
    c0 = P0.coeff(0)
    if np.any(np.triu(c0, 1) != 0) or np.any(np.diag(c0) == 0):
        raise ValueError("P0 must be lower triangular and nonsingular")
    if count > len(blocks.E) + 1 or count - 1 > len(blocks.D):
        raise IndexError(f"blocks too short for {count} polynomials")
    P = [P0]
    prev = MatrixPolynomial.zero(N)
    for n in range(count - 1):
        d_next = blocks.D[n]
        check_nonsingular(d_next, n + 1)
        rhs = P[n].shift() - P[n].lmul(blocks.E[n])
        if n > 0:
            rhs = rhs - prev.lmul(blocks.D[n - 1].conj().T)
        deg = rhs.degree + 1
        stacked = rhs.coeffs.transpose(1, 0, 2).reshape(N, deg * N)
        sol = solve_triangular(d_next, stacked, lower=True)
        nxt = MatrixPolynomial(sol.reshape(N, deg, N).transpose(1, 0, 2), N)
        prev = P[n]
        P.append(nxt)
    return P


def verify_three_term(P, blocks):
    """Largest Frobenius residual of the block recurrence over the family."""
    N = blocks.N
    worst = 0.0
    for n in range(len(P) - 1):
        r = P[n].shift() - P[n + 1].lmul(blocks.D[n]) - P[n].lmul(blocks.E[n])
        if n > 0:
            r = r - P[n - 1].lmul(blocks.D[n - 1].conj().T)
        worst = max(worst, float(np.linalg.norm(r.coeffs)) if r.degree >= 0 else 0.0)
    return worst


def lq(M):
    """``M = L @ Q`` with L lower triangular (positive real diagonal), Q unitary."""
    Q, R = np.linalg.qr(np.asarray(M, dtype=complex).conj().T)
    d = np.diag(R)
    phase = np.where(np.abs(d) > 0, d / np.where(d == 0, 1, np.abs(d)), 1.0)
    R = R / phase[:, None]
    Q = Q * phase[None, :]
    L = np.tril(R.conj().T)
    return L, Q.conj().T


def ql_unitary(Q0):
    """Unitary ``U`` with ``U @ Q0`` lower triangular with positive diagonal."""
    Q0 = np.asarray(Q0, dtype=complex)
    F = np.eye(len(Q0))[::-1]
    Q, R = np.linalg.qr(F @ Q0 @ F)
    d = np.diag(R)
    phase = np.where(np.abs(d) > 0, d / np.where(d == 0, 1, np.abs(d)), 1.0)
    Q = Q * phase[None, :]
    return (F @ Q @ F).conj().T


def lower_triangularize(A, B, U0=None, Q0=None):
    """Rotate recurrence matrices so that every D_n is lower triangular.

    ``A[0]`` is A_1 and ``B[0]`` is B_0.  Factorises ``U_{n-1} A_n = D_n U_n``
    by LQ and rotates ``E_n = U_n B_n U_n^*``.  ``U0`` defaults to the
    unitary that makes ``U0 @ Q0`` lower triangular (identity if ``Q0`` is
    not given).

    Returns
    -------
    D, E, U : lists of ndarrays
        ``D[0]`` is D_1; ``E[0]`` is E_0; ``U[0]`` is U_0.
    """
    A = [np.asarray(a, dtype=complex) for a in A]
    if U0 is None:
        U0 = ql_unitary(Q0) if Q0 is not None else np.eye(len(A[0]) if A else len(B[0]))
    U = [np.asarray(U0, dtype=complex)]
    D = []
    for n, a in enumerate(A, start=1):
        N = a.shape[0]
        norm = np.linalg.norm(a)
        if norm == 0 or abs(np.linalg.det(a)) <= 1e-12 * norm ** N:
            raise SingularA(f"A_{n} is numerically singular")
        L, Un = lq(U[-1] @ a)
        D.append(L)
        U.append(Un)
    E = []
    for n, b in enumerate(B):
        b = np.asarray(b, dtype=complex)
        e = U[n] @ b @ U[n].conj().T
        E.append((e + e.conj().T) / 2)
    return D, E, U


def normalized_blocks(A, B, U0=None, Q0=None):
    """:func:`lower_triangularize` packaged as a :class:`BlockJacobi`."""
    D, E, U = lower_triangularize(A, B, U0=U0, Q0=Q0)
    return BlockJacobi(len(E[0]), tuple(E), tuple(D)), U
