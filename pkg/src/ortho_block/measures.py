"""Scalar measures, Gauss quadrature and the matrix measure of the h-basis.

A :class:`Measure` is either a finite discrete measure or a measure known
through its three-term recurrence coefficients (integrated with Gauss
quadrature).  The matrix measure with entries ``x**(k+l) dmu`` is never
built explicitly: every integral against it is a scalar quadrature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegreeExceedsQuadrature, IndexOutOfRange, RankDeficient

PSD_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class Measure:
    """Positive measure on the real line.

    Exactly one of ``points``/``weights`` (discrete) or ``a``/``b``
    (recurrence) is used.  For the recurrence form, ``a[i]`` is a_{i+1},
    ``b[i]`` is b_i and ``mass`` is the total mass.
    """

    points: np.ndarray = None
    weights: np.ndarray = None
    a: np.ndarray = None
    b: np.ndarray = None
    mass: float = 1.0

    def __post_init__(self):
        if self.points is not None:
            x = np.asarray(self.points, dtype=float).ravel()
            w = np.asarray(self.weights, dtype=float).ravel()
            if x.shape != w.shape:
                raise ValueError("points and weights differ in length")
            if np.any(w <= 0):
                raise ValueError("weights must be positive")
            object.__setattr__(self, "points", x)
            object.__setattr__(self, "weights", w)
            object.__setattr__(self, "mass", float(w.sum()))
        elif self.b is not None:
            a = np.asarray(self.a if self.a is not None else [], dtype=float).ravel()
            b = np.asarray(self.b, dtype=float).ravel()
            if np.any(a <= 0):
                raise ValueError("recurrence coefficients a_n must be positive")
            if self.mass <= 0:
                raise ValueError("mass must be positive")
            object.__setattr__(self, "a", a)
            object.__setattr__(self, "b", b)
        else:
            raise ValueError("a measure needs a support or recurrence coefficients")

    @property
    def discrete(self):
        return self.points is not None

    @classmethod
    def from_support(cls, support):
        support = list(support)
        if not support:
            return cls(points=np.zeros(0), weights=np.zeros(0))
        x, w = zip(*support)
        return cls(points=np.array(x), weights=np.array(w))

    @classmethod
    def from_recurrence(cls, a, b, mass=1.0):
        return cls(a=np.asarray(a), b=np.asarray(b), mass=mass)

    @classmethod
    def chebyshev(cls, count=200):
        """Normalised Chebyshev measure ``dx / (pi sqrt(1 - x^2))`` on [-1, 1]."""
        a = np.full(count - 1, 0.5)
        a[0] = np.sqrt(0.5)
        return cls(a=a, b=np.zeros(count))

    @classmethod
    def legendre(cls, count=200):
        """Uniform probability measure ``dx / 2`` on [-1, 1]."""
        n = np.arange(1, count)
        return cls(a=n / np.sqrt(4.0 * n * n - 1.0), b=np.zeros(count))

    def recurrence(self, count):
        """``(a, b)`` with ``len(b) == count`` and ``len(a) == count - 1``."""
        if self.discrete:
            a, b = stieltjes(list(zip(self.points, self.weights)), count)
            return a, b
        if len(self.b) < count or len(self.a) < count - 1:
            raise DegreeExceedsQuadrature(
                f"only {len(self.b)} recurrence coefficients available, need {count}")
        return self.a[: count - 1], self.b[:count]

    def quadrature(self, degree):
        """Nodes and weights integrating polynomials of ``degree`` exactly."""
        if self.discrete:
            return self.points, self.weights
        q = max(degree, 0) // 2 + 1
        if q > len(self.b) or q - 1 > len(self.a):
            raise DegreeExceedsQuadrature(
                f"degree {degree} needs {q} Gauss nodes, only {len(self.b)} available")
        return gauss_nodes(self, q)

    def to_json(self):
        if self.discrete:
            return {"support": [[float(x), float(w)] for x, w in zip(self.points, self.weights)]}
        out = {"recurrence": {"a": [float(v) for v in self.a], "b": [float(v) for v in self.b]}}
        if self.mass != 1.0:
            out["recurrence"]["mass"] = float(self.mass)
        return out

    @classmethod
    def from_json(cls, data):
        if "support" in data:
            return cls.from_support([(float(x), float(w)) for x, w in data["support"]])
        rec = data["recurrence"]
        return cls.from_recurrence(rec.get("a", []), rec["b"], float(rec.get("mass", 1.0)))


def moment(mu, k):
    """``int x**k dmu``."""
    x, w = mu.quadrature(k)
    return float(np.sum(w * x ** k))


def gauss_nodes(mu, q):
    """q-point Gauss rule from the eigen-decomposition of the Jacobi section."""
    a, b = mu.recurrence(q)
    J = np.diag(b) + np.diag(a, 1) + np.diag(a, -1)
    nodes, vecs = np.linalg.eigh(J)
    return nodes, mu.mass * vecs[0] ** 2


def stieltjes(support, count):
    """Recurrence coefficients of the orthonormal polynomials of a discrete measure.

    Lanczos on ``diag(points)`` started from ``sqrt(weights)``, with full
    reorthogonalisation.  Returns ``(a, b)`` with ``count - 1`` and ``count``
    entries.
    """
    x = np.array([float(p) for p, _ in support])
    w = np.array([float(v) for _, v in support])
    if count < 1:
        return np.zeros(0), np.zeros(0)
    if len(np.unique(x)) < count:
        raise RankDeficient(
            f"{len(np.unique(x))} distinct support points cannot carry {count} coefficients")
    Q = np.zeros((len(x), count))
    q = np.sqrt(w / w.sum())
    a = np.zeros(count - 1)
    b = np.zeros(count)
    for n in range(count):
        Q[:, n] = q
        v = x * q
        b[n] = q @ v
        if n == count - 1:
            break
        v -= b[n] * q
        if n:
            v -= a[n - 1] * Q[:, n - 1]
        for _ in range(2):
            v -= Q[:, : n + 1] @ (Q[:, : n + 1].T @ v)
        a[n] = np.linalg.norm(v)
        if a[n] == 0:
            raise RankDeficient("Lanczos breakdown before reaching the requested count")
        q = v / a[n]
    return a, b


def check_psd(L, tol=PSD_TOL):
    L = np.asarray(L, dtype=complex)
    if np.max(np.abs(L - L.conj().T), initial=0.0) > tol * max(1.0, np.abs(L).max(initial=0.0)):
        raise ValueError("L is not Hermitian")
    lo = np.linalg.eigvalsh(L).min() if L.size else 0.0
    if lo < -tol * max(np.trace(L).real, 1.0):
        raise ValueError(f"L is not positive semidefinite (min eigenvalue {lo:.3g})")
    return L


def _derivative_row(N, j, c):
    return np.array([math.perm(k, j) * c ** (k - j) if k >= j else 0.0 for k in range(N)])


def build_L_sobolev(N, terms):
    """Point-mass weight for derivative terms ``(i, j, lam, c_i)``.

    Each term adds ``lam * v v^T`` with ``v_k = k!/(k-j)! c_i**(k-j)``.
    """
    L = np.zeros((N, N))
    for i, j, lam, c in terms:
        if not 1 <= j <= N - 1:
            raise IndexOutOfRange(f"derivative order {j} outside 1..{N - 1} (term {i})")
        if lam < 0:
            raise ValueError("lambda must be nonnegative")
        v = _derivative_row(N, j, float(c))
        L += lam * np.outer(v, v)
    return L


def build_L_pointmass(N, a, c):
    """Rank-one weight ``v v^T`` with ``v_k = sum_j a_j c_j**k``."""
    a = np.asarray(a, dtype=float)
    c = np.asarray(c, dtype=float)
    v = np.array([np.sum(a * c ** k) for k in range(N)])
    return np.outer(v, v)


@dataclass(frozen=True, eq=False)
class MatrixMeasure:
    """Matrix measure ``x**(k+l) dmu`` pushed through h, plus ``L`` at zero."""

    base: Measure
    N: int
    L: np.ndarray

    def __post_init__(self):
        L = np.asarray(self.L, dtype=complex).reshape(self.N, self.N)
        check_psd(L)
        object.__setattr__(self, "L", L)


def _row_functions(P, basis, x):
    """``F[s, i] = sum_k P_{i,k}(h(x_s)) x_s**k``."""
    hx = basis.h(x)
    vals = P(hx)  # (s, N, N)
    powers = np.power.outer(np.asarray(x, dtype=complex), np.arange(basis.N))
    return np.einsum("sik,sk->si", vals, powers)


def matrix_inner(Pn, Pm, mm, basis):
    """``int P_n(h) dM P_m(h)^* + P_n(0) L P_m(0)^*``."""
    N = basis.N
    deg = max(Pn.degree, 0) * N + max(Pm.degree, 0) * N + 2 * N - 2
    x, w = mm.base.quadrature(deg)
    out = np.zeros((N, N), dtype=complex)
    if len(x):
        Fn = _row_functions(Pn, basis, x)
        Fm = _row_functions(Pm, basis, x)
        out += np.einsum("s,si,sj->ij", w, Fn, Fm.conj())
    out += Pn(0.0) @ mm.L @ Pm(0.0).conj().T
    return out


def orthonormality_residual(P, mm, basis):
    """``max_{n,m} |<P_n, P_m> - delta I|`` (entrywise)."""
    N = basis.N
    worst = 0.0
    for n, Pn in enumerate(P):
        for m in range(n, len(P)):
            G = matrix_inner(Pn, P[m], mm, basis)
            if n == m:
                G = G - np.eye(N)
            worst = max(worst, float(np.abs(G).max()))
    return worst
