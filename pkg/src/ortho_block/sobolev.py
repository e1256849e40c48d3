"""Discrete Sobolev and point-evaluation inner products.

Both perturb ``int f g dmu`` by finitely many evaluations at points where
the generating polynomial h vanishes, so that ``<h f, g> = <f, h g>`` and the
orthonormal family obeys a (2N+1)-term recurrence with ``N = deg h``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solve_triangular

from .errors import BandViolation, GramNotPD
from .hbasis import HBasis
from .jacobi import RecurrenceSystem
from .measures import Measure, build_L_pointmass, build_L_sobolev
from .polycore import Polynomial, derivative, evaluate

MAX_DEGREE = 40
PIVOT_TOL = 1e-13
BAND_TOL = 1e-8


@dataclass(frozen=True)
class DerivativeTerm:
    """``sum_j lam_j f^(j)(c) g^(j)(c)`` with ``orders = {j: lam_j}``, j >= 1."""

    c: float
    orders: dict

    def __post_init__(self):
        orders = {int(j): float(lam) for j, lam in dict(self.orders).items()}
        if any(j < 1 for j in orders):
            raise ValueError("derivative orders start at 1")
        if any(lam < 0 for lam in orders.values()):
            raise ValueError("lambda must be nonnegative")
        object.__setattr__(self, "c", float(self.c))
        object.__setattr__(self, "orders", orders)

    @property
    def max_order(self):
        return max(self.orders, default=0)


@dataclass(frozen=True, eq=False)
class SobolevSpec:
    """``<f,g> = int f g dmu + derivative terms + (sum a_k f(c_k))(sum a_k g(c_k))``."""

    mu: Measure
    derivative_terms: tuple = ()
    point_a: tuple = ()
    point_c: tuple = ()
    name: str = field(default="")

    def __post_init__(self):
        object.__setattr__(self, "derivative_terms", tuple(
            t if isinstance(t, DerivativeTerm) else DerivativeTerm(**t)
            for t in self.derivative_terms))
        if len(self.point_a) != len(self.point_c):
            raise ValueError("point terms need as many weights as points")
        object.__setattr__(self, "point_a", tuple(float(v) for v in self.point_a))
        object.__setattr__(self, "point_c", tuple(float(v) for v in self.point_c))

    @classmethod
    def marcellan_ronveaux(cls, mu, c, r, lam):
        """Single derivative of order ``r`` at ``c``: h = (x - c)**(r + 1)."""
        return cls(mu, (DerivativeTerm(c, {r: lam}),), name="marcellan-ronveaux")

    @classmethod
    def difference(cls, mu, N, c, delta, normalized=False):
        """``(N-1)``-st forward difference at ``c`` with step ``delta``.

        ``normalized`` divides the weights by ``delta**(N-1)`` so the term
        tends to ``f^(N-1)(c) g^(N-1)(c)`` as ``delta -> 0``.
        """
        a = [(-1) ** k * math.comb(N - 1, k) for k in range(N)]
        if normalized:
            a = [v / delta ** (N - 1) for v in a]
        pts = [c + k * delta for k in range(N)]
        return cls(mu, point_a=tuple(a), point_c=tuple(pts), name="difference")

    @property
    def N(self):
        return minimal_h(self).degree

    def L(self):
        """Weight matrix of the point mass at zero in the h-basis."""
        N = self.N
        L = np.zeros((N, N))
        terms = [(i, j, lam, t.c) for i, t in enumerate(self.derivative_terms)
                 for j, lam in t.orders.items()]
        if terms:
            L += build_L_sobolev(N, terms)
        if self.point_a:
            L += build_L_pointmass(N, self.point_a, self.point_c)
        return L

    def to_json(self):
        out = {"measure": self.mu.to_json()}
        if self.derivative_terms:
            out["derivative_terms"] = [
                {"c": t.c, "orders": {str(j): lam for j, lam in sorted(t.orders.items())}}
                for t in self.derivative_terms]
        if self.point_a:
            out["point_terms"] = {"a": list(self.point_a), "c": list(self.point_c)}
        return out

    @classmethod
    def from_json(cls, data):
        mu = Measure.from_json(data["measure"])
        terms = tuple(DerivativeTerm(t["c"], t["orders"]) for t in data.get("derivative_terms", ()))
        pt = data.get("point_terms") or {}
        return cls(mu, terms, tuple(pt.get("a", ())), tuple(pt.get("c", ())))


def minimal_h(spec):
    """``prod (x - c_i)**(M_i + 1) * prod (x - c_k)``, monic."""
    roots = []
    for t in spec.derivative_terms:
        roots += [t.c] * (t.max_order + 1)
    roots += list(spec.point_c)
    if not roots:
        return Polynomial.x()
    return Polynomial.from_roots(roots)


def inner(spec, p, q):
    """Value of the inner product on two polynomials."""
    x, w = spec.mu.quadrature(max(p.degree, 0) + max(q.degree, 0))
    val = np.sum(w * evaluate(p, x) * evaluate(q, x)) if len(x) else 0j
    for t in spec.derivative_terms:
        for j, lam in t.orders.items():
            if lam:
                val += lam * evaluate(derivative(p, j), t.c) * evaluate(derivative(q, j), t.c)
    if spec.point_a:
        a = np.asarray(spec.point_a)
        c = np.asarray(spec.point_c)
        val += np.sum(a * evaluate(p, c)) * np.sum(a * evaluate(q, c))
    return complex(val).real if abs(complex(val).imag) == 0 else complex(val)


def mu_orthonormal(mu, count):
    """Orthonormal polynomials of ``mu`` built from its recurrence coefficients."""
    a, b = mu.recurrence(count)
    x = Polynomial.x()
    out = [Polynomial([1.0 / math.sqrt(mu.mass)])]
    prev = Polynomial()
    for n in range(count - 1):
        nxt = (x - b[n]) * out[n]
        if n:
            nxt = nxt - a[n - 1] * prev
        prev = out[n]
        out.append(nxt / a[n])
    return out


def mu_orthonormal_derivatives(mu, count, c, j):
    """Values ``pi_k^(j)(c)`` for the mu-orthonormal ``pi_k``, k < count.

    Uses the differentiated three-term recurrence, never monomial
    coefficients.
    """
    a, b = mu.recurrence(count)
    vals = np.zeros((j + 1, count))
    vals[0, 0] = 1.0 / math.sqrt(mu.mass)
    for n in range(count - 1):
        for d in range(j + 1):
            v = (c - b[n]) * vals[d, n]
            if d:
                v += d * vals[d - 1, n]
            if n:
                v -= a[n - 1] * vals[d, n - 1]
            vals[d, n + 1] = v / a[n]
    return vals[j]


def _functional_vectors(spec, count):
    """One vector per rank-one term of the Gram matrix in the mu-basis."""
    vecs = []
    for t in spec.derivative_terms:
        for j, lam in sorted(t.orders.items()):
            if lam:
                vecs.append(math.sqrt(lam) * mu_orthonormal_derivatives(spec.mu, count, t.c, j))
    if spec.point_a:
        v = np.zeros(count)
        for ak, ck in zip(spec.point_a, spec.point_c):
            v += ak * mu_orthonormal_derivatives(spec.mu, count, ck, 0)
        vecs.append(v)
    return vecs


def mu_basis_gram(spec, count):
    """Gram matrix of the first ``count`` mu-orthonormal polynomials."""
    G = np.eye(count)
    for v in _functional_vectors(spec, count):
        G += np.outer(v, v)
    return G


def _cholesky_inverse(G):
    try:
        C = np.linalg.cholesky(G)
    except np.linalg.LinAlgError as exc:
        raise GramNotPD("Gram matrix is not positive definite") from exc
    piv = np.diag(C) ** 2
    if np.min(piv) < PIVOT_TOL * piv[0]:
        k = int(np.argmin(piv))
        raise GramNotPD(f"Cholesky pivot {k} fell to {piv[k]:.3g} (leading {piv[0]:.3g})")
    return solve_triangular(C, np.eye(len(G)), lower=True)


def gram_matrix(spec, basis_polys):
    """Dense Gram matrix of ``spec`` on the given polynomials."""
    n = len(basis_polys)
    G = np.zeros((n, n))
    for i in range(n):
        for j in range(i, n):
            G[i, j] = G[j, i] = np.real(inner(spec, basis_polys[i], basis_polys[j]))
    return G


@dataclass(frozen=True, eq=False)
class SobolevFamily:
    """Orthonormal family stored as ``p_n = sum_k T[n, k] pi_k``.

    ``pi_k`` are the mu-orthonormal polynomials.  Inner products and
    multiplication by h are carried out on these coefficient rows, which
    stays accurate at degrees where monomial coefficients do not.
    """

    spec: SobolevSpec
    T: np.ndarray

    def __len__(self):
        return len(self.T)

    def polynomials(self):
        pis = mu_orthonormal(self.spec.mu, len(self))
        out = []
        for row in self.T:
            p = Polynomial()
            for k, coef in enumerate(row):
                if coef:
                    p = p + coef * pis[k]
            out.append(p)
        return out

    def gram(self):
        G = mu_basis_gram(self.spec, len(self))
        return self.T @ G @ self.T.T

    def multiplication_table(self, h):
        """``<h p_n, p_m>`` computed in the mu-basis (exact sections of h(J))."""
        count = len(self)
        size = count + h.degree
        a, b = self.spec.mu.recurrence(size)
        J = np.diag(b) + np.diag(a, 1) + np.diag(a, -1)
        H = np.zeros((size, size), dtype=complex)
        for coef in h.coeffs[::-1]:
            H = H @ J + coef * np.eye(size)
        Tpad = np.zeros((count, size))
        Tpad[:, :count] = self.T
        G = mu_basis_gram(self.spec, size)
        return Tpad @ H @ G @ Tpad.T


def orthonormal_family(spec, count, max_degree=MAX_DEGREE):
    """:class:`SobolevFamily` of the first ``count`` orthonormal polynomials."""
    if count - 1 > max_degree:
        raise GramNotPD(f"degree {count - 1} exceeds the cap of {max_degree}")
    T = _cholesky_inverse(mu_basis_gram(spec, count))
    return SobolevFamily(spec, T)


def orthonormalize(spec, count, basis="orthonormal", max_degree=MAX_DEGREE):
    """First ``count`` orthonormal polynomials with positive leading coefficients.

    With ``basis="orthonormal"`` the Gram matrix is taken in the basis of
    mu-orthonormal polynomials, where it is the identity plus one rank-one
    term per evaluation functional.  ``basis="monomial"`` uses the plain
    monomial Gram matrix and is only sensible at low degree.
    """
    if count < 1:
        return []
    if count - 1 > max_degree:
        raise GramNotPD(f"degree {count - 1} exceeds the cap of {max_degree}")
    if basis == "orthonormal" and spec.mu.discrete and len(spec.mu.points) < count:
        basis = "monomial"
    if basis == "orthonormal":
        return orthonormal_family(spec, count, max_degree).polynomials()
    if basis != "monomial":
        raise ValueError(f"unknown basis {basis!r}")
    polys = [Polynomial.monomial(k) for k in range(count)]
    T = _cholesky_inverse(gram_matrix(spec, polys))
    out = []
    for n in range(count):
        out.append(Polynomial(T[n, : n + 1]))
    return out


def multiplication_table(spec, p, h):
    """``T[n, m] = <h p_n, p_m>`` for a list of polynomials or a family."""
    if isinstance(p, SobolevFamily):
        return p.multiplication_table(h)
    hp = [h * q for q in p]
    n = len(p)
    T = np.zeros((n, n), dtype=complex)
    for i in range(n):
        for j in range(n):
            T[i, j] = inner(spec, hp[i], p[j])
    return T


def extract_recurrence(spec, p, h, band_tol=BAND_TOL):
    """Recover the (2N+1)-term coefficients of an orthonormal family.

    ``c[n,0] = <h p_n, p_n>`` and ``c[n,k] = <h p_n, p_{n-k}>``.  ``p`` is a
    list of polynomials or a :class:`SobolevFamily`; the latter is evaluated
    in the mu-basis.  Raises :class:`BandViolation` when an entry outside the
    band exceeds ``band_tol``.
    """
    N = h.degree
    T = multiplication_table(spec, p, h)
    n_tot = len(T)
    for i in range(n_tot):
        for j in range(n_tot):
            if abs(i - j) > N and abs(T[i, j]) > band_tol:
                raise BandViolation(
                    f"<h p_{i}, p_{j}> = {abs(T[i, j]):.3g} outside the band of width {N}")
    c0 = np.real(np.diag(T))
    c = np.zeros((n_tot, N), dtype=complex)
    for k in range(1, N + 1):
        for n in range(k, n_tot):
            c[n, k - 1] = T[n, n - k]
    polys = p.polynomials() if isinstance(p, SobolevFamily) else p
    return RecurrenceSystem(N, h, c0, c, tuple(polys[:N]))


def h_basis(spec):
    return HBasis(minimal_h(spec))
