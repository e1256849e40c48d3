"""Dense scalar polynomials with complex coefficients.

Coefficients are stored lowest degree first.  Instances are immutable; every
operation returns a new :class:`Polynomial`.
"""

from __future__ import annotations

import math
from numbers import Number

import numpy as np

from .errors import DegreeTooLarge, ZeroDivisor

ZERO_TOL = 1e-12
MAX_DEGREE = 512


class Polynomial:
    """Polynomial ``sum_i coeffs[i] x**i`` over the complex numbers.

    Parameters
    ----------
    coeffs : array_like
        Coefficients, index ``i`` multiplies ``x**i``.
    tol : float, optional
        Relative zero tolerance used when normalising the degree: trailing
        coefficients with modulus below ``tol * max|coeff|`` are dropped.
    """

    __slots__ = ("_c",)

    def __init__(self, coeffs=(), tol=ZERO_TOL):
        c = np.atleast_1d(np.asarray(coeffs, dtype=complex)).ravel().copy()
        if c.size:
            scale = np.max(np.abs(c))
            if not np.isfinite(scale):
                raise ValueError("polynomial coefficients must be finite")
            nz = np.nonzero(np.abs(c) > tol * scale)[0] if scale > 0 else []
            c = c[: nz[-1] + 1] if len(nz) else c[:0]
        if c.size - 1 > MAX_DEGREE:
            raise DegreeTooLarge(
                f"degree {c.size - 1} exceeds the cap of {MAX_DEGREE}")
        c.setflags(write=False)
        self._c = c

    # construction helpers
    @classmethod
    def zero(cls):
        return cls()

    @classmethod
    def const(cls, value):
        return cls([value])

    @classmethod
    def monomial(cls, n, coeff=1.0):
        c = np.zeros(n + 1, dtype=complex)
        c[n] = coeff
        return cls(c)

    @classmethod
    def x(cls):
        return cls([0.0, 1.0])

    @classmethod
    def from_roots(cls, roots):
        p = cls([1.0])
        for r in roots:
            p = p * cls([-r, 1.0])
        return p

    # basic properties
    @property
    def coeffs(self):
        return self._c

    @property
    def degree(self):
        return self._c.size - 1

    @property
    def leading(self):
        return self._c[-1] if self._c.size else 0j

    def is_zero(self):
        return self._c.size == 0

    def coeff(self, i):
        return self._c[i] if 0 <= i < self._c.size else 0j

    def padded(self, length):
        """Coefficient vector zero-padded (never truncated) to ``length``."""
        out = np.zeros(max(length, self._c.size), dtype=complex)
        out[: self._c.size] = self._c
        return out

    # arithmetic
    def __add__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        n = max(self._c.size, other._c.size)
        return Polynomial(self.padded(n) + other.padded(n))

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(-self._c)

    def __sub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Number):
            return Polynomial(self._c * other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        if self.is_zero() or other.is_zero():
            return Polynomial()
        return Polynomial(np.convolve(self._c, other._c))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Number):
            return Polynomial(self._c / other)
        return NotImplemented

    def __divmod__(self, other):
        return poly_divmod(self, other)

    def __call__(self, x):
        return evaluate(self, x)

    def __eq__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return self._c.shape == other._c.shape and bool(np.all(self._c == other._c))

    def __hash__(self):
        return hash(self._c.tobytes())

    def __repr__(self):
        return f"Polynomial({np.array2string(self._c, precision=6)})"

    def conj(self):
        return Polynomial(np.conj(self._c))

    def compose(self, inner):
        """Return ``self(inner(x))`` by Horner's scheme."""
        out = Polynomial()
        for a in self._c[::-1]:
            out = out * inner + a
        return out

    def derivative(self, j=1):
        return derivative(self, j)

    def allclose(self, other, rtol=1e-12, atol=0.0):
        other = _coerce(other)
        n = max(self._c.size, other._c.size, 1)
        a, b = self.padded(n), other.padded(n)
        scale = max(np.max(np.abs(a)), np.max(np.abs(b)), 1e-300)
        return bool(np.max(np.abs(a - b)) <= atol + rtol * scale)

    # serialisation
    def to_json(self):
        return [[float(z.real), float(z.imag)] for z in self._c]

    @classmethod
    def from_json(cls, data):
        vals = []
        for item in data:
            if isinstance(item, (list, tuple)):
                if len(item) != 2:
                    raise ValueError("complex coefficient must be a [re, im] pair")
                vals.append(complex(float(item[0]), float(item[1])))
            else:
                vals.append(complex(float(item)))
        return cls(vals)


def _coerce(obj):
    if isinstance(obj, Polynomial):
        return obj
    if isinstance(obj, Number):
        return Polynomial([obj])
    return NotImplemented


def add(p, q):
    return p + q


def mul(p, q):
    return p * q


def evaluate(p, x):
    """Evaluate ``p`` at ``x`` (scalar or array) with Horner's rule."""
    x = np.asarray(x)
    out = np.zeros(x.shape, dtype=complex)
    for a in p.coeffs[::-1]:
        out = out * x + a
    return out[()] if out.ndim == 0 else out


def _divmod_arrays(pc, hc):
    """Long division on coefficient arrays; returns ``(q, r)`` arrays."""
    d = len(hc) - 1
    work = np.array(pc, dtype=complex)
    if len(work) <= d:
        return np.zeros(0, dtype=complex), work
    lead = hc[-1]
    q = np.zeros(len(work) - d, dtype=complex)
    for k in range(len(work) - d - 1, -1, -1):
        t = work[k + d] / lead
        q[k] = t
        if t != 0:
            work[k: k + d + 1] -= t * hc
    return q, work[:d]


def poly_divmod(p, h):
    """Long division ``p = q*h + r`` with ``deg r < deg h``.

    The remainder is cut to the first ``deg h`` coefficients explicitly, so
    cancellation noise in the eliminated positions never survives.  The
    quotient has degree ``deg p - deg h`` by construction and is not
    subjected to the relative zero tolerance.
    """
    if h.is_zero():
        raise ZeroDivisor("division by the zero polynomial")
    if p.degree < h.degree:
        return Polynomial(), p
    q, r = _divmod_arrays(p.coeffs, h.coeffs)
    return Polynomial(q, tol=0.0), Polynomial(r)


def derivative(p, j=1):
    """j-th derivative of ``p``."""
    if j < 0:
        raise ValueError("derivative order must be nonnegative")
    if j == 0:
        return p
    n = p.degree
    if j > n:
        return Polynomial()
    k = np.arange(j, n + 1)
    fall = np.array([math.perm(int(i), j) for i in k], dtype=float)
    return Polynomial(p.coeffs[j:] * fall)
