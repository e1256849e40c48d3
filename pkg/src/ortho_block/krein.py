"""Finite-section diagnostics for spectra accumulating at the zeros of h.

For a bounded Jacobi matrix J, the accumulation points of its spectrum all
lie among the zeros of h exactly when h(J) is compact.  A finite section can
only show trends: the fraction of eigenvalues of J close to a zero of h, and
the decay of the N x N blocks of h(J) along the diagonal.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import RootFindingFailure
from .jacobi import decay_profile, h_of_tridiagonal
from .polycore import derivative, evaluate

ROOT_TOL = 1e-10
CLUSTER_TOL = 1e-8


@dataclass
class SpectralReport:
    size: int
    eigenvalues: np.ndarray
    roots: np.ndarray
    epsilon: float
    near_fraction: float
    decay: list

    @property
    def decay_head(self):
        return self.decay[0] if self.decay else 0.0

    @property
    def decay_tail(self):
        return self.decay[-1] if self.decay else 0.0


def truncated_spectrum(a, b, size):
    """Sorted eigenvalues of the ``size x size`` Jacobi section."""
    b = np.asarray(b, dtype=float)[:size]
    a = np.asarray(a, dtype=float)[: size - 1]
    if np.any(a <= 0):
        raise ValueError("off-diagonal coefficients must be positive")
    if size == 1:
        return b.copy()
    return np.sort(eigh_tridiagonal(b, a, eigvals_only=True))


def polynomial_roots(h, tol=ROOT_TOL, cluster_tol=CLUSTER_TOL):
    """Roots of h: companion-matrix eigenvalues followed by one Newton step.

    Each root must be isolated to ``tol`` (relative), judged by the size of
    a further Newton correction, and no two roots may lie within
    ``cluster_tol`` of each other; otherwise :class:`RootFindingFailure`.
    """
    c = h.coeffs
    n = h.degree
    if n < 1:
        return np.zeros(0)
    comp = np.zeros((n, n), dtype=complex)
    comp[1:, :-1] = np.eye(n - 1)
    comp[:, -1] = -c[:-1] / c[-1]
    roots = np.linalg.eigvals(comp)
    if np.any(~np.isfinite(roots)):
        raise RootFindingFailure("companion eigenvalues are not finite")
    dh = derivative(h)
    roots = roots - evaluate(h, roots) / np.where(evaluate(dh, roots) == 0, np.inf,
                                                  evaluate(dh, roots))
    d = evaluate(dh, roots)
    step = np.abs(evaluate(h, roots)) / np.where(d == 0, 0.0, np.abs(d))
    step[d == 0] = np.inf
    if np.any(step > tol * (1 + np.abs(roots))):
        raise RootFindingFailure(
            f"roots of h not isolated to {tol:g} (error estimate {step.max():.3g})")
    gaps = np.abs(roots[:, None] - roots[None, :]) + np.diag(np.full(n, np.inf))
    if gaps.min() < cluster_tol:
        raise RootFindingFailure(f"roots of h cluster within {gaps.min():.3g}")
    if np.all(np.abs(roots.imag) <= tol * (1 + np.abs(roots.real))):
        roots = np.sort(roots.real)
    return roots


def near_fraction(eigenvalues, roots, epsilon):
    """Share of eigenvalues within ``epsilon`` of some root."""
    ev = np.asarray(eigenvalues)
    if ev.size == 0:
        return 0.0
    dist = np.min(np.abs(ev[:, None] - np.asarray(roots)[None, :]), axis=1)
    return float(np.mean(dist <= epsilon))


def krein_report(mu, h, size, epsilon, cluster_tol=CLUSTER_TOL):
    """Spectrum of the J section classified against the zeros of h, plus the
    block decay profile of the h(J) section."""
    a, b = mu.recurrence(size)
    ev = truncated_spectrum(a, b, size)
    roots = polynomial_roots(h, cluster_tol=cluster_tol)
    if h.degree + 1 > size:
        decay = []
    else:
        decay = decay_profile(h_of_tridiagonal(a, b, h, size))
    return SpectralReport(size, ev, roots, float(epsilon),
                          near_fraction(ev, roots, epsilon), decay)


def spectral_mapping_gap(mu, h, size):
    """``max |sorted eig(h(J) interior) - sorted h(eig J interior)|``.

    Both sides use the leading ``size - deg h`` principal section, so the
    comparison is between a section of h(J) and h applied to a section of J.
    Reported as a diagnostic only.
    """
    a, b = mu.recurrence(size)
    interior = size - h.degree
    H = h_of_tridiagonal(a, b, h, size).to_dense()[:interior, :interior]
    lhs = np.sort(np.linalg.eigvalsh(H))
    rhs = np.sort(evaluate(h, truncated_spectrum(a, b, interior)).real)
    return float(np.max(np.abs(lhs - rhs)))
