import numpy as np
import pytest

from ortho_block import (HBasis, MatrixMeasure, Measure, Polynomial, SobolevSpec,
                         build_L_pointmass, build_L_sobolev, gauss_nodes, matrix_inner,
                         moment, orthonormal_family, stieltjes)
from ortho_block.errors import DegreeExceedsQuadrature, IndexOutOfRange, RankDeficient
from ortho_block.matpoly import MatrixPolynomial, scalars_to_matrices
from ortho_block.measures import check_psd, orthonormality_residual
from ortho_block.sobolev import inner


def test_chebyshev_moments(chebyshev):
    assert abs(moment(chebyshev, 0) - 1) < 1e-15
    assert abs(moment(chebyshev, 1)) < 1e-15
    assert abs(moment(chebyshev, 2) - 0.5) < 1e-15
    assert abs(moment(chebyshev, 4) - 3 / 8) < 1e-15
    assert abs(moment(chebyshev, 10) - 252 / 1024) < 1e-14


def test_legendre_three_point_rule():
    x, w = gauss_nodes(Measure.legendre(10), 3)
    np.testing.assert_allclose(x, [-np.sqrt(0.6), 0, np.sqrt(0.6)], atol=1e-15)
    np.testing.assert_allclose(w, [5 / 18, 8 / 18, 5 / 18], atol=1e-15)


def test_quadrature_exhausted():
    with pytest.raises(DegreeExceedsQuadrature):
        Measure.chebyshev(5).quadrature(20)


def test_stieltjes_three_points():
    a, b = stieltjes([(-1, 1), (0, 1), (1, 1)], 3)
    np.testing.assert_allclose(b, 0, atol=1e-15)
    np.testing.assert_allclose(a, [np.sqrt(2 / 3), np.sqrt(1 / 3)], atol=1e-15)


def test_stieltjes_accumulating_measure_frozen():
    # reference values from a 50-digit discretized Stieltjes procedure
    support = []
    for k in range(1, 26):
        support += [(1 - 1 / (k + 1), 2.0 ** -k), (-1 + 1 / (k + 1), 2.0 ** -k)]
    a, b = stieltjes(support, 6)
    np.testing.assert_allclose(a, [0.626013030745081764, 0.25449437348235548,
                                   0.656911201986829623, 0.212087432016612299,
                                   0.729490689148649525], rtol=1e-13)
    np.testing.assert_allclose(b, 0, atol=1e-14)


def test_stieltjes_rank_deficient():
    with pytest.raises(RankDeficient):
        stieltjes([(0.0, 1.0), (1.0, 1.0)], 3)


def test_stieltjes_reproduces_gauss_rule():
    x, w = gauss_nodes(Measure.chebyshev(20), 12)
    a, b = stieltjes(list(zip(x, w)), 12)
    np.testing.assert_allclose(a[0], np.sqrt(0.5), atol=1e-13)
    np.testing.assert_allclose(a[1:], 0.5, atol=1e-12)


def test_L_examples():
    np.testing.assert_array_equal(build_L_sobolev(2, [(0, 1, 1.0, 0.0)]), [[0, 0], [0, 1]])
    np.testing.assert_allclose(build_L_sobolev(3, [(0, 1, 2.0, 0.5)]),
                               2 * np.array([[0, 0, 0], [0, 1, 1], [0, 1, 1]]))
    np.testing.assert_allclose(build_L_sobolev(3, [(0, 2, 1.0, 0.0)]),
                               [[0, 0, 0], [0, 0, 0], [0, 0, 4]])
    np.testing.assert_allclose(build_L_pointmass(2, [1, -1], [0, 1]), [[0, 0], [0, 1]])


def test_L_order_out_of_range():
    with pytest.raises(IndexOutOfRange):
        build_L_sobolev(2, [(0, 2, 1.0, 0.0)])


def test_L_is_psd(rng):
    for _ in range(20):
        N = int(rng.integers(2, 5))
        terms = [(i, int(rng.integers(1, N)), rng.uniform(0, 3), rng.uniform(-1, 1))
                 for i in range(3)]
        L = build_L_sobolev(N, terms) + build_L_pointmass(N, rng.normal(size=2),
                                                          rng.uniform(-1, 1, 2))
        check_psd(L)
        assert np.linalg.eigvalsh(L).min() >= -1e-12 * max(np.trace(L), 1)


def test_non_psd_L_rejected(chebyshev):
    with pytest.raises(ValueError):
        MatrixMeasure(chebyshev, 2, np.diag([1.0, -0.5]))


def test_matrix_inner_is_hermitian(rng, chebyshev):
    basis = HBasis(Polynomial([0.1, 0.0, 1.0]))
    mm = MatrixMeasure(chebyshev, 2, build_L_sobolev(2, [(0, 1, 0.7, 0.0)]))
    P = MatrixPolynomial(rng.normal(size=(3, 2, 2)) + 1j * rng.normal(size=(3, 2, 2)), 2)
    Q = MatrixPolynomial(rng.normal(size=(2, 2, 2)), 2)
    np.testing.assert_allclose(matrix_inner(P, Q, mm, basis),
                               matrix_inner(Q, P, mm, basis).conj().T, atol=1e-13)


def test_matrix_inner_equals_scalar_gram():
    # on a discrete measure the matrix entries are the scalar Sobolev products
    mu = Measure.from_support([(-0.9, 0.2), (-0.3, 0.5), (0.1, 0.4), (0.6, 0.3),
                               (0.8, 0.1), (0.95, 0.25)])
    spec = SobolevSpec.marcellan_ronveaux(mu, 0.0, 1, 1.3)
    h = Polynomial([0, 0, 1])
    basis = HBasis(h)
    rng = np.random.default_rng(3)
    p = [Polynomial(rng.normal(size=k + 1)) for k in range(6)]
    P = scalars_to_matrices(p, basis)
    mm = MatrixMeasure(mu, 2, spec.L())
    for n in range(3):
        for m in range(3):
            G = matrix_inner(P[n], P[m], mm, basis)
            for i in range(2):
                for j in range(2):
                    assert abs(G[i, j] - inner(spec, p[2 * n + i], p[2 * m + j])) < 1e-12


def test_zero_measure_with_identity_L(rng):
    mu = Measure.from_support([])
    basis = HBasis.monomial(2)
    P = MatrixPolynomial(rng.normal(size=(3, 2, 2)), 2)
    G = matrix_inner(P, P, MatrixMeasure(mu, 2, np.eye(2)), basis)
    np.testing.assert_allclose(G, P.coeff(0) @ P.coeff(0).T, atol=1e-14)


def test_measure_json_round_trip(chebyshev):
    d = Measure.from_support([(0.5, 1.0), (-0.25, 2.0)])
    assert Measure.from_json(d.to_json()).to_json() == d.to_json()
    back = Measure.from_json(chebyshev.to_json())
    np.testing.assert_array_equal(back.a, chebyshev.a)


def test_family_orthonormal_against_matrix_measure(chebyshev):
    spec = SobolevSpec.marcellan_ronveaux(chebyshev, 0.0, 1, 1.0)
    basis = HBasis(Polynomial([0, 0, 1]))
    P = scalars_to_matrices(orthonormal_family(spec, 12).polynomials(), basis)
    assert orthonormality_residual(P, MatrixMeasure(chebyshev, 2, spec.L()), basis) < 1e-12


def test_point_mass_at_zero_moments():
    d0 = Measure.from_support([(0.0, 1.0)])
    assert moment(d0, 0) == 1 and moment(d0, 1) == 0 and moment(d0, 3) == 0


def test_one_and_two_node_rules(chebyshev):
    x, w = gauss_nodes(Measure.from_recurrence([0.4], [0.3, -0.1], mass=2.0), 1)
    assert x[0] == 0.3 and w[0] == 2.0
    x, _ = gauss_nodes(chebyshev, 2)
    np.testing.assert_allclose(x, [-np.sqrt(0.5), np.sqrt(0.5)], atol=1e-15)


def test_discrete_rule_recovers_support():
    support = [(-0.8, 0.1), (0.2, 0.5), (0.5, 0.2), (0.9, 0.7)]
    mu = Measure.from_support(support)
    a, b = mu.recurrence(4)
    x, w = gauss_nodes(Measure.from_recurrence(a, b, mass=mu.mass), 4)
    np.testing.assert_allclose(x, [s for s, _ in support], atol=1e-14)
    np.testing.assert_allclose(w, [v for _, v in support], atol=1e-14)


def test_stieltjes_small_cases():
    a, b = stieltjes([(0.7, 2.0)], 1)
    assert b[0] == 0.7
    a, b = stieltjes([(-1.0, 0.5), (1.0, 0.5)], 2)
    assert abs(b[0]) < 1e-16 and abs(a[0] - 1) < 1e-15


def test_chebyshev_extrema_approach_chebyshev():
    x = np.cos(np.pi * np.arange(64) / 63)
    a, b = stieltjes([(v, 1.0) for v in x], 20)
    np.testing.assert_allclose(a[2:10], 0.5, atol=0.02)
    np.testing.assert_allclose(b, 0, atol=1e-12)


def test_more_L_examples():
    assert build_L_sobolev(3, [(0, 1, 1.0, 1.0)])[1, 2] == 2
    np.testing.assert_array_equal(build_L_sobolev(3, [(0, 1, 0.0, 0.3)]), np.zeros((3, 3)))
    np.testing.assert_array_equal(build_L_pointmass(3, [0, 0], [0.1, 0.5]), np.zeros((3, 3)))
    np.testing.assert_allclose(build_L_pointmass(1, [0.6], [0.2]), [[0.36]])
    delta = 0.3
    np.testing.assert_allclose(build_L_pointmass(2, [1, -1], [0, delta]), [[0, 0], [0, delta ** 2]])
    np.testing.assert_allclose(build_L_sobolev(2, [(0, 1, 2.5, -0.4)]), [[0, 0], [0, 2.5]])


def test_N1_matrix_inner_is_scalar_integral(chebyshev, rng):
    basis = HBasis.monomial(1)
    p = Polynomial(rng.normal(size=4))
    q = Polynomial(rng.normal(size=3))
    G = matrix_inner(MatrixPolynomial(p.coeffs.reshape(-1, 1, 1), 1),
                     MatrixPolynomial(q.coeffs.reshape(-1, 1, 1), 1),
                     MatrixMeasure(chebyshev, 1, np.zeros((1, 1))), basis)
    x, w = gauss_nodes(chebyshev, 10)
    assert abs(G[0, 0] - np.sum(w * p(x) * q(x))) < 1e-14
