import math

import numpy as np
import pytest

from halflap.domain import (Domain, build_basis, build_quadrature, gauss_legendre, sufficient_points,
                            unit_ball_volume)
from halflap.errors import UnsupportedDomainError
from halflap.fields import gram_matrices


def test_unit_ball_volume():
    assert unit_ball_volume(1) == pytest.approx(2.0, rel=1e-15)
    assert unit_ball_volume(2) == pytest.approx(math.pi, rel=1e-15)
    assert unit_ball_volume(3) == pytest.approx(4 * math.pi / 3, rel=1e-15)
    with pytest.raises(ValueError):
        unit_ball_volume(0)


def test_measures():
    assert Domain.interval(2.5).measure == 2.5
    assert Domain.rectangle(2.0, 3.0).measure == 6.0
    assert Domain.ball(3, 2.0).measure == pytest.approx(4 * math.pi / 3 * 8, rel=1e-15)


@pytest.mark.parametrize("bad", [lambda: Domain.interval(0.0), lambda: Domain.rectangle(1.0, -1.0),
                                 lambda: Domain.ball(2, 0.0), lambda: Domain("annulus", (1.0,))])
def test_invalid_domains(bad):
    with pytest.raises(ValueError):
        bad()


def test_interval_flag_outside_theory():
    assert not Domain.interval(1.0).within_existence_theory
    assert Domain.rectangle(1.0, 1.0).within_existence_theory


def test_eigenvalues_interval_and_square():
    assert np.allclose(build_basis(Domain.interval(math.pi), 3).eigenvalues, [1, 4, 9], rtol=1e-14)
    assert np.allclose(build_basis(Domain.rectangle(math.pi, math.pi), 4).eigenvalues, [2, 5, 5, 8], rtol=1e-14)
    assert build_basis(Domain.interval(1.0), 1).eigenvalues[0] == pytest.approx(math.pi**2, rel=1e-15)


def test_ties_broken_lexicographically():
    b = build_basis(Domain.rectangle(math.pi, math.pi), 6)
    assert [tuple(i) for i in b.indices] == [(1, 1), (1, 2), (2, 1), (2, 2), (1, 3), (3, 1)]


def test_basis_matches_brute_force_on_unequal_rectangle():
    d = Domain.rectangle(1.0, 2.7)
    b = build_basis(d, 80)
    lam = sorted((math.pi * m) ** 2 + (math.pi * p / 2.7) ** 2 for m in range(1, 60) for p in range(1, 60))[:80]
    assert np.allclose(b.eigenvalues, lam, rtol=1e-13)
    assert np.all(np.diff(b.eigenvalues) >= 0)


def test_basis_errors():
    with pytest.raises(UnsupportedDomainError):
        build_basis(Domain.ball(2, 1.0), 3)
    with pytest.raises(ValueError):
        build_basis(Domain.interval(1.0), 0)


def test_quadrature_weights_and_exactness():
    g = build_quadrature(Domain.interval(1.0), 2)
    assert g.weights.sum() == pytest.approx(1.0, rel=1e-14)
    # M-point rule is exact through degree 2M - 1
    x, w = gauss_legendre(-1.0, 2.0, 5)
    assert np.dot(w, x**9) == pytest.approx((2.0**10 - 1.0) / 10, rel=1e-13)
    sq = build_quadrature(Domain.rectangle(math.pi, math.pi), 16)
    assert sq.weights.sum() == pytest.approx(math.pi**2, rel=1e-12)
    assert np.all(sq.weights > 0)


def test_sin_squared_with_eight_points():
    # the 8-point truncation error is 1.37e-10, just above the 1e-10 target
    x, w = gauss_legendre(0.0, math.pi, 8)
    assert abs(np.dot(w, np.sin(x) ** 2) - math.pi / 2) < 1e-10


def test_sin_squared_converges_spectrally():
    errs = []
    for M in (8, 9, 10):
        x, w = gauss_legendre(0.0, math.pi, M)
        errs.append(abs(np.dot(w, np.sin(x) ** 2) - math.pi / 2))
    assert errs[1] < 1e-2 * errs[0] and errs[2] < 1e-12


def test_first_mode_normalised_on_square():
    d = Domain.rectangle(math.pi, math.pi)
    b = build_basis(d, 1)
    g = build_quadrature(d, 16)
    assert abs(g.integrate(b.evaluate(g.nodes)[:, 0] ** 2) - 1.0) < 1e-10


def test_quadrature_errors():
    with pytest.raises(UnsupportedDomainError):
        build_quadrature(Domain.ball(2, 1.0), 8)
    with pytest.raises(ValueError):
        build_quadrature(Domain.interval(1.0), 1)


@pytest.mark.parametrize("domain", [Domain.interval(math.pi), Domain.rectangle(1.0, 2.0)])
def test_gram_and_stiffness_identities(domain):
    b = build_basis(domain, 40)
    G, K = gram_matrices(b, build_quadrature(domain, sufficient_points(b)))
    assert np.max(np.abs(G - np.eye(b.size))) < 1e-8
    assert np.max(np.abs(K - np.diag(b.eigenvalues))) < 1e-8 * b.eigenvalues[-1]


def test_analytic_gradient_matches_finite_differences():
    d = Domain.rectangle(1.3, 0.7)
    b = build_basis(d, 10)
    x = np.array([[0.31, 0.22], [1.0, 0.5]])
    h = 1e-6
    for k in range(2):
        e = np.zeros(2)
        e[k] = h
        fd = (b.evaluate(x + e) - b.evaluate(x - e)) / (2 * h)
        assert np.allclose(fd, b.gradient(x)[:, :, k], atol=1e-6)


def test_contains_ball():
    d = Domain.rectangle(2.0, 1.0)
    assert d.contains_ball(d.center, d.inradius)
    assert not d.contains_ball(d.center, d.inradius * 1.01)
    assert Domain.ball(3, 1.0).contains_ball(np.zeros(3), 1.0)
