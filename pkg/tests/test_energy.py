import math

import numpy as np
import pytest

from halflap.domain import Domain, build_basis, build_quadrature, sufficient_points
from halflap.energy import EnergyModel, Weight, default_model, grad_j, grad_norm_dual, j_lambda, phi, psi
from halflap.errors import DomainMismatchError
from halflap.fields import Field, project, random_field
from halflap.nonlinearity import builtin


@pytest.fixture(scope="module")
def line_model():
    return default_model(Domain.interval(math.pi), 16, builtin("log-square"), 0.7)


def test_phi_examples(line_model):
    b = line_model.basis
    assert phi(line_model, Field.zeros(b)) == 0.0
    assert phi(line_model, Field.mode(b, 0, 2.0)) == pytest.approx(2.0, rel=1e-15)
    u = random_field(b, np.random.default_rng(0))
    assert phi(line_model, 3.7 * u) == pytest.approx(3.7**2 * phi(line_model, u), rel=1e-13)


def test_psi_examples(square_model, square_grid):
    b = square_model.basis
    assert psi(square_model, Field.zeros(b)) == 0.0
    c = 0.8
    u = project(np.full(square_grid.size, c), square_grid, b)
    # the projected constant carries Gibbs error; compare to the sampled values
    vals = b.evaluate(square_grid.nodes) @ u.coeffs
    assert psi(square_model, u) == pytest.approx(square_grid.integrate(square_model.nonlinearity.F(vals)), rel=1e-12)
    assert psi(square_model, u) == pytest.approx(square_model.nonlinearity.F(np.array([c]))[0] * math.pi**2, rel=0.1)
    double = EnergyModel(b, square_grid, Weight.constant(2.0), square_model.nonlinearity, 1.0)
    assert psi(double, u) == pytest.approx(2 * psi(square_model, u), rel=1e-14)


def test_energy_identities(line_model):
    b = line_model.basis
    u = random_field(b, np.random.default_rng(1), 3.0)
    assert j_lambda(line_model, Field.zeros(b)) == 0.0
    assert j_lambda(line_model.with_lambda(0.0), u) == phi(line_model, u) >= 0
    assert j_lambda(line_model, u) == pytest.approx(phi(line_model, u) - 0.7 * psi(line_model, u), rel=1e-15)


def test_gradient_examples(line_model):
    b = line_model.basis
    assert np.all(grad_j(line_model, Field.zeros(b)).coeffs == 0)
    g = grad_j(line_model.with_lambda(0.0), Field.mode(b, 0))
    assert np.allclose(g.coeffs, Field.mode(b, 0, 1.0).coeffs)
    assert grad_norm_dual(line_model, Field.zeros(b)) == 0.0
    assert line_model.dual_norm(Field.mode(b, 0).coeffs) == pytest.approx(1.0, rel=1e-15)


def test_dual_norm_bound(square_model):
    g = np.random.default_rng(2).normal(size=square_model.basis.size)
    bound = np.linalg.norm(g) / math.sqrt(square_model.sqrt_eigs.min())
    assert square_model.dual_norm(g) <= bound * (1 + 1e-14)


def test_gradient_finite_differences(square_model):
    rng = np.random.default_rng(3)
    h = 1e-6
    for lam in (0.5, 5.0):
        m = square_model.with_lambda(lam)
        a = random_field(m.basis, rng, 2.0).coeffs
        g = m.gradient(a)
        fd = np.array([(m.energy(a + h * e) - m.energy(a - h * e)) / (2 * h) for e in np.eye(len(a))])
        assert np.linalg.norm(fd - g) / np.linalg.norm(g) < 1e-5


def test_energy_change_matches_difference(square_model):
    m = square_model.with_lambda(3.0)
    rng = np.random.default_rng(4)
    a = random_field(m.basis, rng, 2.0).coeffs
    d = random_field(m.basis, rng).coeffs
    for s in (1e-3, 0.1, 1.0, 30.0):
        direct = m.energy(a + s * d) - m.energy(a)
        assert m.energy_change(a, d, s) == pytest.approx(direct, rel=1e-9, abs=1e-12)


def test_subquadratic_limits(square_model):
    u = random_field(square_model.basis, np.random.default_rng(5)).coeffs
    ratio = lambda s: abs(square_model.psi_value(s * u)) / np.sum((s * u) ** 2 * square_model.sqrt_eigs)
    small = [ratio(s) for s in (1e-2, 1e-3, 1e-4)]
    large = [ratio(s) for s in (1e2, 1e3, 1e4)]
    assert small[0] > small[1] > small[2]
    assert large[0] > large[1] > large[2]


def _unit_directions(m, count, seed):
    rng = np.random.default_rng(seed)
    for _ in range(count):
        u = np.array(random_field(m.basis, rng).coeffs)
        yield u / math.sqrt(np.sum(u * u * m.sqrt_eigs))


def test_coercive_along_rays(square_model, lz_square):
    # the valley around the minimiser reaches ||u|| ~ 800 at this lambda, so
    # s = 1e2 still lands inside it for some directions
    m = square_model.with_lambda(2 * lz_square.value)
    for u in _unit_directions(m, 20, 6):
        assert m.energy(1e2 * u) > m.energy(u) and m.energy(1e3 * u) > m.energy(u)


def test_coercive_beyond_the_valley(square_model, lz_square):
    m = square_model.with_lambda(2 * lz_square.value)
    for u in _unit_directions(m, 20, 6):
        e = [m.energy(s * u) for s in (1.0, 1e4, 1e5)]
        assert e[0] < e[1] < e[2]


def test_energy_decreases_in_lambda_when_psi_positive(square_model):
    rng = np.random.default_rng(7)
    for _ in range(10):
        u = random_field(square_model.basis, rng, 5.0).coeffs
        if square_model.psi_value(u) > 0:
            assert square_model.with_lambda(2.0).energy(u) < square_model.with_lambda(1.0).energy(u)


def test_weight_validation(square_grid):
    with pytest.raises(ValueError):
        Weight.constant(0.0)
    with pytest.warns(UserWarning):
        Weight.from_callable(lambda x: 1.0 + 0 * x[:, 0], square_grid, essinf=0.5)


def test_weight_table(tmp_path, square_grid):
    xs = np.linspace(0, math.pi, 12)
    X, Y = np.meshgrid(xs, xs)
    path = tmp_path / "beta.csv"
    path.write_text("\n".join(f"{x},{y},{1 + 0.1 * x}" for x, y in zip(X.ravel(), Y.ravel())))
    w = Weight.from_table(path, square_grid)
    assert w.essinf >= 1.0 - 1e-12 and w.sup_norm <= 1 + 0.1 * math.pi + 1e-12
    assert np.allclose(w.values_on(square_grid), 1 + 0.1 * square_grid.nodes[:, 0], atol=1e-12)


def test_model_domain_mismatch(square_basis):
    grid = build_quadrature(Domain.rectangle(1.0, 1.0), 8)
    with pytest.raises(DomainMismatchError):
        EnergyModel(square_basis, grid, Weight.constant(1.0), builtin("log-square"), 1.0)
    with pytest.raises(ValueError):
        default_model(Domain.interval(1.0), 4, builtin("log-square"), -1.0)
