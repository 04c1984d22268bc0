import math

import numpy as np
import pytest

from halflap.domain import build_basis, build_quadrature
from halflap.energy import EnergyModel, Weight
from halflap.errors import DegenerateGeometryError, NoWitnessError, SolverStageError
from halflap.fields import Field, random_field
from halflap.nonlinearity import Nonlinearity, builtin
from halflap.solvers import (MINIMIZER, MOUNTAIN_PASS, TRIVIAL, CriticalPoint, SolverConfig, h_distance, minimize,
                             mountain_pass, solve_both, warm_start)
from halflap.thresholds import cone_field, polar_rule


@pytest.fixture(scope="module")
def above(square_model, lz_square):
    return square_model.with_lambda(2 * lz_square.value)


@pytest.fixture(scope="module")
def report(above, lz_square):
    return solve_both(above, SolverConfig(), lz_square)


def test_config_validation():
    with pytest.raises(ValueError):
        SolverConfig(grad_tol=0.0)
    with pytest.raises(ValueError):
        SolverConfig(path_points=2)
    with pytest.raises(ValueError):
        SolverConfig(backtrack=1.0)
    cfg = SolverConfig()
    assert (cfg.path_points, cfg.redistribute_every, cfg.armijo, cfg.backtrack) == (41, 10, 1e-4, 0.5)
    assert cfg.separation == pytest.approx(1e-5) and cfg.trivial == pytest.approx(1e-7)


def test_minimize_pure_quadratic(square_model):
    m = square_model.with_lambda(0.0)
    start = random_field(m.basis, np.random.default_rng(0), 10.0)
    cp = minimize(m, start)
    assert cp.kind == TRIVIAL and cp.converged and cp.norm < 1e-7


def test_trivial_branch_linear_rate(square_basis, square_grid):
    m = EnergyModel(square_basis, square_grid, Weight.constant(1.0), builtin("zero"), 3.0)
    start = random_field(square_basis, np.random.default_rng(1), 5.0)
    cp = minimize(m, start, SolverConfig(initial_step=0.5, max_iters=1))
    rate = cp.norm / math.sqrt(np.sum(start.coeffs**2 * square_basis.sqrt_eigenvalues))
    assert rate == pytest.approx(0.5, rel=1e-12) and rate < 1
    assert minimize(m, start).kind == TRIVIAL


def test_minimize_below_bound_all_trivial(square_model):
    m = square_model.with_lambda(0.9 * math.sqrt(2.0) / square_model.nonlinearity.c_f_cache)
    rng = np.random.default_rng(2)
    for _ in range(50):
        cp = minimize(m, random_field(m.basis, rng, 5.0))
        assert cp.kind == TRIVIAL and cp.norm < 1e-6


def test_descent_is_monotone(above, lz_square):
    cp = minimize(above, warm_start(above, lz_square))
    h = np.array(cp.history)
    assert np.all(np.diff(h) <= 1e-12 * np.abs(h[:-1]))


def test_warm_start(above, lz_square):
    u = warm_start(above, lz_square)
    assert above.psi_value(u.coeffs) > 0
    zero = EnergyModel(above.basis, above.grid, above.weight, builtin("zero"), 1.0)
    with pytest.raises(NoWitnessError):
        warm_start(zero)


def _cone_tail(square, params, J):
    basis = build_basis(square, J)
    pts, w = polar_rule(params, 256)
    cone = cone_field(params, pts)
    exact = basis.evaluate(pts).T @ (w * cone)
    norm2 = float(np.dot(w, cone**2))
    return math.sqrt(max(norm2 - float(np.sum(exact**2)), 0.0) / norm2), basis, exact


def test_cone_projection_error(square, lz_square):
    tail, _, _ = _cone_tail(square, lz_square.params, 100)
    assert tail < 0.05


def test_cone_projection_error_decays(square, lz_square):
    tails = [_cone_tail(square, lz_square.params, J)[0] for J in (100, 200, 400)]
    assert tails[0] > tails[1] > tails[2] and tails[1] < 0.05


def test_warm_start_matches_kink_aligned_projection(square, lz_square):
    _, basis, exact = _cone_tail(square, lz_square.params, 200)
    grid = build_quadrature(square, 80)
    m = EnergyModel(basis, grid, Weight.constant(1.0), builtin("log-square"), 1.0)
    seed = warm_start(m, lz_square)
    assert np.linalg.norm(seed.coeffs - exact) / np.linalg.norm(exact) < 0.05


def test_minimizer_above_lambda_zero(report):
    u1 = report.points[0]
    assert u1.kind == MINIMIZER and u1.energy < 0 and u1.residual < 1e-8


def test_mountain_pass_point(report, above):
    u1, u2 = report.points
    assert u2.kind == MOUNTAIN_PASS and u2.energy > 0 and u2.residual < 1e-8
    assert h_distance(u1.u, u2.u) > 1e3 * 1e-8
    # strictly above both endpoint energies J(0) = 0 and J(u1) < 0
    assert u2.energy > max(0.0, u1.energy)


def test_weak_form_componentwise(report, above):
    for p in report.points:
        g = above.gradient(p.u.coeffs)
        assert np.all(np.abs(g) <= 1e-8 * above.basis.eigenvalues**0.25)


def test_mountain_pass_above_sphere_samples(report, above):
    u1, u2 = report.points
    r = 0.5 * min(u1.norm, u2.norm)
    rng = np.random.default_rng(3)
    best = math.inf
    for _ in range(500):
        d = np.array(random_field(above.basis, rng).coeffs)
        d *= r / math.sqrt(np.sum(d * d * above.sqrt_eigs))
        best = min(best, above.energy(d), above.energy(-d))
    assert u2.energy > 0 and u2.energy >= best - 1e-6


def test_mountain_pass_degenerate(square_model):
    m = square_model.with_lambda(0.0)
    fake = CriticalPoint(Field.zeros(m.basis), 0.0, 0.0, TRIVIAL, 0)
    with pytest.raises(DegenerateGeometryError):
        mountain_pass(m, fake)


def test_solve_both_below_bound(square_model):
    m = square_model.with_lambda(0.5)
    rep = solve_both(m)
    assert rep.outcome == "trivial-only" and [p.kind for p in rep.points] == [TRIVIAL]
    assert rep.certificate["certified"] and rep.certificate["margin"] > 0


def test_solve_both_two_points(report):
    assert report.outcome == "two-solutions"
    assert report.points[0].energy < 0 < report.points[1].energy
    assert report.distances["minimizer-mountain_pass"] > 1e-5


def test_solve_both_idempotent(above, lz_square, report):
    again = solve_both(above, SolverConfig(), lz_square)
    for a, b in zip(report.points, again.points):
        assert abs(a.energy - b.energy) <= 1e-12 * max(1.0, abs(a.energy))


def test_stage_labels(square_basis, square_grid):
    # F <= 0 everywhere: no positive-energy witness, yet c_f = 1 is finite so
    # the non-existence shortcut does not fire at large lambda
    g = Nonlinearity("negative", lambda t: -t / (1 + t * t), lambda t: -0.5 * np.log1p(t * t))
    m = EnergyModel(square_basis, square_grid, Weight.constant(1.0), g, 100.0)
    with pytest.raises(SolverStageError) as exc:
        solve_both(m)
    assert exc.value.stage == "warm_start" and isinstance(exc.value.cause, NoWitnessError)
