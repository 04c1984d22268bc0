"""Acceptance criteria, one test per criterion.

Each test prints its measured value and asserts both the tolerance and the
runtime budget.  Tolerances are the fixed acceptance values; none is
adjusted to the implementation.
"""

import json
import math
import time

import numpy as np
import pytest

from conftest import MIN_Z
from halflap.cli import main
from halflap.domain import Domain, build_basis, build_quadrature
from halflap.energy import EnergyModel, Weight
from halflap.fields import (cylinder_kernel, extend, h_half_norm, lift_norm, random_field, trace, x_norm,
                            x_norm_quadrature)
from halflap.nonlinearity import builtin, estimate_cf
from halflap.solvers import MINIMIZER, MOUNTAIN_PASS, SolverConfig, minimize, solve_both
from halflap.thresholds import (ConeParams, certify, check_nonexistence, cone_gradient_integral,
                                cone_gradient_quadrature, lambda_zero, min_z, zeta)

pytestmark = pytest.mark.acceptance


class Budget:
    def __init__(self, seconds):
        self.seconds = seconds

    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.start
        print(f"runtime {self.elapsed:.2f} s (budget {self.seconds} s)")
        return False

    def check(self):
        assert self.elapsed < self.seconds


def test_c01_extension_isometry(square):
    with Budget(10) as b:
        basis = build_basis(square, 64)
        grid = build_quadrature(square, 128)
        kernel = cylinder_kernel(basis, grid)
        rng = np.random.default_rng(101)
        closed = quad = 0.0
        for _ in range(1000):
            u = random_field(basis, rng)
            w, h = extend(u), h_half_norm(u)
            closed = max(closed, abs(x_norm(w) - h) / h)
            quad = max(quad, abs(x_norm_quadrature(w, grid, kernel) - h) / h)
    print(f"closed-form rel err {closed:.3e} (tol 1e-10), quadrature rel err {quad:.3e} (tol 1e-8)")
    assert closed <= 1e-10 and quad <= 1e-8
    b.check()


def test_c02_trace_inequality(square):
    with Budget(5) as b:
        basis = build_basis(square, 64)
        rng = np.random.default_rng(102)
        worst = -math.inf
        for _ in range(1000):
            u = random_field(basis, rng)
            # harmonic extension (equality case) and a non-harmonic separable lift
            w = extend(u)
            worst = max(worst, h_half_norm(trace(w)) - x_norm(w))
            worst = max(worst, h_half_norm(u) - lift_norm(u, rng.uniform(0.05, 20.0)))
    print(f"max ||Tr w|| - ||w||_X = {worst:.3e} (tol 1e-12)")
    assert worst <= 1e-12
    b.check()


def test_c03_gradient_finite_differences(log_square):
    with Budget(30) as b:
        rng = np.random.default_rng(103)
        worst = 0.0
        domains = [Domain.rectangle(math.pi, math.pi), Domain.rectangle(2.0, 1.0), Domain.interval(math.pi)]
        for k in range(20):
            dom = domains[k % 3]
            basis = build_basis(dom, 16)
            grid = build_quadrature(dom, 40)
            model = EnergyModel(basis, grid, Weight.constant(rng.uniform(0.5, 2.0)), log_square,
                                rng.uniform(0.1, 50.0))
            a = random_field(basis, rng, rng.uniform(0.5, 5.0)).coeffs
            g = model.gradient(a)
            h = 1e-6
            fd = np.array([(model.energy(a + h * e) - model.energy(a - h * e)) / (2 * h)
                           for e in np.eye(basis.size)])
            worst = max(worst, np.linalg.norm(fd - g) / np.linalg.norm(g))
    print(f"max relative gradient error {worst:.3e} (tol 1e-5)")
    assert worst < 1e-5
    b.check()


def test_c04_nonexistence(square_basis, square_grid):
    with Budget(120) as b:
        g = builtin("log-square")
        g = g.with_cf(estimate_cf(g).value)
        lam = 0.9 * math.sqrt(2.0) / g.c_f_cache
        model = EnergyModel(square_basis, square_grid, Weight.constant(1.0), g, lam)
        cert = check_nonexistence(model)
        rng = np.random.default_rng(104)
        norms = [minimize(model, random_field(square_basis, rng, rng.uniform(1.0, 100.0))).norm
                 for _ in range(50)]
    print(f"lambda {lam:.6f}, max final ||u||_H {max(norms):.3e} (tol 1e-6), "
          f"certified {cert.certified}, margin {cert.margin:.3e}")
    assert max(norms) < 1e-6 and cert.certified and cert.margin > 0
    b.check()


def test_c05_multiplicity(square_basis, square_grid, log_square, square):
    with Budget(300) as b:
        lz = lambda_zero(log_square, Weight.constant(1.0), square)
        model = EnergyModel(square_basis, square_grid, Weight.constant(1.0), log_square, 2 * lz.value)
        rep = solve_both(model, SolverConfig(path_points=41), lz)
    u1, u2 = rep.points
    dist = rep.distances["minimizer-mountain_pass"]
    print(f"lambda {model.lam:.6f}: J(u1) {u1.energy:.6e} res {u1.residual:.3e}; "
          f"J(u2) {u2.energy:.6e} res {u2.residual:.3e}; distance {dist:.6e}")
    assert u1.kind == MINIMIZER and u2.kind == MOUNTAIN_PASS
    assert u1.energy < 0 < u2.energy
    assert u1.residual < 1e-8 and u2.residual < 1e-8 and dist > 1e-4
    b.check()


def test_c06_bracket_ordering(square, square_model):
    with Budget(60) as b:
        cert = certify(square_model.nonlinearity, Weight.constant(1.0), square, square_model)
    lo, mid, hi = cert.lambda_nonexist, cert.lambda_star.upper, cert.lambda_zero.value
    print(f"lambda_nonexist {lo:.10f} <= lambda_star estimate {mid:.10f} <= lambda_zero {hi:.10f}")
    assert lo <= mid + 1e-10 and mid <= hi + 1e-10
    b.check()


def test_c07_cone_identity(square):
    with Budget(30) as b:
        rng = np.random.default_rng(107)
        worst = 0.0
        for _ in range(10):
            p = ConeParams(tuple(square.center), rng.uniform(0.1, 1.0) * square.inradius, rng.uniform(0.05, 0.95),
                           rng.uniform(-10.0, 10.0))
            exact = cone_gradient_integral(p)
            worst = max(worst, abs(cone_gradient_quadrature(p, square, M=128) - exact) / exact)
    print(f"max relative cone-gradient error {worst:.3e} (tol 1e-2)")
    assert worst < 1e-2
    b.check()


def test_c08_zeta_identity():
    with Budget(5) as b:
        worst = oracle = 0.0
        for n in (2, 3, 4, 5):
            m, _ = min_z(n)
            oracle = max(oracle, abs(m - MIN_Z[n]) / MIN_Z[n])
            for r in (0.1, 1.0, 10.0):
                worst = max(worst, abs(0.5 * (m / r**2 + 0.25) * zeta(n, r) - 1.0))
    print(f"max |identity - 1| {worst:.3e} (tol 1e-12); min z_n vs oracle {oracle:.3e}")
    assert worst <= 1e-12 and oracle <= 1e-10
    b.check()


def test_c09_subquadratic(square_model):
    with Budget(10) as b:
        rng = np.random.default_rng(109)
        worst = 0.0
        for _ in range(10):
            u = random_field(square_model.basis, rng).coeffs

            def ratio(s):
                v = s * u
                return square_model.psi_value(v) / np.sum(v * v * square_model.sqrt_eigs)

            base = abs(ratio(1.0))
            worst = max(worst, abs(ratio(1e-4)) / base, abs(ratio(1e4)) / base)
    print(f"max ratio relative to s = 1: {worst:.3e} (tol 1e-2)")
    assert worst < 1e-2
    b.check()


def test_c10_determinism(tmp_path):
    cfg = tmp_path / "run.toml"
    cfg.write_text('seed = 5\nmodes = 64\nlambda = { factor = 2.0, of = "lambda_zero" }\n'
                   '[domain]\nkind = "rectangle"\nlengths = ["pi", "pi"]\n[nonlinearity]\nname = "log-square"\n')
    times, outs = [], []
    for k in range(2):
        out = tmp_path / f"out{k}"
        t = time.perf_counter()
        assert main(["solve", "--config", str(cfg), "--out", str(out)]) == 0
        times.append(time.perf_counter() - t)
        outs.append(out)
    names = sorted(p.name for p in outs[0].iterdir() if p.name != "timings.json")
    same = all((outs[0] / n).read_bytes() == (outs[1] / n).read_bytes() for n in names)
    doc = json.loads((outs[0] / "report.json").read_text())
    print(f"files compared {names}; identical {same}; solve times {times[0]:.2f} s, {times[1]:.2f} s")
    assert same and doc["report"]["outcome"] == "two-solutions"
    assert times[1] < 2 * times[0]
