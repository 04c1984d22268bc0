"""Invariant checks run by ``halflap verify``.

Each check measures one quantity, compares it with a fixed tolerance and
returns a :class:`Check`.  The suite needs a domain with a basis; the
threshold identities (``zeta``, ``z_2``) are included regardless.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .fields import (apply_half_laplacian, cylinder_kernel, extend, gram_matrices, h_half_norm, lift_norm,
                     random_field, sample_on_grid, x_norm, x_norm_quadrature)
from .errors import UndefinedCfError
from .nonlinearity import estimate_cf
from .thresholds import ConeParams, cone_gradient_integral, cone_gradient_quadrature, min_z, z_n, zeta


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    measured: float
    tolerance: float

    def describe(self) -> dict:
        return {"name": self.name, "passed": self.passed, "measured": self.measured, "tolerance": self.tolerance}


def _check(name, measured, tol):
    measured = float(measured)
    return Check(name, bool(math.isfinite(measured) and measured <= tol), measured, tol)


def basis_checks(basis, grid):
    G, K = gram_matrices(basis, grid)
    out = [
        _check("gram_identity", np.max(np.abs(G - np.eye(basis.size))), 1e-8),
        _check("stiffness_diagonal", np.max(np.abs(K - np.diag(basis.eigenvalues))) / basis.eigenvalues[-1], 1e-8),
    ]
    # brute-force enumeration in a different order must give the same spectrum
    k2 = (np.pi / np.array(basis.domain.lengths)) ** 2
    top = basis.max_index + 1
    grids = np.meshgrid(*[np.arange(top, 0, -1)] * basis.domain.dim, indexing="ij")
    lam = np.sort(sum(g.ravel() ** 2 * k2[d] for d, g in enumerate(grids)))[: basis.size]
    out.append(_check("eigenvalues_order_invariant", np.max(np.abs(lam - basis.eigenvalues)), 0.0))
    out.append(_check("eigenvalues_nondecreasing", -np.min(np.diff(basis.eigenvalues), initial=0.0), 0.0))
    return out


def field_checks(basis, grid, rng, trials=200):
    fields = [random_field(basis, rng) for _ in range(trials)]
    parseval = max(abs(grid.integrate(sample_on_grid(u, grid) ** 2) - np.sum(u.coeffs**2)) / np.sum(u.coeffs**2)
                   for u in fields)
    iso = max(abs(x_norm(extend(u)) - h_half_norm(u)) / h_half_norm(u) for u in fields)
    kernel = cylinder_kernel(basis, grid)
    quad = max(abs(x_norm_quadrature(extend(u), grid, kernel) - h_half_norm(u)) / h_half_norm(u) for u in fields)
    lift = max(h_half_norm(u) - lift_norm(u, d) for u in fields for d in (0.1, 1.0, 10.0))
    twice = apply_half_laplacian(apply_half_laplacian(fields[0]))
    return [
        _check("parseval", parseval, 1e-8),
        _check("isometry_closed_form", iso, 1e-10),
        _check("isometry_quadrature", quad, 1e-8),
        _check("trace_inequality_lift", lift, 1e-12),
        _check("half_laplacian_squared", np.max(np.abs(twice.coeffs - basis.eigenvalues * fields[0].coeffs)
                                                 / (basis.eigenvalues * np.abs(fields[0].coeffs))), 1e-14),
    ]


def nonlinearity_checks(g, rng):
    t = rng.uniform(-20.0, 20.0, 100)
    ref = np.array([integrate.quad(lambda s: float(g.f(np.array([s]))[0]), 0.0, x, epsabs=0, epsrel=1e-12)[0]
                    for x in t])
    err = np.max(np.abs(g.F(t) - ref) / np.maximum(np.abs(ref), 1e-300))
    out = [_check("primitive_matches_quadrature", err, 1e-8)]
    try:
        cfs = [estimate_cf(g, t_max=tm).value for tm in (10.0, 100.0, 1e4)]
        out.append(_check("c_f_monotone_in_t_max", max(0.0, cfs[0] - cfs[1], cfs[1] - cfs[2]) / cfs[2],
                          1e-12))
    except (UndefinedCfError, ValueError):
        pass
    flags = g.checks
    for key in ("superlinear_at_zero", "sublinear_at_infinity"):
        out.append(Check(key, bool(flags[key]), float(flags[key]), 1.0))
    return out


def energy_checks(model, rng, trials=5):
    worst = 0.0
    h = 1e-6
    for _ in range(trials):
        a = random_field(model.basis, rng).coeffs
        g = model.gradient(a)
        fd = np.empty_like(a)
        for j in range(len(a)):
            e = np.zeros_like(a)
            e[j] = h
            fd[j] = (model.energy(a + e) - model.energy(a - e)) / (2 * h)
        worst = max(worst, np.linalg.norm(fd - g) / np.linalg.norm(g))
    u = random_field(model.basis, rng).coeffs
    ratio = []
    for s in (1e-4, 1e-3, 1e-2, 1e2, 1e3, 1e4):
        v = s * u
        ratio.append(model.psi_value(v) / np.sum(v * v * model.sqrt_eigs))
    small_ok = bool(abs(ratio[0]) <= abs(ratio[1]) <= abs(ratio[2]))
    large_ok = bool(abs(ratio[5]) <= abs(ratio[4]) <= abs(ratio[3]))
    return [
        _check("gradient_vs_finite_differences", worst, 1e-5),
        Check("psi_subquadratic_at_zero", small_ok, abs(ratio[0]), abs(ratio[1])),
        Check("psi_subquadratic_at_infinity", large_ok, abs(ratio[5]), abs(ratio[4])),
    ]


def threshold_checks(domain=None):
    out = []
    worst = 0.0
    for n in (2, 3, 4):
        m, _ = min_z(n)
        for r in (0.5, 1.0, 2.0):
            worst = max(worst, abs(0.5 * (m / r**2 + 0.25) * zeta(n, r) - 1.0))
    out.append(_check("zeta_identity", worst, 1e-12))
    s = 0.9
    out.append(_check("z2_closed_form", abs(z_n(2, s) - (1 + s) / ((2 * s * s - 1) * (1 - s))) / z_n(2, s), 1e-12))
    if domain is not None and domain.dim <= 2:
        p = ConeParams(tuple(domain.center), 0.75 * domain.inradius, 0.6, 2.0)
        ex = cone_gradient_integral(p)
        out.append(_check("cone_gradient_integral", abs(cone_gradient_quadrature(p, domain) - ex) / ex, 1e-2))
    return out


def run_suite(cfg) -> list:
    """All checks for a :class:`~halflap.config.RunConfig`."""
    rng = np.random.default_rng(cfg.seed)
    checks = []
    domain = cfg.domain
    if domain.has_basis:
        model = cfg.build_model(1.0)
        basis, grid = model.basis, model.grid
        checks += basis_checks(basis, grid)
        checks += field_checks(basis, grid, rng)
        checks += nonlinearity_checks(model.nonlinearity, rng)
        checks += energy_checks(model, rng)
    checks += threshold_checks(domain)
    return checks


__all__ = ["Check", "basis_checks", "field_checks", "nonlinearity_checks", "energy_checks", "threshold_checks",
           "run_suite"]
