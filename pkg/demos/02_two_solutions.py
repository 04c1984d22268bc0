"""Minimiser and mountain-pass point above lambda_zero.

The minimiser sits deep in the negative-energy valley; the mountain-pass
point is a small positive-energy solution between it and ``u = 0``.  Grid
samples of both go to ``demos/output`` for external plotting.
"""
import math
import os

from halflap.domain import Domain
from halflap.energy import Weight, default_model
from halflap.fields import write_samples_csv
from halflap.nonlinearity import builtin, estimate_cf
from halflap.solvers import SolverConfig, solve_both
from halflap.thresholds import lambda_zero

square = Domain.rectangle(math.pi, math.pi)
g = builtin("log-square")
g = g.with_cf(estimate_cf(g).value)
lz = lambda_zero(g, Weight.constant(1.0), square)

model = default_model(square, 64, g, 2 * lz.value)
report = solve_both(model, SolverConfig(seed=3), lz)
print(f"lambda = {model.lam:.6f}, outcome: {report.outcome}")
for p in report.points:
    print(f"  {p.kind:14s} J = {p.energy: .6e}  ||u||_H = {p.norm:.4e}  residual = {p.residual:.2e}"
          f"  iterations = {p.iterations}")
print(f"H-distance between them: {report.distances['minimizer-mountain_pass']:.6e}")

here = os.path.join(os.path.dirname(os.path.abspath(__file__)), "output")
os.makedirs(here, exist_ok=True)
for p in report.points:
    path = os.path.join(here, f"{p.kind.replace('-', '_')}_samples.csv")
    write_samples_csv(path, p.u, model.grid)
    print("wrote", path)
