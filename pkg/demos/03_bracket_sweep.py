"""Where does the nonzero minimiser appear?

Between ``lambda_nonexist`` and ``lambda_zero`` neither certificate
applies.  Minimising from the cone warm start at each lambda locates the
transition empirically.
"""
import math

import numpy as np

from halflap.domain import Domain
from halflap.energy import Weight, default_model
from halflap.nonlinearity import builtin, estimate_cf
from halflap.solvers import minimize, warm_start
from halflap.thresholds import certify

square = Domain.rectangle(math.pi, math.pi)
g = builtin("log-square")
g = g.with_cf(estimate_cf(g).value)
model = default_model(square, 32, g, 0.0)
cert = certify(g, Weight.constant(1.0), square, model, random_trials=200)
lo, hi = cert.bracket
print(f"bracket [{lo:.4f}, {hi:.4f}], lambda_star <= {cert.lambda_star.upper:.4f}")

for lam in np.geomspace(0.5 * lo, 2 * hi, 14):
    m = model.with_lambda(lam)
    cp = minimize(m, warm_start(m, cert.lambda_zero))
    print(f"lambda = {lam:9.4f}  {cp.kind:10s} J = {cp.energy: .4e}  ||u||_H = {cp.norm:.3e}")
