"""Thresholds for log(1 + u^2) on the pi x pi square.

Below ``lambda_nonexist`` only ``u = 0`` solves the problem; above
``lambda_zero`` there are at least two nonzero solutions.  The random and
cone trials give an upper estimate of the sharp value in between.
"""
import math

from halflap.domain import Domain
from halflap.energy import Weight, default_model
from halflap.nonlinearity import builtin, estimate_cf
from halflap.thresholds import certify

square = Domain.rectangle(math.pi, math.pi)
g = builtin("log-square")
cf = estimate_cf(g)
print(f"c_f = max |f(t)/t| = {cf.value:.12f} at t = {cf.argmax:.6f}")

g = g.with_cf(cf.value)
model = default_model(square, 64, g, 0.0)
cert = certify(g, Weight.constant(1.0), square, model, random_trials=500, seed=0)

lz = cert.lambda_zero
print(f"lambda_1          = {cert.lambda1:.6f}")
print(f"lambda_nonexist   = {cert.lambda_nonexist:.10f}")
print(f"lambda_star      <= {cert.lambda_star.upper:.10f}  (best of {cert.lambda_star.trials} trials)")
print(f"lambda_zero       = {lz.value:.10f}")
print(f"  best cone: t0 = {lz.t0:.4f}, sigma0 = {lz.sigma0:.4f}, tau = {lz.params.tau:.4f}")
print("ordered:", cert.ordered())
