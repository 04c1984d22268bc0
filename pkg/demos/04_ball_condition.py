"""Two positive solutions at lambda = 1 on a ball.

On ``B_r`` the cone bound reduces to the test
``min_{F(t) > 0} t^2 / F(t) < zeta(n, r)``.  ``zeta`` increases with ``r``
toward 8, so large balls pass and small ones do not.
"""
from halflap.nonlinearity import builtin
from halflap.thresholds import check_theorem_ball, min_z, zeta

g = builtin("log-square")
for n in (2, 3, 4, 5):
    m, s = min_z(n)
    print(f"n = {n}: min z_n = {m:.10f} at sigma = {s:.6f}")

print()
for n in (2, 3):
    for r in (1.0, 5.0, 10.0, 20.0):
        c = check_theorem_ball(g, n, r)
        print(f"n = {n}, r = {r:5.1f}: zeta = {zeta(n, r):9.4f}, min t^2/F = {c.min_ratio:.4f}  "
              f"-> {'two solutions' if c.verdict else 'not certified'}")
