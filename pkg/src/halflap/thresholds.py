"""Closed-form thresholds in ``lambda`` and the cone test functions behind them.

Three numbers bracket the onset of non-trivial solutions:

* ``lambda_nonexist = sqrt(lambda_1) / (c_f * sup beta)``: below it only
  ``u = 0`` solves the problem;
* ``lambda_star = inf_{Psi > 0} Phi / Psi``, estimated from above by
  :func:`estimate_lambda_star`;
* ``lambda_zero``, an explicit upper bound built from the cone functions of
  :func:`cone_field`; above it a minimiser and a mountain-pass point exist.

The ball check (:func:`check_theorem_ball`) specialises the cone bound to
``Omega = B_r`` and ``lambda = 1`` through ``z_n`` and ``zeta``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize, special

from .domain import BALL, Domain, QuadratureGrid, build_quadrature, gauss_legendre, unit_ball_volume
from .errors import NoWitnessError, UndefinedCfError
from .fields import Field, project
from .nonlinearity import Nonlinearity, estimate_cf, find_sign_witness, max_abs_primitive

# default lambda_zero search grid
T_SPAN = (1e-2, 1e2)
T_POINTS = 200
SIGMA_RANGE = (0.05, 0.995)
SIGMA_POINTS = 100
TAU_FRACTIONS = (0.25, 0.5, 0.75, 1.0)
F_SCAN = 10_000


def first_eigenvalue(domain: Domain) -> float:
    """Smallest Dirichlet eigenvalue of ``-Laplace`` on ``domain``.

    For a ball of radius ``r`` in R^n this is ``(j_{n/2-1,1} / r)^2`` with
    ``j_{nu,1}`` the first positive zero of the Bessel function ``J_nu``.
    """
    if domain.kind != BALL:
        return float(sum((math.pi / L) ** 2 for L in domain.lengths))
    nu = domain.dim / 2 - 1
    if nu == -0.5:
        return (math.pi / 2 / domain.radius) ** 2
    # the first zero of J_nu lies in (nu, nu + 2 nu^(1/3) + 3)
    x = np.linspace(max(nu, 1e-3), nu + 2 * abs(nu) ** (1 / 3) + 3.0, 400)
    v = special.jv(nu, x)
    i = int(np.nonzero(np.sign(v[:-1]) != np.sign(v[1:]))[0][0])
    root = optimize.brentq(lambda s: special.jv(nu, s), x[i], x[i + 1], xtol=1e-15)
    return (root / domain.radius) ** 2


# --------------------------------------------------------------------------
# non-existence

def lambda_nonexist(lambda1: float, c_f: float, beta_sup: float) -> float:
    """``sqrt(lambda1) / (c_f * beta_sup)``; all inputs must be positive."""
    for name, v in (("lambda1", lambda1), ("c_f", c_f), ("beta_sup", beta_sup)):
        if not v > 0:
            raise ValueError(f"{name} must be positive, got {v!r}")
    return math.sqrt(lambda1) / (c_f * beta_sup)


@dataclass(frozen=True)
class NonexistenceCheck:
    certified: bool
    margin: float
    product: float
    c_f: float


def _model_cf(model) -> float:
    g = model.nonlinearity
    if g.c_f_cache is not None:
        return g.c_f_cache
    try:
        return estimate_cf(g).value
    except UndefinedCfError:
        return 0.0


def check_nonexistence(model, c_f: float | None = None) -> NonexistenceCheck:
    """A priori certificate that ``u = 0`` is the only solution.

    With ``p = lambda * c_f * sup beta / sqrt(lambda_1)``, any solution obeys
    ``||u||^2 <= p ||u||^2``, so ``p < 1`` (strictly) forces ``u = 0``.
    ``margin = 1 - p``.
    """
    c_f = _model_cf(model) if c_f is None else float(c_f)
    lambda1 = float(model.basis.eigenvalues[0])
    p = model.lam * c_f * model.weight.sup_norm / math.sqrt(lambda1)
    return NonexistenceCheck(bool(p < 1.0), 1.0 - p, p, c_f)


# --------------------------------------------------------------------------
# cone test functions

@dataclass(frozen=True)
class ConeParams:
    """Plateau ``t`` on ``B(x0, sigma tau)``, linear ramp to 0 at ``|x - x0| = tau``."""

    x0: tuple
    tau: float
    sigma: float
    t: float

    def __post_init__(self):
        object.__setattr__(self, "x0", tuple(float(v) for v in np.atleast_1d(self.x0)))
        if not 0.0 < self.sigma < 1.0:
            raise ValueError(f"sigma must lie in (0, 1), got {self.sigma!r}")
        if not self.tau > 0:
            raise ValueError(f"tau must be positive, got {self.tau!r}")

    @property
    def dim(self) -> int:
        return len(self.x0)

    def check(self, domain: Domain) -> None:
        if not domain.contains_ball(np.array(self.x0), self.tau):
            raise ValueError(f"B({self.x0}, {self.tau}) is not contained in {domain.describe()}")

    def describe(self) -> dict:
        return {"x0": list(self.x0), "tau": self.tau, "sigma": self.sigma, "t": self.t}


def cone_field(params: ConeParams, points, domain: Domain | None = None) -> np.ndarray:
    """Values of the cone at ``points`` (an ``(N, n)`` array or a grid).

    When ``domain`` is given (or ``points`` is a grid) the ball containment
    is checked first.
    """
    if isinstance(points, QuadratureGrid):
        domain = domain or points.domain
        points = points.nodes
    if domain is not None:
        params.check(domain)
    pts = np.asarray(points, dtype=float).reshape(-1, params.dim)
    r = np.linalg.norm(pts - np.array(params.x0), axis=1)
    inner = params.sigma * params.tau
    ramp = params.t * (params.tau - r) / ((1.0 - params.sigma) * params.tau)
    return np.where(r < inner, params.t, np.where(r < params.tau, ramp, 0.0))


def cone_gradient_integral(params: ConeParams) -> float:
    """Exact ``int |grad omega|^2 = t^2 w_n tau^(n-2) (1 - sigma^n) / (1 - sigma)^2``."""
    n, s = params.dim, params.sigma
    return params.t**2 * unit_ball_volume(n) * params.tau ** (n - 2) * (1 - s**n) / (1 - s) ** 2


def _fd_gradient_sq(params, pts, h):
    g2 = np.zeros(len(pts))
    for d in range(params.dim):
        e = np.zeros(params.dim)
        e[d] = h
        g2 += ((cone_field(params, pts + e) - cone_field(params, pts - e)) / (2 * h)) ** 2
    return g2


def polar_rule(params: ConeParams, M: int):
    """Nodes and weights on ``B(x0, tau)`` with radial panels split at ``sigma tau``.

    ``M`` Gauss-Legendre points per radial panel and ``M`` uniform angles
    (n = 2); in one dimension the two half-lines replace the angles.
    """
    n = params.dim
    rs, ws = [], []
    for a, b in ((0.0, params.sigma * params.tau), (params.sigma * params.tau, params.tau)):
        r, w = gauss_legendre(a, b, M)
        rs.append(r)
        ws.append(w)
    r, wr = np.concatenate(rs), np.concatenate(ws)
    x0 = np.array(params.x0)
    if n == 1:
        pts = np.concatenate([x0 + r[:, None], x0 - r[:, None]])
        return pts, np.concatenate([wr, wr])
    if n == 2:
        th = 2 * np.pi * np.arange(M) / M
        R, TH = np.meshgrid(r, th, indexing="ij")
        W = np.outer(wr * r, np.full(M, 2 * np.pi / M))
        pts = x0 + np.stack([(R * np.cos(TH)).ravel(), (R * np.sin(TH)).ravel()], axis=1)
        return pts, W.ravel()
    raise ValueError("the polar rule is implemented for n <= 2")


def cone_gradient_quadrature(params: ConeParams, domain: Domain, M: int = 128, route: str = "polar") -> float:
    """``int |grad omega|^2`` by quadrature, with the gradient from central differences.

    ``route="polar"`` integrates on :func:`polar_rule`, whose panels follow
    the two kinks of the cone.  ``route="tensor"`` uses the domain's tensor
    Gauss-Legendre grid, which does not see the kinks and converges slowly
    (errors of a few percent at ``M = 128``).
    """
    params.check(domain)
    h = 1e-7 * params.tau
    if route == "polar":
        pts, w = polar_rule(params, M)
    elif route == "tensor":
        grid = build_quadrature(domain, M)
        pts, w = grid.nodes, grid.weights
    else:
        raise ValueError(f"unknown route {route!r}")
    return float(np.dot(w, _fd_gradient_sq(params, pts, h)))


def cone_cylinder_norm_bound(params: ConeParams, domain: Domain) -> float:
    """Upper bound on the squared Dirichlet norm of ``exp(-y/2) omega(x)`` on the cylinder.

    ``int |grad_x w|^2 + |d_y w|^2 = int |grad omega|^2 + 1/4 int omega^2``,
    and ``int omega^2 <= t^2 |Omega|``.
    """
    params.check(domain)
    n, s = params.dim, params.sigma
    wn = unit_ball_volume(n)
    return params.t**2 * (wn * params.tau ** (n - 2) * (1 - s**n) / (1 - s) ** 2 + domain.measure / 4)


def cone_cylinder_norm_quadrature(params: ConeParams, domain: Domain, M: int = 128) -> float:
    """The same squared norm with both x-integrals done on :func:`polar_rule`."""
    params.check(domain)
    pts, w = polar_rule(params, M)
    g2 = _fd_gradient_sq(params, pts, 1e-7 * params.tau)
    return float(np.dot(w, g2 + 0.25 * cone_field(params, pts) ** 2))


def psi_lower_bound(params: ConeParams, nonlinearity: Nonlinearity, weight, fmax=None) -> float:
    """``w_n tau^n (F(t) sigma^n essinf beta - (1 - sigma^n) max_{|s|<=|t|} |F(s)| sup beta)``."""
    n, s = params.dim, params.sigma
    if fmax is None:
        fmax = float(max_abs_primitive(nonlinearity, params.t, F_SCAN)[0])
    Ft = float(nonlinearity.F(np.array([params.t]))[0])
    sn = s**n
    return unit_ball_volume(n) * params.tau**n * (Ft * sn * weight.essinf - (1 - sn) * fmax * weight.sup_norm)


# --------------------------------------------------------------------------
# lambda_zero

@dataclass(frozen=True)
class LambdaZero:
    value: float
    t0: float
    sigma0: float
    params: ConeParams
    margin: float
    sign_witness: float
    grid: dict = field(compare=False)

    def describe(self) -> dict:
        return {"lambda_zero": self.value, "t0": self.t0, "sigma0": self.sigma0,
                "cone": self.params.describe(), "denominator_margin": self.margin,
                "sign_witness": self.sign_witness, "search_grid": self.grid}


def default_t_grid(scale: float, points: int = T_POINTS) -> np.ndarray:
    base = np.geomspace(T_SPAN[0], T_SPAN[1], points) * abs(scale)
    return np.concatenate([base, -base])


def default_sigma_grid(points: int = SIGMA_POINTS) -> np.ndarray:
    return np.linspace(SIGMA_RANGE[0], SIGMA_RANGE[1], points)


def lambda_zero(nonlinearity: Nonlinearity, weight, domain: Domain, t_grid=None, sigma_grid=None,
                tau_fractions=TAU_FRACTIONS, x0=None) -> LambdaZero:
    """Smallest cone bound on a grid of ``(t, sigma, tau)``.

    For each cone, ``Phi <= bound / 2`` (:func:`cone_cylinder_norm_bound`)
    and ``Psi >=`` :func:`psi_lower_bound`; where the latter is positive the
    ratio bounds ``lambda_star``.  The result is the plain grid minimum, so
    restricting any of the grids can only raise it.

    Raises
    ------
    NoWitnessError
        When ``F`` is never positive ("no sign witness") or the ``Psi``
        bound is never positive on the grid.
    """
    tw = find_sign_witness(nonlinearity)
    if tw is None:
        raise NoWitnessError(f"{nonlinearity.name}: no sign witness, F(t) <= 0 on the scan range")
    t = default_t_grid(tw) if t_grid is None else np.asarray(t_grid, dtype=float)
    sig = default_sigma_grid() if sigma_grid is None else np.asarray(sigma_grid, dtype=float)
    taus = np.asarray(tau_fractions, dtype=float) * domain.inradius
    if x0 is None:
        x0 = domain.center
    n = domain.dim
    wn = unit_ball_volume(n)

    Ft = np.asarray(nonlinearity.F(t), dtype=float)
    fmax = max_abs_primitive(nonlinearity, t, F_SCAN)
    sn = sig**n
    # psi-bound per unit ball volume tau^n: shape (T, S)
    dens = Ft[:, None] * sn[None, :] * weight.essinf - (1 - sn)[None, :] * fmax[:, None] * weight.sup_norm
    best = (math.inf, None)
    for k, tau in enumerate(taus):
        grad = wn * tau ** (n - 2) * (1 - sn) / (1 - sig) ** 2
        num = (t**2)[:, None] * (grad[None, :] + domain.measure / 4)
        with np.errstate(divide="ignore", invalid="ignore"):
            lam0 = np.where(dens > 0, num / (2 * wn * tau**n * dens), np.inf)
        i, j = np.unravel_index(int(np.argmin(lam0)), lam0.shape)
        if lam0[i, j] < best[0]:
            best = (float(lam0[i, j]), (i, j, k))
    if best[1] is None:
        raise NoWitnessError(f"{nonlinearity.name}: the Psi lower bound is never positive on the search grid")
    i, j, k = best[1]
    params = ConeParams(tuple(x0), float(taus[k]), float(sig[j]), float(t[i]))
    params.check(domain)
    grid = {"t": [float(t.min()), float(t.max()), int(t.size)],
            "sigma": [float(sig.min()), float(sig.max()), int(sig.size)],
            "tau": [float(v) for v in taus], "x0": [float(v) for v in x0], "F_scan": F_SCAN}
    return LambdaZero(best[0], float(t[i]), float(sig[j]), params, float(dens[i, j]), float(tw), grid)


# --------------------------------------------------------------------------
# lambda_star

@dataclass(frozen=True, eq=False)
class LambdaStarEstimate:
    upper: float
    lower: float
    witness: Field
    source: str
    trials: int


def _ratios(model, A):
    U = A @ model.phi_nodes.T
    psi = (model.nonlinearity.F(U) @ model.wbeta)
    phi = 0.5 * np.sum(A * A * model.sqrt_eigs, axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(psi > 0, phi / psi, np.inf)


def cone_trials(model, lz: LambdaZero | None = None, t_points=12, sigma_points=8, tau_fractions=TAU_FRACTIONS):
    """Projected cones: the ``lambda_zero`` witness first, then a coarse grid."""
    domain = model.basis.domain
    cones = []
    if lz is not None:
        cones.append(lz.params)
        t_scale = abs(lz.sign_witness)
    else:
        tw = find_sign_witness(model.nonlinearity)
        t_scale = abs(tw) if tw is not None else 1.0
    ts = np.geomspace(0.1, 10.0, t_points) * t_scale
    for tau in np.asarray(tau_fractions) * domain.inradius:
        for s in np.linspace(0.3, 0.95, sigma_points):
            for t in ts:
                cones.append(ConeParams(tuple(domain.center), float(tau), float(s), float(t)))
    A = np.array([project(cone_field(c, model.grid), model.grid, model.basis).coeffs for c in cones])
    return cones, A


def estimate_lambda_star(model, random_trials: int = 500, seed: int = 0, lz: LambdaZero | None = None,
                         cones: bool = True) -> LambdaStarEstimate:
    """Upper estimate of ``inf_{Psi > 0} Phi / Psi`` over a finite trial family.

    The family is the projected cones of :func:`cone_trials` followed by
    ``random_trials`` random fields with log-uniform amplitude in
    ``[0.1, 10]``.  Trial ``k`` does not depend on the budget, so a larger
    budget can only lower the estimate.  ``lower`` is
    ``sqrt(lambda_1) / (c_f sup beta)``.
    """
    rng = np.random.default_rng(seed)
    J = model.basis.size
    j = np.arange(1, J + 1)
    rows, labels = [], []
    if cones:
        cs, A = cone_trials(model, lz)
        rows.append(A)
        labels += [f"cone {c.describe()}" for c in cs]
    R = np.empty((random_trials, J))
    for k in range(random_trials):
        a = rng.uniform(-1.0, 1.0, J) / j
        R[k] = a * math.exp(rng.uniform(math.log(0.1), math.log(10.0)))
    rows.append(R)
    labels += [f"random {k}" for k in range(random_trials)]
    A = np.concatenate(rows) if rows else np.empty((0, J))
    ratio = _ratios(model, A)
    if not np.any(np.isfinite(ratio)):
        raise NoWitnessError("no trial field with positive potential")
    k = int(np.argmin(ratio))
    low = lambda_nonexist(float(model.basis.eigenvalues[0]), _model_cf(model), model.weight.sup_norm)
    return LambdaStarEstimate(float(ratio[k]), low, Field(model.basis, A[k]), labels[k], len(A))


# --------------------------------------------------------------------------
# ball constants

def sigma_range(n: int) -> tuple:
    """The open interval ``(2^(-1/n), 1)`` on which ``z_n`` is positive."""
    return 2.0 ** (-1.0 / n), 1.0


def z_n(n: int, sigma) -> np.ndarray | float:
    """``(1 - s^n) / ((2 s^n - 1) (1 - s)^2)`` for ``s`` in ``(2^(-1/n), 1)``."""
    if int(n) != n or n < 2:
        raise ValueError(f"n must be an integer >= 2, got {n!r}")
    s = np.asarray(sigma, dtype=float)
    lo, hi = sigma_range(n)
    if np.any(s <= lo) or np.any(s >= hi):
        raise ValueError(f"sigma must lie in ({lo}, 1)")
    sn = s**n
    out = (1 - sn) / ((2 * sn - 1) * (1 - s) ** 2)
    return float(out) if out.ndim == 0 else out


def min_z(n: int) -> tuple:
    """``(min z_n, argmin)`` by a 1000-point scan refined by golden section."""
    lo, hi = sigma_range(n)
    s = np.linspace(lo, hi, 1002)[1:-1]
    v = z_n(n, s)
    i = int(np.argmin(v))
    a, b = s[max(i - 1, 0)], s[min(i + 1, len(s) - 1)]
    res = optimize.minimize_scalar(lambda x: z_n(n, x), bracket=(a, s[i], b), method="golden",
                                   options={"xtol": 1e-14})
    if res.fun < v[i]:
        return float(res.fun), float(res.x)
    return float(v[i]), float(s[i])


def zeta(n: int, r: float) -> float:
    """``8 r^2 / (r^2 + 4 min z_n)``."""
    if not r > 0:
        raise ValueError(f"r must be positive, got {r!r}")
    m, _ = min_z(n)
    return 8 * r * r / (r * r + 4 * m)


@dataclass(frozen=True)
class BallCheck:
    verdict: bool | None
    min_ratio: float
    zeta: float
    t0: float
    status: str

    def describe(self) -> dict:
        return {"verdict": self.verdict, "min_ratio": self.min_ratio, "zeta": self.zeta,
                "t0": self.t0, "status": self.status}


def min_ratio_on_support(nonlinearity: Nonlinearity, t_max: float = 1e4, points: int = 4000):
    """``min t^2 / F(t)`` over ``t`` in ``(0, t_max]`` with ``F(t) > 0``; ``None`` if empty."""
    t = np.geomspace(1e-6, t_max, points)
    Fv = np.asarray(nonlinearity.F(t), dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        q = np.where(Fv > 0, t * t / Fv, np.inf)
    if not np.any(np.isfinite(q)):
        return None
    i = int(np.argmin(q))
    best = (float(q[i]), float(t[i]))
    if 0 < i < len(t) - 1 and np.isfinite(q[i - 1]) and np.isfinite(q[i + 1]):

        def obj(s):
            x = math.exp(s)
            Fx = float(nonlinearity.F(np.array([x]))[0])
            return x * x / Fx if Fx > 0 else math.inf

        res = optimize.minimize_scalar(obj, bracket=(math.log(t[i - 1]), math.log(t[i]), math.log(t[i + 1])),
                                       method="golden", options={"xtol": 1e-12})
        if res.fun < best[0]:
            best = (float(res.fun), math.exp(res.x))
    return best


def check_theorem_ball(nonlinearity: Nonlinearity, n: int, r: float, t_max: float = 1e4) -> BallCheck:
    """Whether ``min_{F(t) > 0, t > 0} t^2 / F(t) < zeta(n, r)``.

    A true verdict means two positive solutions exist on ``B_r`` at
    ``lambda = 1``.  An empty positivity set gives status ``unverifiable``
    and no verdict.
    """
    t = np.geomspace(1e-6, t_max, 4000)
    if np.any(np.asarray(nonlinearity.f(t)) < 0):
        raise ValueError("f must be non-negative on [0, inf)")
    z = zeta(n, r)
    found = min_ratio_on_support(nonlinearity, t_max)
    if found is None:
        return BallCheck(None, math.inf, z, math.nan, "unverifiable")
    m, t0 = found
    return BallCheck(bool(m < z), m, z, t0, "verified")


# --------------------------------------------------------------------------
# Psi witness and the full certificate

@dataclass(frozen=True)
class PsiWitness:
    t: float
    sigma: float
    margin: float
    relative_margin: float


def find_psi_witness(nonlinearity: Nonlinearity, weight, domain: Domain, t_grid=None, sigma_grid=None) -> PsiWitness:
    """``(t, sigma)`` making the cone lower bound on ``Psi`` positive.

    The bound ``F(t) s^n essinf beta - (1 - s^n) max_{|x|<=|t|} |F| sup beta``
    is scanned over the grids; among feasible pairs the one with the largest
    margin relative to ``max |F| sup beta`` wins, the first in grid order on
    ties.
    """
    tw = find_sign_witness(nonlinearity)
    if tw is None:
        raise NoWitnessError(f"{nonlinearity.name}: no sign witness")
    t = default_t_grid(tw) if t_grid is None else np.asarray(t_grid, dtype=float)
    sig = default_sigma_grid() if sigma_grid is None else np.asarray(sigma_grid, dtype=float)
    n = domain.dim
    Ft = np.asarray(nonlinearity.F(t), dtype=float)
    fmax = max_abs_primitive(nonlinearity, t, F_SCAN)
    sn = sig**n
    margin = Ft[:, None] * sn * weight.essinf - (1 - sn) * fmax[:, None] * weight.sup_norm
    with np.errstate(divide="ignore", invalid="ignore"):
        rel = np.where(margin > 0, margin / (fmax[:, None] * weight.sup_norm), -np.inf)
    i, j = np.unravel_index(int(np.argmax(rel)), rel.shape)
    if not np.isfinite(rel[i, j]):
        raise NoWitnessError(f"{nonlinearity.name}: no feasible (t, sigma) on the grid")
    return PsiWitness(float(t[i]), float(sig[j]), float(margin[i, j]), float(rel[i, j]))


@dataclass(frozen=True, eq=False)
class ThresholdCertificate:
    lambda_nonexist: float
    lambda_zero: LambdaZero
    lambda_star: LambdaStarEstimate | None
    c_f: float
    lambda1: float
    beta_sup: float
    beta_essinf: float

    @property
    def bracket(self) -> tuple:
        return self.lambda_nonexist, self.lambda_zero.value

    def ordered(self, slack: float = 1e-10) -> bool:
        lo, hi = self.bracket
        mid = self.lambda_star.upper if self.lambda_star is not None else lo
        return lo <= mid + slack and mid <= hi + slack

    def describe(self) -> dict:
        out = {
            "inputs": {"c_f": self.c_f, "lambda1": self.lambda1, "beta_sup": self.beta_sup,
                       "beta_essinf": self.beta_essinf},
            "lambda_nonexist": self.lambda_nonexist,
            "lambda_star_bracket": list(self.bracket),
            **self.lambda_zero.describe(),
            "bracket_ordered": self.ordered(),
        }
        if self.lambda_star is not None:
            out["lambda_star_estimate"] = {"upper": self.lambda_star.upper, "lower": self.lambda_star.lower,
                                           "witness": self.lambda_star.source,
                                           "trials": self.lambda_star.trials}
        return out


def certify(nonlinearity: Nonlinearity, weight, domain: Domain, model=None, random_trials: int = 500,
            seed: int = 0) -> ThresholdCertificate:
    """Every threshold for one configuration.

    ``model`` (an :class:`~halflap.energy.EnergyModel` on ``domain``) enables
    the ``lambda_star`` estimate; without it, e.g. on a ball, that entry is
    ``None``.
    """
    lz = lambda_zero(nonlinearity, weight, domain)
    cf = nonlinearity.c_f_cache if nonlinearity.c_f_cache is not None else estimate_cf(nonlinearity).value
    lambda1 = first_eigenvalue(domain)
    low = lambda_nonexist(lambda1, cf, weight.sup_norm)
    star = None
    if model is not None:
        star = estimate_lambda_star(model, random_trials, seed, lz)
    return ThresholdCertificate(low, lz, star, cf, lambda1, weight.sup_norm, weight.essinf)


__all__ = [
    "first_eigenvalue", "lambda_nonexist", "NonexistenceCheck", "check_nonexistence", "ConeParams",
    "cone_field", "cone_gradient_integral", "polar_rule", "cone_gradient_quadrature",
    "cone_cylinder_norm_bound", "cone_cylinder_norm_quadrature", "psi_lower_bound", "LambdaZero",
    "lambda_zero", "LambdaStarEstimate", "cone_trials", "estimate_lambda_star", "sigma_range", "z_n",
    "min_z", "zeta", "BallCheck", "min_ratio_on_support", "check_theorem_ball", "PsiWitness",
    "find_psi_witness", "ThresholdCertificate", "certify",
]
