"""Critical points of ``J_lambda``: the global minimiser and a mountain-pass point.

Both searches work on coefficient vectors and measure everything in the
H_0^{1/2} metric, where the quadratic part of ``J`` is the identity.  The
descent direction ``-g_j / sqrt(lambda_j)`` is therefore the H-gradient,
and its length is the dual residual.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field, asdict

import numpy as np
from scipy import optimize

from .errors import DegenerateGeometryError, NoWitnessError, NumericalFailure, SolverStageError
from .fields import Field, project
from .thresholds import ConeParams, LambdaZero, check_nonexistence, cone_field, find_psi_witness, lambda_zero

log = logging.getLogger(__name__)

TRIVIAL = "trivial"
MINIMIZER = "minimizer"
MOUNTAIN_PASS = "mountain-pass"
UNCLASSIFIED = "unclassified"


@dataclass(frozen=True)
class SolverConfig:
    """Iteration limits and line-search constants.

    The separation and triviality thresholds default to ``1e3 * grad_tol``
    and ``10 * grad_tol``.
    """

    max_iters: int = 50_000
    grad_tol: float = 1e-8
    path_points: int = 41
    redistribute_every: int = 10
    initial_step: float = 1.0
    backtrack: float = 0.5
    armijo: float = 1e-4
    restarts: int = 0
    seed: int = 0
    separation_tol: float | None = None
    trivial_tol: float | None = None
    phase_switch: float = 0.1
    phase_a_iters: int = 5000
    min_step: float = 1e-16

    def __post_init__(self):
        if not self.grad_tol > 0:
            raise ValueError("grad_tol must be positive")
        if self.path_points < 3:
            raise ValueError("the mountain-pass path needs at least 3 points")
        if not 0 < self.backtrack < 1:
            raise ValueError("backtracking factor must lie in (0, 1)")
        if not 0 < self.armijo < 1:
            raise ValueError("Armijo constant must lie in (0, 1)")
        if self.max_iters < 1 or self.redistribute_every < 1:
            raise ValueError("iteration counts must be positive")
        if not self.initial_step > 0:
            raise ValueError("initial step must be positive")

    @property
    def separation(self) -> float:
        return 1e3 * self.grad_tol if self.separation_tol is None else self.separation_tol

    @property
    def trivial(self) -> float:
        return 10 * self.grad_tol if self.trivial_tol is None else self.trivial_tol

    def describe(self) -> dict:
        out = asdict(self)
        out["separation_tol"] = self.separation
        out["trivial_tol"] = self.trivial
        return out


@dataclass(frozen=True, eq=False)
class CriticalPoint:
    u: Field
    energy: float
    residual: float
    kind: str
    iterations: int
    converged: bool = True
    history: tuple = field(default=(), repr=False)

    @property
    def norm(self) -> float:
        return float(np.sqrt(np.sum(self.u.coeffs**2 * self.u.basis.sqrt_eigenvalues)))

    def describe(self) -> dict:
        return {"kind": self.kind, "energy": self.energy, "residual": self.residual,
                "h_norm": self.norm, "iterations": self.iterations, "converged": self.converged}


@dataclass(eq=False)
class SolveReport:
    model: dict
    thresholds: dict
    points: list
    distances: dict
    timings: dict
    seed: int
    outcome: str
    certificate: dict | None = None

    def describe(self, include_timings: bool = False) -> dict:
        out = {"outcome": self.outcome, "seed": self.seed, "model": self.model,
               "thresholds": self.thresholds, "points": [p.describe() for p in self.points],
               "distances": self.distances}
        if self.certificate is not None:
            out["certificate"] = self.certificate
        if include_timings:
            out["timings"] = self.timings
        return out


def h_distance(a, b) -> float:
    return float(np.sqrt(np.sum((a.coeffs - b.coeffs) ** 2 * a.basis.sqrt_eigenvalues)))


def classify(model, a, energy, cfg: SolverConfig) -> str:
    if math.sqrt(float(np.sum(a * a * model.sqrt_eigs))) < cfg.trivial:
        return TRIVIAL
    if energy < 0:
        return MINIMIZER
    return UNCLASSIFIED


def _finite(value, what, **diag):
    if not np.all(np.isfinite(value)):
        raise NumericalFailure(f"non-finite {what}", **diag)


def _bb_step(model, sv, yv, fallback):
    """Barzilai-Borwein length ``<s, s>_H / <s, y>`` clipped to ``[1e-6, 1e6]``."""
    sy = float(sv @ yv)
    if sy <= 0:
        return fallback
    return min(max(float(sv @ (model.sqrt_eigs * sv)) / sy, 1e-6), 1e6)


def _armijo(model, a, d, slope, s, cfg: SolverConfig):
    """Backtrack from ``s`` until the energy drop meets the Armijo condition."""
    while s >= cfg.min_step:
        dj = model.energy_change(a, d, s)
        if not math.isfinite(dj):
            raise NumericalFailure("non-finite energy during line search", step=s)
        if dj <= cfg.armijo * s * slope:
            return s, dj
        s *= cfg.backtrack
    return None, 0.0


def minimize(model, start: Field, cfg: SolverConfig | None = None) -> CriticalPoint:
    """Preconditioned steepest descent with Armijo backtracking.

    Trial steps start from the Barzilai-Borwein length of the previous
    iteration.  Stops when the dual residual drops below ``grad_tol``,
    after ``max_iters`` iterations, or when no step passes the line search.

    Raises
    ------
    NumericalFailure
        On a non-finite energy or gradient, or if an accepted step raised
        the energy.
    """
    cfg = cfg or SolverConfig()
    a = np.array(start.coeffs, dtype=float)
    energy = model.energy(a)
    _finite(energy, "initial energy")
    g = model.gradient(a)
    history = [energy]
    s0 = cfg.initial_step
    converged = False
    it = 0
    for it in range(cfg.max_iters + 1):
        _finite(g, "gradient", iteration=it)
        r = model.dual_norm(g)
        if r < cfg.grad_tol:
            converged = True
            break
        if it == cfg.max_iters:
            break
        d = -g / model.sqrt_eigs
        slope = float(g @ d)
        s, dj = _armijo(model, a, d, slope, s0, cfg)
        if s is None:
            log.info("line search stalled at residual %.3e", r)
            break
        if dj > 0:
            raise NumericalFailure("energy increased on an accepted step", iteration=it, change=dj)
        a_new = a + s * d
        g_new = model.gradient(a_new)
        energy = model.energy(a_new)
        _finite(energy, "energy", iteration=it)
        history.append(energy)
        s0 = _bb_step(model, a_new - a, g_new - g, cfg.initial_step)
        a, g = a_new, g_new
    energy = model.energy(a)
    r = model.dual_norm(g)
    u = Field(model.basis, a)
    return CriticalPoint(u, energy, r, classify(model, a, energy, cfg), it, converged, tuple(history))


def warm_start(model, lz: LambdaZero | None = None) -> Field:
    """Projected cone with ``Psi > 0``, the seed for :func:`minimize`.

    The ``lambda_zero`` witness cone is tried first.  If its projection
    loses positivity, the cone height is rescaled over a log grid and then
    the :func:`find_psi_witness` cone is tried.

    Raises
    ------
    NoWitnessError
        If no cone with ``Psi > 0`` is found.
    """
    domain = model.basis.domain
    if lz is None:
        lz = lambda_zero(model.nonlinearity, model.weight, domain)
    candidates = [lz.params]
    for scale in np.geomspace(0.1, 10.0, 21):
        p = lz.params
        candidates.append(ConeParams(p.x0, p.tau, p.sigma, p.t * float(scale)))
    try:
        pw = find_psi_witness(model.nonlinearity, model.weight, domain)
        candidates.append(ConeParams(tuple(domain.center), domain.inradius, pw.sigma, pw.t))
    except NoWitnessError:
        pass
    for p in candidates:
        u = project(cone_field(p, model.grid), model.grid, model.basis)
        if model.psi_value(u.coeffs) > 0:
            return u
    raise NoWitnessError("no projected cone with positive potential")


def _h_norm(model, v):
    return math.sqrt(float(np.sum(v * v * model.sqrt_eigs)))


def _redistribute(model, path):
    """Re-space the path evenly in H-arclength, keeping both endpoints."""
    seg = np.sqrt(np.sum(np.diff(path, axis=0) ** 2 * model.sqrt_eigs, axis=1))
    s = np.concatenate([[0.0], np.cumsum(seg)])
    if s[-1] <= 0:
        return path
    s /= s[-1]
    target = np.linspace(0.0, 1.0, len(path))
    out = np.empty_like(path)
    for k in range(path.shape[1]):
        out[:, k] = np.interp(target, s, path[:, k])
    out[0], out[-1] = path[0], path[-1]
    return out


def valley_endpoint(model, a_star, points: int = 2001):
    """Shorten the segment ``0 -> a_star`` to ``e = s_e a_star``.

    ``s_e`` is the first ray parameter past the ray maximum where the energy
    is at most minus that maximum, so the path's barrier sits well inside.
    """
    s = np.unique(np.concatenate([np.geomspace(1e-6, 1.0, points), np.linspace(0.0, 1.0, points)]))
    U = np.multiply.outer(s, model.values(a_star))
    E = 0.5 * s**2 * float(np.sum(a_star**2 * model.sqrt_eigs)) - model.lam * (model.nonlinearity.F(U) @ model.wbeta)
    _finite(E, "ray energy")
    k = int(np.argmax(E))
    if k == 0 or E[k] <= 0:
        raise DegenerateGeometryError("no positive energy barrier along the ray to the valley point")
    after = np.nonzero((s > s[k]) & (E <= -E[k]))[0]
    se = float(s[after[0]]) if after.size else 1.0
    return se * a_star, float(s[k]), float(E[k])


def mountain_pass(model, w_star: CriticalPoint, cfg: SolverConfig | None = None) -> CriticalPoint:
    """Mountain-pass point between ``0`` and the valley point ``w_star``.

    Phase A deforms a ``path_points``-point path: each iteration takes an
    Armijo descent step at the path maximum (endpoints fixed) and every
    ``redistribute_every`` iterations the path is re-spaced by arclength.
    It ends once the residual at the maximum falls below ``phase_switch``
    times its starting value.  Phase B refines that point by alternating a
    maximisation along the path tangent with a descent step orthogonal to
    it, until the dual residual is below ``grad_tol``.

    Raises
    ------
    DegenerateGeometryError
        If ``w_star`` has non-negative energy, or the path maximum reaches
        an endpoint.
    NumericalFailure
        On non-finite values.
    """
    cfg = cfg or SolverConfig()
    if not w_star.energy < 0:
        raise DegenerateGeometryError(f"valley point has energy {w_star.energy!r} >= 0")
    end, _, _ = valley_endpoint(model, np.asarray(w_star.u.coeffs))
    P = cfg.path_points
    path = np.outer(np.linspace(0.0, 1.0, P), end)
    E = np.array([model.energy(p) for p in path])
    _finite(E, "path energy")
    history = []

    # phase A: path deformation
    r0 = None
    it = 0
    for it in range(cfg.phase_a_iters):
        m = int(np.argmax(E))
        if m == 0 or m == P - 1:
            raise DegenerateGeometryError(f"path maximum moved to endpoint {m}")
        a = path[m]
        g = model.gradient(a)
        _finite(g, "gradient", iteration=it)
        r = model.dual_norm(g)
        history.append(E[m])
        r0 = r if r0 is None else r0
        if r < cfg.phase_switch * r0 or r < cfg.grad_tol:
            break
        d = -g / model.sqrt_eigs
        s, _ = _armijo(model, a, d, float(g @ d), cfg.initial_step, cfg)
        if s is None:
            break
        path[m] = a + s * d
        E[m] = model.energy(path[m])
        if it % cfg.redistribute_every == cfg.redistribute_every - 1:
            path = _redistribute(model, path)
            E = np.array([model.energy(p) for p in path])
            _finite(E, "path energy", iteration=it)
    m = int(np.argmax(E))
    if m == 0 or m == P - 1:
        raise DegenerateGeometryError(f"path maximum moved to endpoint {m}")
    a = path[m].copy()
    tangent = path[m + 1] - path[m - 1]
    tangent /= _h_norm(model, tangent)

    # phase B: maximise along the tangent, descend across it
    s0 = cfg.initial_step
    converged = False
    k = 0
    g = model.gradient(a)
    for k in range(cfg.max_iters):
        width = 0.1 * max(_h_norm(model, a), cfg.grad_tol)
        line = optimize.minimize_scalar(lambda t: -model.energy(a + t * tangent),
                                        bracket=(-width, 0.0, width), method="brent", tol=1e-12)
        if math.isfinite(line.fun) and -line.fun >= model.energy(a):
            a = a + line.x * tangent
        g = model.gradient(a)
        _finite(g, "gradient", iteration=it + k)
        r = model.dual_norm(g)
        if r < cfg.grad_tol:
            converged = True
            break
        G = g / model.sqrt_eigs
        d = -(G - float(g @ tangent) * tangent)
        slope = float(g @ d)
        if slope >= 0:
            break
        s, _ = _armijo(model, a, d, slope, s0, cfg)
        if s is None:
            break
        a_new = a + s * d
        g_new = model.gradient(a_new)
        s0 = _bb_step(model, a_new - a, g_new - g, cfg.initial_step)
        a = a_new
        history.append(model.energy(a))
    energy = model.energy(a)
    _finite(energy, "energy")
    r = model.dual_norm(model.gradient(a))
    kind = classify(model, a, energy, cfg)
    if kind != TRIVIAL and energy > 0:
        kind = MOUNTAIN_PASS
    return CriticalPoint(Field(model.basis, a), energy, r, kind, it + k + 1, converged and r < cfg.grad_tol,
                         tuple(history))


def _stage(name, fn, *args):
    try:
        return fn(*args)
    except (NumericalFailure, DegenerateGeometryError, NoWitnessError) as exc:
        raise SolverStageError(name, exc) from exc


def solve_both(model, cfg: SolverConfig | None = None, lz: LambdaZero | None = None,
               thresholds: dict | None = None) -> SolveReport:
    """Warm start, minimise, then find the mountain-pass point.

    When ``check_nonexistence`` certifies that only ``u = 0`` solves the
    problem, the report holds just the trivial point and the certificate.

    Raises
    ------
    SolverStageError
        Wrapping the failure of ``warm_start``, ``minimize`` or
        ``mountain_pass``; ``stage`` names the step.
    """
    cfg = cfg or SolverConfig()
    timings = {}
    thresholds = dict(thresholds or {})
    summary = model.describe()
    cert = check_nonexistence(model)
    thresholds.setdefault("nonexistence_product", cert.product)
    if cert.certified:
        zero = Field.zeros(model.basis)
        pt = CriticalPoint(zero, 0.0, model.dual_norm(model.gradient(zero.coeffs)), TRIVIAL, 0)
        return SolveReport(summary, thresholds, [pt], {}, timings, cfg.seed, "trivial-only",
                           {"certified": True, "margin": cert.margin, "c_f": cert.c_f})

    t = time.perf_counter()
    seed = _stage("warm_start", warm_start, model, lz)
    timings["warm_start"] = time.perf_counter() - t

    t = time.perf_counter()
    first = _stage("minimize", minimize, model, seed, cfg)
    timings["minimize"] = time.perf_counter() - t
    points = [first]
    if first.kind != MINIMIZER:
        return SolveReport(summary, thresholds, points, {}, timings, cfg.seed, f"minimize-ended-{first.kind}")

    t = time.perf_counter()
    second = _stage("mountain_pass", mountain_pass, model, first, cfg)
    timings["mountain_pass"] = time.perf_counter() - t
    points.append(second)
    dist = {"minimizer-mountain_pass": h_distance(first.u, second.u)}
    ok = (first.converged and second.converged and second.kind == MOUNTAIN_PASS
          and dist["minimizer-mountain_pass"] > cfg.separation)
    return SolveReport(summary, thresholds, points, dist, timings, cfg.seed,
                       "two-solutions" if ok else "incomplete")


__all__ = [
    "SolverConfig", "CriticalPoint", "SolveReport", "h_distance", "classify", "minimize", "warm_start",
    "valley_endpoint", "mountain_pass", "solve_both", "TRIVIAL", "MINIMIZER", "MOUNTAIN_PASS", "UNCLASSIFIED",
]
