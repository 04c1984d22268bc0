"""Nonlinear terms ``f``, their primitives ``F`` and finite hypothesis checks.

The limits ``f(t)/t -> 0`` at zero and at infinity cannot be certified from
finitely many samples.  They are checked on declared sample points, and the
points travel with the object (:attr:`Nonlinearity.checks`) so reports can
state exactly what was verified.
"""

from __future__ import annotations

import csv
import dataclasses
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import optimize
from scipy.interpolate import CubicSpline

from .domain import gauss_legendre
from .errors import UndefinedCfError

_THETA, _THETA_W = gauss_legendre(0.0, 1.0, 10)


@dataclass(frozen=True)
class HypothesisGrid:
    zero_points: tuple = (1e-3, 1e-4, 1e-5, 1e-6)
    inf_points: tuple = (1e3, 1e4, 1e5, 1e6)
    eps: float = 1e-2
    sign_range: float = 1e4


@dataclass(frozen=True)
class Nonlinearity:
    """The pair ``(f, F)`` with ``F(0) = 0``.  Both callables take and return arrays."""

    name: str
    f: Callable
    F: Callable
    grid: HypothesisGrid = field(default_factory=HypothesisGrid)
    c_f_cache: float | None = None
    params: dict = field(default_factory=dict)
    checks: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        F0 = float(np.asarray(self.F(np.zeros(1)))[0])
        if F0 != 0.0:
            raise ValueError(f"primitive must vanish at 0, got F(0) = {F0!r}")
        if not self.checks:
            object.__setattr__(self, "checks", check_hypotheses(self.f, self.F, self.grid))
        if self.c_f_cache is not None:
            t = _verification_points(self.grid)
            ratio = np.abs(self.f(t)) / np.abs(t)
            if np.any(ratio > self.c_f_cache * (1 + 1e-9)):
                raise ValueError("c_f_cache does not bound |f(t)|/|t| on the verification grid")

    @property
    def superlinear_at_zero(self) -> bool:
        return self.checks["superlinear_at_zero"]

    @property
    def sublinear_at_infinity(self) -> bool:
        return self.checks["sublinear_at_infinity"]

    @property
    def sign_condition(self) -> bool:
        return self.checks["sign_condition"]

    def with_cf(self, value: float) -> "Nonlinearity":
        return dataclasses.replace(self, c_f_cache=float(value))

    def describe(self) -> dict:
        out = {"name": self.name, **{k: v for k, v in self.checks.items()}}
        out["hypothesis_grid"] = dataclasses.asdict(self.grid)
        if self.params:
            out["params"] = dict(self.params)
        if self.c_f_cache is not None:
            out["c_f"] = self.c_f_cache
        return out


def _verification_points(grid):
    t = np.geomspace(1e-6, grid.sign_range, 2001)
    return np.concatenate([t, -t])


def _ratio_decays(f, points, eps):
    for sign in (1.0, -1.0):
        t = sign * np.asarray(points, dtype=float)
        r = np.abs(np.asarray(f(t), dtype=float)) / np.abs(t)
        if not np.all(np.isfinite(r)):
            return False
        if np.any(np.diff(r) > 1e-12 * np.maximum(r[:-1], 1e-300)) or r[-1] >= eps:
            return False
    return True


def check_hypotheses(f, F, grid: HypothesisGrid) -> dict:
    zero = sorted(grid.zero_points, reverse=True)
    inf = sorted(grid.inf_points)
    t = np.geomspace(1e-6, grid.sign_range, 2001)
    t = np.concatenate([t, -t])
    return {
        "superlinear_at_zero": bool(_ratio_decays(f, zero, grid.eps)),
        "sublinear_at_infinity": bool(_ratio_decays(f, inf, grid.eps)),
        "sign_condition": bool(np.any(np.asarray(F(t)) > 0)),
    }


def primitive_by_quadrature(f: Callable, panels: int = 16) -> Callable:
    """Vectorised ``F(t) = t * int_0^1 f(theta t) dtheta`` by composite Gauss-Legendre."""
    edges = np.linspace(0.0, 1.0, panels + 1)
    theta = np.concatenate([edges[i] + (edges[i + 1] - edges[i]) * _THETA for i in range(panels)])
    wts = np.concatenate([(edges[i + 1] - edges[i]) * _THETA_W for i in range(panels)])

    def F(t):
        t = np.asarray(t, dtype=float)
        vals = f(np.multiply.outer(t, theta))
        return t * (vals @ wts)

    return F


def _log_square_f(t):
    t = np.asarray(t, dtype=float)
    return np.log1p(t * t)


def _log_square_F(t):
    t = np.asarray(t, dtype=float)
    return 2.0 * np.arctan(t) + t * np.log1p(t * t) - 2.0 * t


def _zero(t):
    return np.zeros_like(np.asarray(t, dtype=float))


def from_callable(f, F=None, name="custom", grid=None, **params) -> Nonlinearity:
    """Wrap a vectorised ``f``; ``F`` defaults to :func:`primitive_by_quadrature`."""
    if F is None:
        F = primitive_by_quadrature(f)
    return Nonlinearity(name, f, F, grid or HypothesisGrid(), params=params)


def from_table(t, values, name="custom", grid=None, **params) -> Nonlinearity:
    """Cubic-spline ``f`` through the samples, held constant outside the table.

    ``F`` is the exact antiderivative of that interpolant.
    """
    t = np.asarray(t, dtype=float)
    values = np.asarray(values, dtype=float)
    order = np.argsort(t)
    t, values = t[order], values[order]
    if not t[0] <= 0.0 <= t[-1]:
        raise ValueError("the table must bracket t = 0")
    spline = CubicSpline(t, values)
    prim = spline.antiderivative()
    lo, hi = t[0], t[-1]
    p0 = float(prim(0.0))
    flo, fhi = float(spline(lo)), float(spline(hi))

    def f(x):
        x = np.asarray(x, dtype=float)
        return spline(np.clip(x, lo, hi))

    def F(x):
        x = np.asarray(x, dtype=float)
        xc = np.clip(x, lo, hi)
        tail = np.where(x > hi, fhi * (x - hi), 0.0) + np.where(x < lo, flo * (x - lo), 0.0)
        return prim(xc) - p0 + tail

    return Nonlinearity(name, f, F, grid or HypothesisGrid(), params=params)


def read_table(path):
    """Read ``(t, f(t))`` rows from a CSV file; a non-numeric first row is a header."""
    ts, fs = [], []
    with open(path, newline="") as fh:
        for i, row in enumerate(csv.reader(fh)):
            if not row:
                continue
            try:
                ts.append(float(row[0]))
                fs.append(float(row[1]))
            except ValueError:
                if i == 0:
                    continue
                raise
    return np.array(ts), np.array(fs)


def builtin(name: str, params: dict | None = None) -> Nonlinearity:
    """Named nonlinearities.

    ``log-square``
        ``f(t) = log(1 + t^2)``, ``F(t) = 2 arctan t + t log(1 + t^2) - 2t``.
    ``zero``
        ``f = 0``.
    ``custom``
        ``params`` holds either ``table`` (a CSV path) or ``t`` and ``f``
        arrays; see :func:`from_table`.
    """
    params = dict(params or {})
    if name == "log-square":
        return Nonlinearity("log-square", _log_square_f, _log_square_F)
    if name == "zero":
        return Nonlinearity("zero", _zero, _zero)
    if name == "custom":
        if "table" in params:
            t, vals = read_table(params["table"])
            return from_table(t, vals, table=str(params["table"]))
        if "t" in params and "f" in params:
            return from_table(params["t"], params["f"])
        raise ValueError("custom nonlinearity needs a 'table' path or 't'/'f' samples")
    raise ValueError(f"unknown nonlinearity {name!r}")


def positive_part(g: Nonlinearity) -> Nonlinearity:
    """``f_+ = f`` on ``t >= 0`` and ``0`` below; ``F_+`` its primitive."""

    def f_plus(t):
        t = np.asarray(t, dtype=float)
        return np.where(t >= 0, g.f(np.maximum(t, 0.0)), 0.0)

    def F_plus(t):
        t = np.asarray(t, dtype=float)
        return np.where(t >= 0, g.F(np.maximum(t, 0.0)), 0.0)

    return Nonlinearity(g.name + "+", f_plus, F_plus, g.grid, params=dict(g.params))


@dataclass(frozen=True)
class CfEstimate:
    value: float
    argmax: float
    t_max: float
    grid: int


def estimate_cf(g: Nonlinearity, t_max: float = 1e4, grid: int = 4000) -> CfEstimate:
    """Estimate ``c_f = max_{t != 0} |f(t)| / |t|``.

    Scans a log-spaced grid on ``[1e-6, t_max]`` for both signs, then refines
    the best cell by golden-section search.  Ties go to positive ``t``.

    Raises
    ------
    UndefinedCfError
        When ``f`` vanishes on the whole grid.
    ValueError
        When ``f`` fails the sublinearity check (the supremum may be infinite).
    """
    if not t_max > 1e-6:
        raise ValueError("t_max must exceed the 1e-6 lower scan limit")
    if not g.sublinear_at_infinity:
        raise ValueError(f"{g.name}: f(t)/t does not decay at infinity, c_f may be unbounded")
    t = np.geomspace(1e-6, t_max, int(grid))
    best = (-1.0, 0.0)
    for sign in (1.0, -1.0):
        ts = sign * t
        ratio = np.abs(g.f(ts)) / t
        i = int(np.argmax(ratio))
        val = float(ratio[i])
        if 0 < i < len(t) - 1:
            # golden-section on log|t| inside the bracketing cell
            def neg(s, sign=sign):
                x = sign * np.exp(s)
                return -float(np.abs(g.f(np.array([x]))[0]) / abs(x))

            s_lo, s_mid, s_hi = np.log(t[i - 1]), np.log(t[i]), np.log(t[i + 1])
            try:
                res = optimize.minimize_scalar(neg, bracket=(s_lo, s_mid, s_hi), method="golden",
                                               options={"xtol": 1e-12})
                if -res.fun > val and s_lo <= res.x <= s_hi:
                    val, ts_i = float(-res.fun), sign * float(np.exp(res.x))
                else:
                    ts_i = float(ts[i])
            except ValueError:
                ts_i = float(ts[i])
        else:
            ts_i = float(ts[i])
        if val > best[0]:
            best = (val, ts_i)
    if best[0] <= 0.0:
        raise UndefinedCfError(f"{g.name}: f vanishes on the scan range")
    return CfEstimate(best[0], best[1], float(t_max), int(grid))


def find_sign_witness(g: Nonlinearity, t_max: float = 1e4, n: int = 2000) -> float | None:
    """Some ``t`` with ``F(t) > 0``, or ``None`` if the scan finds none.

    Among the positive values found, the one maximising ``F(t)/t^2`` is
    returned; this is the natural plateau height for cone test functions.
    """
    t = np.geomspace(1e-6, t_max, n)
    best, arg = 0.0, None
    for sign in (1.0, -1.0):
        ts = sign * t
        Fv = np.asarray(g.F(ts), dtype=float)
        score = np.where(Fv > 0, Fv / ts**2, -np.inf)
        i = int(np.argmax(score))
        if score[i] > best:
            best, arg = float(score[i]), float(ts[i])
    return arg


def max_abs_primitive(g: Nonlinearity, t_bar, n: int = 10_000) -> np.ndarray:
    """``max_{|t| <= |t_bar|} |F(t)|`` by a dense scan plus endpoint values."""
    t_bar = np.abs(np.atleast_1d(np.asarray(t_bar, dtype=float)))
    out = np.empty_like(t_bar)
    u = np.linspace(-1.0, 1.0, n)
    for i, tb in enumerate(t_bar):
        pts = np.concatenate([u * tb, [-tb, tb]])
        out[i] = np.max(np.abs(g.F(pts)))
    return out
