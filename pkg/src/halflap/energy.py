"""The energy ``J = Phi - lambda * Psi`` and its gradient in coefficient space.

``Phi(u) = 1/2 sum_j a_j^2 sqrt(lambda_j)`` is exact.  ``Psi(u) = int beta F(u)``
is evaluated by the model's quadrature grid, and the gradient is the exact
derivative of that discrete energy, so a zero of :func:`grad_j` is a
discrete weak solution.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.interpolate import griddata

from .domain import QuadratureGrid, SpectralBasis, gauss_legendre
from .errors import DomainMismatchError
from .fields import Field
from .nonlinearity import Nonlinearity

_SEG_T, _SEG_W = gauss_legendre(0.0, 1.0, 8)


@dataclass(frozen=True)
class Weight:
    """A coefficient ``beta`` with ``0 < essinf <= beta <= sup_norm``."""

    essinf: float
    sup_norm: float
    func: Callable | None = field(default=None, compare=False)
    kind: str = "constant"
    source: str | None = None

    def __post_init__(self):
        if not self.essinf > 0:
            raise ValueError(f"essinf beta must be positive, got {self.essinf!r}")
        if self.sup_norm < self.essinf:
            raise ValueError("sup_norm below essinf")

    @classmethod
    def constant(cls, value: float) -> "Weight":
        value = float(value)
        return cls(value, value, None, "constant")

    @classmethod
    def from_callable(cls, beta, grid: QuadratureGrid, essinf=None, sup_norm=None, kind="callable", source=None):
        """Sample ``beta`` on ``grid``; declared bounds off by more than 1% warn."""
        vals = np.asarray(beta(grid.nodes), dtype=float)
        lo, hi = float(vals.min()), float(vals.max())
        for label, declared, seen in (("essinf", essinf, lo), ("sup_norm", sup_norm, hi)):
            if declared is not None and abs(declared - seen) > 0.01 * abs(declared):
                warnings.warn(f"declared beta {label} {declared} differs from grid value {seen}", stacklevel=2)
        return cls(lo if essinf is None else float(essinf), hi if sup_norm is None else float(sup_norm),
                   beta, kind, source)

    @classmethod
    def from_table(cls, path, grid: QuadratureGrid) -> "Weight":
        """Scattered ``(x_1, .., x_n, value)`` rows, linearly interpolated onto ``grid``."""
        rows = []
        with open(path) as fh:
            for line in fh:
                parts = line.replace(",", " ").split()
                try:
                    rows.append([float(p) for p in parts])
                except ValueError:
                    continue
        data = np.array(rows)
        n = grid.domain.dim
        pts, vals = data[:, :n], data[:, n]

        def beta(x):
            x = np.asarray(x, dtype=float).reshape(-1, n)
            if n == 1:
                order = np.argsort(pts[:, 0])
                return np.interp(x[:, 0], pts[order, 0], vals[order])
            out = griddata(pts, vals, x, method="linear")
            near = griddata(pts, vals, x, method="nearest")
            return np.where(np.isnan(out), near, out)

        return cls.from_callable(beta, grid, kind="table", source=str(path))

    def values_on(self, grid: QuadratureGrid) -> np.ndarray:
        if self.func is None:
            return np.full(grid.size, self.essinf)
        return np.asarray(self.func(grid.nodes), dtype=float)

    def describe(self) -> dict:
        out = {"kind": self.kind, "essinf": self.essinf, "sup_norm": self.sup_norm}
        if self.source:
            out["source"] = self.source
        return out


class EnergyModel:
    """Basis, grid, weight, nonlinearity and ``lambda`` defining ``J_lambda``.

    Instances are treated as immutable; :meth:`with_lambda` shares the
    precomputed quadrature matrices.
    """

    def __init__(self, basis: SpectralBasis, grid: QuadratureGrid, weight: Weight,
                 nonlinearity: Nonlinearity, lam: float):
        if basis.domain != grid.domain:
            raise DomainMismatchError("basis and grid are on different domains")
        if not lam >= 0:
            raise ValueError(f"lambda must be non-negative, got {lam!r}")
        self.basis = basis
        self.grid = grid
        self.weight = weight
        self.nonlinearity = nonlinearity
        self.lam = float(lam)
        self.sqrt_eigs = basis.sqrt_eigenvalues
        self.phi_nodes = basis.evaluate(grid.nodes)
        self.beta_nodes = weight.values_on(grid)
        self.wbeta = grid.weights * self.beta_nodes
        if weight.func is not None:
            lo, hi = self.beta_nodes.min(), self.beta_nodes.max()
            if lo < weight.essinf * (1 - 1e-12) or hi > weight.sup_norm * (1 + 1e-12):
                raise ValueError("weight values leave [essinf, sup_norm] on the grid")
        for arr in (self.phi_nodes, self.beta_nodes, self.wbeta):
            arr.setflags(write=False)

    def with_lambda(self, lam: float) -> "EnergyModel":
        if not lam >= 0:
            raise ValueError(f"lambda must be non-negative, got {lam!r}")
        new = object.__new__(EnergyModel)
        new.__dict__.update(self.__dict__)
        new.lam = float(lam)
        return new

    def describe(self) -> dict:
        return {
            "domain": self.basis.domain.describe(),
            "modes": self.basis.size,
            "quad_points": self.grid.order,
            "weight": self.weight.describe(),
            "nonlinearity": self.nonlinearity.describe(),
            "lambda": self.lam,
        }

    # raw coefficient-vector kernels used by the solvers

    def values(self, a):
        return self.phi_nodes @ a

    def phi_value(self, a) -> float:
        return 0.5 * float(np.sum(a * a * self.sqrt_eigs))

    def psi_value(self, a) -> float:
        return float(np.dot(self.wbeta, self.nonlinearity.F(self.values(a))))

    def energy(self, a) -> float:
        return self.phi_value(a) - self.lam * self.psi_value(a)

    def gradient(self, a) -> np.ndarray:
        load = self.phi_nodes.T @ (self.wbeta * self.nonlinearity.f(self.values(a)))
        return self.sqrt_eigs * a - self.lam * load

    def dual_norm(self, g) -> float:
        return float(np.sqrt(np.sum(g * g / self.sqrt_eigs)))

    def energy_change(self, a, d, s: float) -> float:
        """``J(a + s d) - J(a)`` without subtracting two large energies.

        Per node, ``F(u + h) - F(u) = h * int_0^1 f(u + theta h) dtheta`` is
        used when ``|h| <= 1/4`` (8-point Gauss-Legendre in ``theta``); larger
        increments fall back to the direct difference.
        """
        u = self.values(a)
        h = s * self.values(d)
        dphi = float(np.sum((s * a * d + 0.5 * s * s * d * d) * self.sqrt_eigs))
        F, f = self.nonlinearity.F, self.nonlinearity.f
        small = np.abs(h) <= 0.25
        dF = np.empty_like(u)
        if np.any(small):
            us, hs = u[small], h[small]
            dF[small] = hs * (f(us[:, None] + hs[:, None] * _SEG_T[None, :]) @ _SEG_W)
        if not np.all(small):
            big = ~small
            dF[big] = F(u[big] + h[big]) - F(u[big])
        return dphi - self.lam * float(np.dot(self.wbeta, dF))


def phi(model: EnergyModel, u: Field) -> float:
    """Half the squared H_0^{1/2} norm."""
    return model.phi_value(u.coeffs)


def psi(model: EnergyModel, u: Field) -> float:
    """``int beta F(u)`` by quadrature."""
    return model.psi_value(u.coeffs)


def j_lambda(model: EnergyModel, u: Field) -> float:
    return model.energy(u.coeffs)


def grad_j(model: EnergyModel, u: Field) -> Field:
    """Coefficient gradient ``g_j = sqrt(lambda_j) a_j - lambda int beta f(u) phi_j``."""
    return Field(model.basis, model.gradient(u.coeffs))


def grad_norm_dual(model: EnergyModel, u: Field) -> float:
    """Norm of the derivative in the dual of H_0^{1/2}: ``(sum_j g_j^2 / sqrt(lambda_j))^(1/2)``."""
    return model.dual_norm(model.gradient(u.coeffs))


def dual_norm(model: EnergyModel, g: Field) -> float:
    return model.dual_norm(g.coeffs)


def default_model(domain, modes, nonlinearity, lam, weight=None, quad_points=None):
    """Convenience constructor using :func:`~halflap.domain.sufficient_points`."""
    from .domain import build_basis, build_quadrature, sufficient_points

    basis = build_basis(domain, modes)
    M = quad_points or sufficient_points(basis)
    grid = build_quadrature(domain, M)
    return EnergyModel(basis, grid, weight or Weight.constant(1.0), nonlinearity, lam)


__all__ = [
    "Weight", "EnergyModel", "phi", "psi", "j_lambda", "grad_j", "grad_norm_dual",
    "dual_norm", "default_model",
]
