"""Coefficient-space functions on a domain and on its half-cylinder.

A :class:`Field` ``u = sum_j a_j phi_j`` lives in the span of the first J
Dirichlet eigenfunctions.  Its harmonic extension to ``Omega x (0, inf)`` is
``w = sum_j a_j phi_j exp(-sqrt(lambda_j) y)``; every y-integral of such
functions is elementary, so the cylinder is never discretised in ``y``.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .domain import QuadratureGrid, SpectralBasis
from .errors import DomainMismatchError


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Field:
    """``u = sum_j coeffs[j] * phi_j`` in H_0^{1/2}(Omega)."""

    basis: SpectralBasis
    coeffs: np.ndarray

    def __post_init__(self):
        c = _frozen(self.coeffs)
        if c.shape != (self.basis.size,):
            raise ValueError(f"expected {self.basis.size} coefficients, got shape {c.shape}")
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def zeros(cls, basis):
        return cls(basis, np.zeros(basis.size))

    @classmethod
    def mode(cls, basis, j, amplitude=1.0):
        a = np.zeros(basis.size)
        a[j] = amplitude
        return cls(basis, a)

    def _check(self, other):
        if other.basis is not self.basis:
            raise DomainMismatchError("fields live on different bases")

    def __add__(self, other):
        self._check(other)
        return Field(self.basis, self.coeffs + other.coeffs)

    def __sub__(self, other):
        self._check(other)
        return Field(self.basis, self.coeffs - other.coeffs)

    def __mul__(self, s):
        return Field(self.basis, float(s) * self.coeffs)

    __rmul__ = __mul__

    def __neg__(self):
        return Field(self.basis, -self.coeffs)


@dataclass(frozen=True, eq=False)
class ExtensionField:
    """``w(x, y) = sum_j coeffs[j] * phi_j(x) * exp(-sqrt(lambda_j) * y)``."""

    basis: SpectralBasis
    coeffs: np.ndarray

    def __post_init__(self):
        c = _frozen(self.coeffs)
        if c.shape != (self.basis.size,):
            raise ValueError(f"expected {self.basis.size} coefficients, got shape {c.shape}")
        object.__setattr__(self, "coeffs", c)

    def __call__(self, points, y):
        """Pointwise values at ``(x_m, y)``; ``y`` is a scalar or per-point array."""
        phi = self.basis.evaluate(points)
        decay = np.exp(-np.multiply.outer(np.asarray(y, dtype=float), self.basis.sqrt_eigenvalues))
        return np.sum(phi * decay * self.coeffs, axis=-1)


def h_half_norm(u: Field) -> float:
    """``(sum_j a_j^2 sqrt(lambda_j))^(1/2)``."""
    return float(np.sqrt(np.sum(u.coeffs**2 * u.basis.sqrt_eigenvalues)))


def h_half_inner(u: Field, v: Field) -> float:
    u._check(v)
    return float(np.sum(u.coeffs * v.coeffs * u.basis.sqrt_eigenvalues))


def l2_norm(u: Field) -> float:
    return float(np.linalg.norm(u.coeffs))


def apply_half_laplacian(u: Field) -> Field:
    return Field(u.basis, u.coeffs * u.basis.sqrt_eigenvalues)


def extend(u: Field) -> ExtensionField:
    return ExtensionField(u.basis, u.coeffs)


def trace(w: ExtensionField) -> Field:
    return Field(w.basis, w.coeffs)


def x_norm(w: ExtensionField, grid: QuadratureGrid | None = None, rtol: float = 1e-8) -> float:
    """Dirichlet norm of ``w`` on the half-cylinder.

    Without ``grid`` the closed form ``(sum_j b_j^2 sqrt(lambda_j))^(1/2)`` is
    returned.  With ``grid`` the quadrature route is evaluated as well and the
    two must agree to ``rtol``, otherwise ``ArithmeticError`` is raised.
    """
    closed = float(np.sqrt(np.sum(w.coeffs**2 * w.basis.sqrt_eigenvalues)))
    if grid is None:
        return closed
    quad = x_norm_quadrature(w, grid)
    if abs(quad - closed) > rtol * max(closed, 1e-300):
        raise ArithmeticError(
            f"x-norm routes disagree: closed form {closed!r}, quadrature {quad!r}"
        )
    return closed


def x_norm_quadrature(w: ExtensionField, grid: QuadratureGrid, kernel=None) -> float:
    """Dirichlet norm from x-quadrature and exact y-integrals.

    ``int |grad w|^2 = sum_ij b_i b_j (K_ij + s_i s_j G_ij) / (s_i + s_j)``
    with ``s = sqrt(lambda)``, ``G`` the quadrature mass matrix and ``K``
    the quadrature stiffness matrix of the eigenfunctions.  Pass ``kernel``
    from :func:`cylinder_kernel` to reuse it across many fields.
    """
    if kernel is None:
        kernel = cylinder_kernel(w.basis, grid)
    return float(np.sqrt(max(w.coeffs @ kernel @ w.coeffs, 0.0)))


def cylinder_kernel(basis: SpectralBasis, grid: QuadratureGrid) -> np.ndarray:
    G, K = gram_matrices(basis, grid)
    s = basis.sqrt_eigenvalues
    return (K + np.outer(s, s) * G) / np.add.outer(s, s)


def gram_matrices(basis: SpectralBasis, grid: QuadratureGrid):
    """Quadrature mass matrix ``int phi_i phi_j`` and stiffness ``int grad phi_i . grad phi_j``."""
    _same_domain(basis, grid)
    phi = basis.evaluate(grid.nodes)
    dphi = basis.gradient(grid.nodes)
    wphi = phi * grid.weights[:, None]
    G = phi.T @ wphi
    K = sum(dphi[:, :, d].T @ (dphi[:, :, d] * grid.weights[:, None]) for d in range(basis.domain.dim))
    return G, K


def lift_norm(u: Field, decay: float = 0.5) -> float:
    """Dirichlet norm of the separable lift ``exp(-decay * y) * u(x)``.

    This lift is not harmonic; its norm squared is
    ``sum_j a_j^2 (lambda_j + decay^2) / (2 decay)``, which dominates
    ``h_half_norm(u)**2`` for every ``decay > 0``.
    """
    if not decay > 0:
        raise ValueError("decay must be positive")
    lam = u.basis.eigenvalues
    return float(np.sqrt(np.sum(u.coeffs**2 * (lam + decay**2)) / (2 * decay)))


def _same_domain(basis, grid):
    if basis.domain != grid.domain:
        raise DomainMismatchError(f"basis on {basis.domain} but grid on {grid.domain}")


def sample_on_grid(u: Field, grid: QuadratureGrid) -> np.ndarray:
    """Values ``u(x_m)`` at every quadrature node."""
    _same_domain(u.basis, grid)
    return u.basis.evaluate(grid.nodes) @ u.coeffs


def project(values, grid: QuadratureGrid, basis: SpectralBasis) -> Field:
    """L2 projection by quadrature: ``a_j = sum_m w_m v_m phi_j(x_m)``."""
    _same_domain(basis, grid)
    values = np.asarray(values, dtype=float)
    if values.shape != (grid.size,):
        raise ValueError(f"expected {grid.size} nodal values, got shape {values.shape}")
    return Field(basis, basis.evaluate(grid.nodes).T @ (grid.weights * values))


def random_field(basis: SpectralBasis, rng, scale: float = 1.0) -> Field:
    """``a_j ~ U[-1, 1] / j`` (1-based ``j``), times ``scale``."""
    j = np.arange(1, basis.size + 1)
    return Field(basis, scale * rng.uniform(-1.0, 1.0, basis.size) / j)


def rayleigh_min(basis: SpectralBasis, trials: int, seed: int = 0, include_first_mode: bool = False) -> float:
    """Smallest ``||w||_X^2 / ||Tr w||_{L2}^2`` over random extension fields.

    Always ``>= sqrt(lambda_1)``; equal to it when the first mode is among
    the trials.
    """
    if trials < 1:
        raise ValueError("need at least one trial")
    rng = np.random.default_rng(seed)
    j = np.arange(1, basis.size + 1)
    b = rng.uniform(-1.0, 1.0, (trials, basis.size)) / j
    if include_first_mode:
        b[0] = 0.0
        b[0, 0] = 1.0
    num = np.sum(b**2 * basis.sqrt_eigenvalues, axis=1)
    den = np.sum(b**2, axis=1)
    return float(np.min(num / den))


def write_field_csv(path, u: Field) -> None:
    """One row per mode: the multi-index columns then the coefficient."""
    n = u.basis.domain.dim
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow([f"k{d + 1}" for d in range(n)] + ["coefficient"])
        for idx, a in zip(u.basis.indices, u.coeffs):
            wr.writerow([int(i) for i in idx] + [format(a, ".17g")])


def read_field_csv(path, basis: SpectralBasis) -> Field:
    lookup = {tuple(int(i) for i in idx): j for j, idx in enumerate(basis.indices)}
    a = np.zeros(basis.size)
    with open(path, newline="") as fh:
        rows = csv.reader(fh)
        next(rows)
        for row in rows:
            key = tuple(int(v) for v in row[:-1])
            if key not in lookup:
                raise ValueError(f"mode {key} is not part of the basis")
            a[lookup[key]] = float(row[-1])
    return Field(basis, a)


def write_samples_csv(path, u: Field, grid: QuadratureGrid) -> None:
    values = sample_on_grid(u, grid)
    n = grid.domain.dim
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow([f"x{d + 1}" for d in range(n)] + ["value"])
        for x, v in zip(grid.nodes, values):
            wr.writerow([format(c, ".17g") for c in x] + [format(v, ".17g")])
