"""Spectral half-Laplacian problems ``A_{1/2} u = lambda beta f(u)`` on boxes.

Submodules
----------
domain        eigenpairs of the Dirichlet Laplacian and quadrature grids
fields        coefficient fields, harmonic extension and cylinder norms
nonlinearity  ``f``, its primitive ``F`` and the constant ``c_f``
energy        the functional ``J_lambda`` and its gradient
thresholds    non-existence bound, cone bound ``lambda_zero``, ball constants
solvers       minimiser and mountain-pass searches
config, cli   TOML run files and the ``halflap`` command
"""

__version__ = "0.1.0"
