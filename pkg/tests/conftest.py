import math

import pytest

from halflap.domain import Domain, build_basis, build_quadrature, sufficient_points
from halflap.energy import EnergyModel, Weight
from halflap.nonlinearity import builtin, estimate_cf
from halflap.thresholds import lambda_zero

# independent high-precision values (mpmath root finding on the stationarity
# conditions), frozen here so the package is never its own oracle
LOG_SQUARE_CF = 0.8047423425494118112
LOG_SQUARE_CF_ARGMAX = 1.9802913004322129508
LOG_SQUARE_MIN_RATIO = 2.6403954060307952296
LOG_SQUARE_MIN_RATIO_ARG = 3.1763835687538241427
MIN_Z = {2: 27.687533870877859970, 3: 59.142378731024468393, 4: 102.36854837452107974,
         5: 157.36692448171393085}


@pytest.fixture(scope="session")
def square():
    return Domain.rectangle(math.pi, math.pi)


@pytest.fixture(scope="session")
def log_square():
    g = builtin("log-square")
    return g.with_cf(estimate_cf(g).value)


@pytest.fixture(scope="session")
def square_basis(square):
    return build_basis(square, 64)


@pytest.fixture(scope="session")
def square_grid(square, square_basis):
    return build_quadrature(square, sufficient_points(square_basis))


@pytest.fixture(scope="session")
def lz_square(square, log_square):
    return lambda_zero(log_square, Weight.constant(1.0), square)


@pytest.fixture(scope="session")
def square_model(square_basis, square_grid, log_square):
    return EnergyModel(square_basis, square_grid, Weight.constant(1.0), log_square, 1.0)
