"""Shared fixtures and independent oracles for the test suite.

The oracle helpers deliberately avoid the package's own quadrature and
root-finding paths: midpoint-rule integration at high resolution is the
reference every closed-form constant is checked against.
"""

from __future__ import annotations

import numpy as np
import pytest

from polarity_fp import ModelParams, build_grid


def midpoint_integral(f, a=-1.0, b=1.0, n=1_000_000) -> float:
    """Brute-force midpoint rule; the independent quadrature oracle."""
    h = (b - a) / n
    x = a + (np.arange(n) + 0.5) * h
    return float(np.sum(f(x)) * h)


# Frozen values computed with midpoint_integral at n = 1e6 (error < 1e-12):
#   Z0      = int_{-1}^{1} exp(-y^2/2) dy
#   M0_DIR  = (1/2) int_{-1}^{1} exp(-(x^2-1)/2) dx
Z0_ORACLE = 1.7112487837845003
M0_DIR_ORACLE = 1.4106861346426147
M0_EX_ORACLE = 2.4106861346426145
G1_TRACE_ORACLE = 0.3544374526135614      # exp(-1/2) / Z0
G1_CENTER_ORACLE = 0.5843685672567475     # 1 / Z0


@pytest.fixture(scope="session")
def grid1000():
    return build_grid(1000)


@pytest.fixture(scope="session")
def grid400():
    return build_grid(400)


@pytest.fixture(scope="session")
def canonical():
    return ModelParams()
