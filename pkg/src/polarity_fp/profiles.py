"""Built-in initial-condition families for simulation runs.

All builders return a Field whose trapezoid mass equals the requested mass
exactly, so conservation checks and entropy references are tight from step
zero.  The step family (smoothed indicator hugging the left wall) is the
natural way to land in the blow-up regime: it is decreasing, carries a large
trace gap, and keeps the shifted first moment small.
"""

from __future__ import annotations

import numpy as np

from .errors import ConfigError
from .grid import Field, Grid, mass, read_field_csv

__all__ = [
    "PROFILE_NAMES",
    "gaussian_profile",
    "tilted_profile",
    "step_profile",
    "linear_profile",
    "custom_csv_profile",
    "blended_profile",
    "exchange_split",
]

PROFILE_NAMES = (
    "gaussian_stationary",
    "asymmetric_stationary",
    "step",
    "linear",
    "custom_csv",
)


def _normalized(shape: np.ndarray, M: float, grid: Grid) -> Field:
    m = float(np.dot(grid.weights, shape))
    if not m > 0.0:
        raise ValueError("profile shape has non-positive mass")
    return Field((M / m) * shape, grid)


def gaussian_profile(M: float, grid: Grid) -> Field:
    """The symmetric stationary shape exp(-x^2/2), mass M."""
    return _normalized(np.exp(-grid.nodes**2 / 2.0), M, grid)


def tilted_profile(M: float, shift: float, grid: Grid) -> Field:
    """Stationary-family shape exp(-shift*x - x^2/2), mass M.

    This is the "asymmetric stationary" family: same functional form as the
    asymmetric states but with a freely chosen tilt, so it exists at every
    mass (an actual stationary state at mass M generally does not).
    """
    x = grid.nodes
    expo = -shift * x - x * x / 2.0
    return _normalized(np.exp(expo - np.max(expo)), M, grid)


def step_profile(M: float, width: float, steepness: float, grid: Grid) -> Field:
    """Smoothed indicator of [-1, -1 + width], mass M; strictly decreasing."""
    if not 0.0 < width <= 2.0:
        raise ValueError(f"step width must lie in (0, 2], got {width}")
    if not steepness > 0.0:
        raise ValueError(f"steepness must be positive, got {steepness}")
    edge = -1.0 + width
    shape = 1.0 / (1.0 + np.exp((grid.nodes - edge) / steepness))
    return _normalized(shape, M, grid)


def linear_profile(M: float, shift: float, grid: Grid) -> Field:
    """Affine profile proportional to 1 + shift*x, mass M; needs |shift| <= 1."""
    if abs(shift) > 1.0:
        raise ValueError(f"linear profile needs |shift| <= 1, got {shift}")
    return _normalized(1.0 + shift * grid.nodes, M, grid)


def custom_csv_profile(path, grid: Grid, M: float | None = None) -> Field:
    """Load a snapshot CSV, re-interpolating linearly if the mesh differs."""
    xs, cs = read_field_csv(path)
    if np.any(~np.isfinite(cs)) or np.any(cs < 0.0):
        raise ValueError(f"{path}: snapshot contains negative or non-finite values")
    if len(xs) == grid.n_cells + 1 and np.allclose(xs, grid.nodes, atol=1e-12):
        values = cs.copy()
    else:
        values = np.interp(grid.nodes, xs, cs)
    f = Field(values, grid)
    if M is not None:
        f = _normalized(values, M, grid)
    return f


def blended_profile(M: float, asym: float, grid: Grid,
                    width: float = 0.3, steepness: float = 0.05) -> Field:
    """Blend of the symmetric shape and the steep step, mass M.

    asym = 0 is the symmetric Gaussian, asym = 1 the pure step; used by the
    phase-diagram campaign as its one-parameter asymmetry axis.
    """
    if not 0.0 <= asym <= 1.0:
        raise ValueError(f"asym must lie in [0, 1], got {asym}")
    g = gaussian_profile(1.0, grid).values
    s = step_profile(1.0, width, steepness, grid).values
    return _normalized((1.0 - asym) * g + asym * s, M, grid)


def exchange_split(f: Field, total: float,
                   mu: tuple[float, float] | None = None):
    """Scale an interior profile into an exchange state of given total mass.

    Without explicit boundary masses the kinetic quasi-equilibrium
    mu_+- = c(+-1) is used (the model's stationary relation), and the whole
    state is scaled so that int c + mu_- + mu_+ = total.  With explicit mu
    the interior is scaled to the remaining budget.
    """
    m = mass(f)
    if mu is None:
        s = total / (m + float(f.values[0]) + float(f.values[-1]))
        interior = Field(s * f.values, f.grid)
        return interior, (float(interior.values[0]), float(interior.values[-1]))
    mu_l, mu_r = mu
    if mu_l < 0.0 or mu_r < 0.0:
        raise ValueError("boundary masses must be non-negative")
    remaining = total - mu_l - mu_r
    if not remaining > 0.0:
        raise ValueError(
            f"boundary masses {mu_l} + {mu_r} leave no interior mass of {total}"
        )
    return Field((remaining / m) * f.values, f.grid), (mu_l, mu_r)


def build_profile(name: str, grid: Grid, *, mass_value: float | None,
                  shift: float, width: float, steepness: float,
                  csv_path=None) -> Field:
    """Dispatch a named profile family (the RunConfig entry point)."""
    if name == "custom_csv":
        if csv_path is None:
            raise ConfigError("profile 'custom_csv' needs profile_csv")
        return custom_csv_profile(csv_path, grid, mass_value)
    if mass_value is None:
        raise ConfigError(f"profile {name!r} needs a mass")
    if name == "gaussian_stationary":
        return gaussian_profile(mass_value, grid)
    if name == "asymmetric_stationary":
        return tilted_profile(mass_value, shift, grid)
    if name == "step":
        return step_profile(mass_value, width, steepness, grid)
    if name == "linear":
        return linear_profile(mass_value, shift, grid)
    raise ConfigError(f"unknown profile {name!r}")
