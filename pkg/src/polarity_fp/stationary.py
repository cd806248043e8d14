"""Stationary states of both models and the mass-vs-alpha continuation curves.

Two families exist.  Symmetric states are Gaussian-shaped and exist for every
mass.  Asymmetric states are tilted exponentials

    G_a(x) = a / (1 - exp(-2a)) * exp(-a(x+1) - (x^2 - 1)/2),

whose trace gap G_a(-1) - G_a(1) equals a identically.  The attainable masses
M_a form an interval characterized only numerically: for the direct model M_a
decreases from M0 toward 1 as a grows, so asymmetric states exist exactly for
masses in (1, M0); for the exchange model M_a increases from M0_ex and grows
like a, so they exist for masses above M0_ex.  solve_alpha never assumes
monotonicity: it scans a log grid for sign changes and warns when the target
mass is bracketed more than once.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from .errors import RootFindError
from .grid import Field, Grid, mass

__all__ = [
    "StationaryState",
    "symmetric_state",
    "asymmetric_profile",
    "mass_of_alpha",
    "solve_alpha",
    "enumerate_states",
    "critical_mass",
    "gaussian_norm",
]

logger = logging.getLogger(__name__)

MODELS = ("direct", "exchange")

# Bracketing scan for solve_alpha (log grid; the mass curve is only known
# numerically, so no monotonicity is assumed).
SCAN_ALPHA_MIN = 1e-4
SCAN_ALPHA_MAX = 1e3
SCAN_POINTS = 281

# Below this |alpha| the prefactor a/(1-e^{-2a}) is evaluated by its series
# to avoid cancellation.
SERIES_ALPHA = 1e-8

QUAD_KW = dict(epsabs=1e-12, epsrel=1e-12, limit=200)


@dataclass
class StationaryState:
    """One stationary state: sampled profile plus its identifying data.

    For exchange-model states the boundary masses are the traces of ``field``
    (the stationary system forces mu_- = c(-1), mu_+ = c(1)); ``mass_total``
    includes them, while for the direct model it is just the field mass.
    """

    kind: str            # "symmetric" | "asymmetric"
    alpha: float         # 0.0 for symmetric states
    model: str           # "direct" | "exchange"
    field: Field
    mass_total: float


def _check_model(model: str) -> None:
    if model not in MODELS:
        raise ValueError(f"model must be one of {MODELS}, got {model!r}")


def _prefactor(alpha: float) -> float:
    """a / (1 - exp(-2a)), stable through a = 0 (limit 1/2)."""
    if abs(alpha) < SERIES_ALPHA:
        return 0.5 + alpha / 2.0 + alpha * alpha / 6.0
    return alpha / -math.expm1(-2.0 * alpha)


def _tilted_gaussian_integral(alpha: float) -> float:
    """Q(a) = integral of exp(-a(x+1) - (x^2-1)/2) over [-1, 1].

    Adaptive quadrature; for large |a| the integrand is a boundary layer, so
    the interval is split at the layer edge to keep the refinement cheap.
    """
    a = abs(alpha)

    def f(x, a=a):
        return math.exp(-a * (x + 1.0) - (x * x - 1.0) / 2.0)

    if a <= 10.0:
        val, _ = quad(f, -1.0, 1.0, **QUAD_KW)
        return val
    split = -1.0 + min(1.0, 30.0 / a)
    v1, _ = quad(f, -1.0, split, **QUAD_KW)
    v2, _ = quad(f, split, 1.0, **QUAD_KW)
    return v1 + v2


@lru_cache(maxsize=None)
def gaussian_norm() -> float:
    """Integral of exp(-y^2/2) over [-1, 1] (adaptive quadrature)."""
    val, _ = quad(lambda y: math.exp(-y * y / 2.0), -1.0, 1.0, **QUAD_KW)
    return val


@lru_cache(maxsize=None)
def critical_mass(model: str) -> float:
    """M0 of the model: the alpha -> 0 limit of the mass curve.

    direct:   (1/2) * integral exp(-(x^2-1)/2)
    exchange: 1 + the direct value
    """
    _check_model(model)
    m0 = 0.5 * _tilted_gaussian_integral(0.0)
    return m0 if model == "direct" else 1.0 + m0


def mass_of_alpha(alpha: float, model: str) -> float:
    """Mass carried by the asymmetric state with parameter alpha.

    direct:   M_a = prefactor(a) * Q(a)
    exchange: M_a = prefactor(a) * (2 + Q(a)) - a   (boundary masses included)

    Even in alpha (the -a state is the reflection of the +a state).
    """
    _check_model(model)
    if alpha == 0.0:
        raise ValueError("alpha must be nonzero; use critical_mass for the limit")
    pref = _prefactor(alpha)
    # Q is even in alpha: the integrand for -a is the reflection of the one
    # for +a.  Evaluating |alpha| keeps large negative tilts overflow-free.
    q = _tilted_gaussian_integral(alpha)
    if model == "direct":
        return pref * q
    return pref * (2.0 + q) - alpha


def symmetric_state(M: float, model: str, grid: Grid) -> StationaryState:
    """The symmetric stationary state with total mass M, sampled on grid.

    Normalization is discrete (trapezoid weights on this grid), so the field
    mass -- plus the two boundary masses in the exchange case -- equals M
    exactly and entropy references built from it have exactly matching mass.
    """
    _check_model(model)
    if not M > 0.0:
        raise ValueError(f"mass must be positive, got {M}")
    x = grid.nodes
    if model == "direct":
        shape = np.exp(-x * x / 2.0)
        norm = float(np.dot(grid.weights, shape))
    else:
        shape = np.exp(-(x * x - 1.0) / 2.0)
        # Boundary-bound mass sits at the traces: total = int c + c(-1) + c(1),
        # and the shape equals 1 at both endpoints.
        norm = float(np.dot(grid.weights, shape)) + 2.0
    values = (M / norm) * shape
    return StationaryState(
        kind="symmetric",
        alpha=0.0,
        model=model,
        field=Field(values, grid),
        mass_total=M,
    )


def asymmetric_profile(alpha: float, grid: Grid) -> Field:
    """Sample G_alpha exactly from the closed form (both models share it).

    The trace identity G_a(-1) - G_a(1) = a holds analytically; sampling the
    closed form (never renormalizing) preserves it to roundoff.  Negative
    alpha is sampled as the reflection of the positive-alpha profile, which
    is the same function and avoids overflow in exp.
    """
    if alpha == 0.0:
        raise ValueError("alpha must be nonzero; use symmetric_state instead")
    if alpha < 0.0:
        pos = asymmetric_profile(-alpha, grid)
        return Field(pos.values[::-1].copy(), grid)
    x = grid.nodes
    pref = _prefactor(alpha)
    values = pref * np.exp(-alpha * (x + 1.0) - (x * x - 1.0) / 2.0)
    return Field(values, grid)


def _scan_brackets(target: float, model: str) -> list[tuple[float, float]]:
    """Sign-change brackets of M_alpha - target on the log scan grid."""
    alphas = np.geomspace(SCAN_ALPHA_MIN, SCAN_ALPHA_MAX, SCAN_POINTS)
    vals = np.array([mass_of_alpha(a, model) - target for a in alphas])
    brackets = []
    for i in range(len(alphas) - 1):
        lo, hi = vals[i], vals[i + 1]
        if lo == 0.0:
            brackets.append((alphas[i], alphas[i]))
        elif lo * hi < 0.0:
            brackets.append((alphas[i], alphas[i + 1]))
    return brackets


def solve_alpha(M: float, model: str) -> float | None:
    """The positive alpha with mass_of_alpha(alpha) == M, or None.

    None means M lies outside the attainable set (direct: outside (1, M0);
    exchange: at or below M0_ex).  A root that provably exists but escapes
    the scan window raises instead of silently returning None.
    """
    _check_model(model)
    if not M > 0.0:
        raise ValueError(f"mass must be positive, got {M}")
    brackets = _scan_brackets(M, model)
    if not brackets:
        if model == "exchange" and M > critical_mass("exchange"):
            # M_alpha ~ alpha at infinity, so a root exists beyond the scan.
            raise RootFindError(
                f"exchange-model root for M={M} lies beyond the scan window "
                f"[{SCAN_ALPHA_MIN}, {SCAN_ALPHA_MAX}]"
            )
        return None
    if len(brackets) > 1:
        logger.warning(
            "mass_of_alpha - M has %d brackets for M=%g (%s model); "
            "returning the root in the first one",
            len(brackets), M, model,
        )
    lo, hi = brackets[0]
    if lo == hi:
        return float(lo)
    try:
        root = brentq(
            lambda a: mass_of_alpha(a, model) - M,
            lo, hi, xtol=1e-12, rtol=4 * np.finfo(float).eps, maxiter=200,
        )
    except (ValueError, RuntimeError) as exc:
        raise RootFindError(
            f"root refinement failed in [{lo}, {hi}] for M={M} ({model})"
        ) from exc
    return float(root)


def enumerate_states(M: float, model: str, grid: Grid) -> list[StationaryState]:
    """All stationary states at mass M: the symmetric one, plus G_{+-a} if any."""
    states = [symmetric_state(M, model, grid)]
    alpha = solve_alpha(M, model)
    if alpha is not None:
        for a in (alpha, -alpha):
            f = asymmetric_profile(a, grid)
            if model == "direct":
                total = mass(f)
            else:
                total = mass(f) + float(f.values[0]) + float(f.values[-1])
            states.append(
                StationaryState(
                    kind="asymmetric", alpha=a, model=model,
                    field=f, mass_total=total,
                )
            )
    return states
