"""Numerical laboratory for a non-local Fokker-Planck model of cell polarity.

Simulates the boundary-trace-coupled drift-diffusion model and its
attachment/detachment variant on (-1, 1), solves for all stationary states
under a mass constraint, and evaluates the entropy-method diagnostics
(relative entropy, Fisher information, Lyapunov functional, dissipation)
that certify the models' decay and blow-up behaviour.
"""

__version__ = "0.1.0"

from .diagnostics import (
    DiagnosticsRecord,
    ck_gap,
    decay_rate_fit,
    dissipation,
    fisher_information,
    gamma_c,
    lsi_gap,
    lyapunov,
    make_record,
    relative_entropy,
)
from .dynamics import (
    BlowupHypothesesReport,
    ModelParams,
    SimOutcome,
    StepperConfig,
    alpha_of,
    check_blowup_hypotheses,
    detect_blowup,
    drift_at,
    simulate,
    step,
)
from .errors import ConfigError, LinearSolveError, PolarityError, RootFindError
from .exchange import ExchangeState, exchange_simulate, exchange_step
from .grid import (
    Field,
    Grid,
    boundary_traces,
    build_grid,
    first_moment,
    l1_distance,
    mass,
    shifted_moment,
)
from .stationary import (
    StationaryState,
    asymmetric_profile,
    critical_mass,
    enumerate_states,
    mass_of_alpha,
    solve_alpha,
    symmetric_state,
)

__all__ = [
    "__version__",
    "Grid", "Field", "build_grid", "mass", "first_moment", "shifted_moment",
    "boundary_traces", "l1_distance",
    "ModelParams", "StepperConfig", "SimOutcome", "BlowupHypothesesReport",
    "alpha_of", "drift_at", "step", "simulate", "detect_blowup",
    "check_blowup_hypotheses",
    "ExchangeState", "exchange_step", "exchange_simulate",
    "StationaryState", "symmetric_state", "asymmetric_profile",
    "mass_of_alpha", "solve_alpha", "enumerate_states", "critical_mass",
    "DiagnosticsRecord", "relative_entropy", "fisher_information", "gamma_c",
    "lyapunov", "dissipation", "ck_gap", "lsi_gap", "decay_rate_fit",
    "make_record",
    "PolarityError", "ConfigError", "LinearSolveError", "RootFindError",
]
