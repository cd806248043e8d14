"""Exception types shared across the package."""


class PolarityError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(PolarityError):
    """Invalid run configuration (carries a line/field-precise message)."""


class LinearSolveError(PolarityError):
    """The implicit tridiagonal solve failed; the run is not trustworthy."""


class RootFindError(PolarityError):
    """Root bracketing or refinement failed explicitly (no silent wrong root)."""
