"""Discrete geometry and quadrature on the interval [-1, 1].

The mesh is vertex-centered: unknowns live on the n_cells+1 nodes, which
include both endpoints.  The boundary traces c(-1), c(1) are therefore stored
values and never extrapolated, which matters because the model's non-local
drift is the trace gap itself.  The trapezoid weights (dx/2 at the endpoints,
dx inside) are exactly the control-volume sizes of the conservative flux
scheme used by the solvers, so quadrature and dynamics agree discretely.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

__all__ = [
    "Grid",
    "Field",
    "build_grid",
    "mass",
    "first_moment",
    "shifted_moment",
    "boundary_traces",
    "trace_gap",
    "l1_distance",
    "reflect",
    "write_field_csv",
    "read_field_csv",
]

# Tolerated relative undershoot before non-negativity counts as corruption.
NEGATIVITY_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class Grid:
    """Uniform vertex-centered mesh on [-1, 1] with trapezoid weights."""

    n_cells: int
    dx: float
    nodes: np.ndarray
    weights: np.ndarray

    def __eq__(self, other):
        return isinstance(other, Grid) and self.n_cells == other.n_cells

    def midpoints(self) -> np.ndarray:
        """Cell-interface positions (x_i + x_{i+1})/2, length n_cells."""
        return 0.5 * (self.nodes[:-1] + self.nodes[1:])


@dataclass
class Field:
    """Non-negative concentration values at the nodes of a Grid."""

    values: np.ndarray
    grid: Grid

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.grid.n_cells + 1,):
            raise ValueError(
                f"field has {self.values.shape[0]} values, "
                f"grid has {self.grid.n_cells + 1} nodes"
            )

    def copy(self) -> "Field":
        return Field(self.values.copy(), self.grid)

    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.values)))

    def min_ok(self) -> bool:
        """True unless some value undershoots -NEGATIVITY_TOL * max."""
        if self.values.size == 0:
            return True
        peak = float(np.max(np.abs(self.values)))
        return bool(np.min(self.values) >= -NEGATIVITY_TOL * max(peak, 1.0))


def build_grid(n_cells: int) -> Grid:
    """Build the uniform mesh with n_cells cells (n_cells even, >= 4).

    Nodes are computed as (2i - n)/n so that x_0 = -1, x_n = 1 and x_{n/2} = 0
    hold exactly in floating point, and the mesh is exactly symmetric
    (x_{n-i} == -x_i bitwise).
    """
    if not isinstance(n_cells, (int, np.integer)):
        raise TypeError(f"n_cells must be an integer, got {type(n_cells).__name__}")
    if n_cells < 4 or n_cells % 2 != 0:
        raise ValueError(f"n_cells must be even and >= 4, got {n_cells}")
    n = int(n_cells)
    dx = 2.0 / n
    nodes = (2.0 * np.arange(n + 1) - n) / n
    weights = np.full(n + 1, dx)
    weights[0] = weights[-1] = 0.5 * dx
    return Grid(n_cells=n, dx=dx, nodes=nodes, weights=weights)


def mass(f: Field) -> float:
    """Trapezoid quadrature of the field: M = sum_i w_i c_i.

    Exactly-rounded summation, so the quadrature is exact on affine fields
    to a single ulp (the weights are the control-volume sizes of the flux
    scheme, making this the discrete dual of the conservative dynamics).
    """
    return math.fsum(f.grid.weights * f.values)


def first_moment(f: Field) -> float:
    """Trapezoid quadrature of x*c; always >= -mass for non-negative c."""
    return math.fsum(f.grid.weights * f.grid.nodes * f.values)


def shifted_moment(f: Field) -> float:
    """First moment shifted to x = -1: integral of (x+1)*c.

    Computed literally as first_moment + mass so the composition identity is
    bitwise-reproducible.
    """
    return first_moment(f) + mass(f)


def boundary_traces(f: Field) -> tuple[float, float]:
    """(c(-1), c(1)); stored directly on a vertex-centered grid."""
    return float(f.values[0]), float(f.values[-1])


def trace_gap(f: Field) -> float:
    """c(-1) - c(1), the strength of the self-generated drift."""
    left, right = boundary_traces(f)
    return left - right


def l1_distance(f: Field, g: Field) -> float:
    """Trapezoid quadrature of |f - g|; fields must share a grid."""
    if f.grid != g.grid:
        raise ValueError(
            f"grid mismatch: {f.grid.n_cells} vs {g.grid.n_cells} cells"
        )
    return math.fsum(f.grid.weights * np.abs(f.values - g.values))


def reflect(f: Field) -> Field:
    """The field x -> f(-x); exact on the symmetric mesh."""
    return Field(f.values[::-1].copy(), f.grid)


def write_field_csv(f: Field, path: str | Path) -> None:
    """Snapshot format: header "x,c", one row per node, 17 significant digits."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        fh.write("x,c\n")
        for x, c in zip(f.grid.nodes, f.values):
            fh.write(f"{x:.17g},{c:.17g}\n")


def read_field_csv(path: str | Path) -> tuple[np.ndarray, np.ndarray]:
    """Read a snapshot CSV; returns (nodes, values) without grid validation."""
    path = Path(path)
    xs: list[float] = []
    cs: list[float] = []
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header[:2]] != ["x", "c"]:
            raise ValueError(f"{path}: expected header 'x,c', got {header}")
        for row in reader:
            if not row:
                continue
            xs.append(float(row[0]))
            cs.append(float(row[1]))
    return np.asarray(xs), np.asarray(cs)
