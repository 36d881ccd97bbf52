"""Discrete nonlocal collision flux, its per-cell difference and Jacobian.

The solved variable u holds cell values of the rescaled energy density
(wavenumber times the radial density); the collision flux is quadratic and
nonlocal in u.  Evaluation cost is O(M^2) per call.

Two numerically independent routes are provided and tested against each
other: ``flux_half`` evaluates the half-flux at a single cell edge by
direct summation, while ``flux_divergence`` evaluates the telescoped
edge-to-edge difference in closed form.  Out-of-range indices contribute
zero (the state is extended by zero beyond the truncation), and the left
ghost edge i = -1 keeps only the first term with its lower bound clamped
to cell 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import _kernels
from .grid import Grid


@dataclass
class State:
    """Solver state: time plus one cell value per grid cell."""

    t: float
    u: np.ndarray

    def copy(self) -> "State":
        return State(self.t, self.u.copy())


@dataclass
class CollisionKernel:
    """Pairwise midpoint weight tables for the quadratic collision flux.

    Tables are built lazily; each is (M+1) x (M+1) and symmetric.  The
    compiled backend regenerates the weights in registers instead, so the
    tables only materialise when the NumPy backend assembles a Jacobian
    (or when accessed directly).
    """

    grid: Grid
    _tables: dict = field(default_factory=dict, repr=False)

    @cached_property
    def diff2(self) -> np.ndarray:
        k = self.grid.midpoints
        return (k[:, None] - k[None, :]) ** 2

    @cached_property
    def sum2(self) -> np.ndarray:
        k = self.grid.midpoints
        return (k[:, None] + k[None, :]) ** 2

    @cached_property
    def prod(self) -> np.ndarray:
        k = self.grid.midpoints
        return k[:, None] * k[None, :]

    def tables(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return self.diff2, self.sum2, self.prod


def _as_array(u) -> np.ndarray:
    return np.ascontiguousarray(u, dtype=np.float64)


def flux_half(u, i: int, grid: Grid) -> float:
    """Half-flux at cell edge i+1/2 by direct summation; i may be -1 or M."""
    return float(_kernels.get().flux_half(_as_array(u), grid.midpoints, grid.dk, i))


def flux_half_all(u, grid: Grid) -> np.ndarray:
    """All half-fluxes; entry [i+1] is the flux at edge i+1/2, i = -1..M."""
    return _kernels.get().flux_half_all(_as_array(u), grid.midpoints, grid.dk)


def flux_divergence(u, grid: Grid) -> np.ndarray:
    """Telescoped per-cell flux difference (closed form), length M+1."""
    return _kernels.get().flux_divergence(_as_array(u), grid.midpoints, grid.dk)


def rhs(u, grid: Grid) -> np.ndarray:
    """Semi-discrete time derivative: flux_divergence(u)/dk."""
    return flux_divergence(u, grid) / grid.dk


def rhs_jacobian(u, grid: Grid, kernel: CollisionKernel | None = None) -> np.ndarray:
    """Dense (M+1)x(M+1) Jacobian of rhs; exact since rhs is quadratic in u."""
    tables = kernel.tables() if kernel is not None else None
    return _kernels.get().jacobian(_as_array(u), grid.midpoints, grid.dk, tables)


class CollisionSystem:
    """Grid-bound rhs/jacobian pair consumed by the implicit steppers.

    Reuses one weight-table kernel across all Newton iterations of a run.
    """

    def __init__(self, grid: Grid):
        self.grid = grid
        self._backend = _kernels.get()
        self._needs_tables = self._backend.name == "numpy"
        self._kernel = CollisionKernel(grid) if self._needs_tables else None

    def rhs(self, u: np.ndarray) -> np.ndarray:
        return self._backend.flux_divergence(_as_array(u), self.grid.midpoints, self.grid.dk) / self.grid.dk

    def jac(self, u: np.ndarray) -> np.ndarray:
        tables = self._kernel.tables() if self._kernel is not None else None
        return self._backend.jacobian(_as_array(u), self.grid.midpoints, self.grid.dk, tables)
