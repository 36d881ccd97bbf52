"""Uniform finite-volume mesh of the truncated wavenumber domain [0, L]."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError

# Relative tolerance used when checking that L is an integer multiple of dk,
# so that decimal inputs such as dk=0.1 are accepted.
_DIVISIBILITY_RTOL = 1e-9


@dataclass(frozen=True)
class Grid:
    """Uniform cell partition of [0, L] with edges i*dk and midpoints (i+1/2)*dk.

    Cells are indexed 0..M with M = L/dk - 1.  The grid is immutable and can
    be shared freely across threads.

    Parameters
    ----------
    L : float
        Right endpoint of the truncated wavenumber domain.
    dk : float
        Uniform cell width; L must be an integer multiple of dk.
    """

    L: float
    dk: float
    M: int = field(init=False)
    edges: np.ndarray = field(init=False, repr=False)
    midpoints: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if not (self.L > 0.0) or not (self.dk > 0.0):
            raise ConfigurationError(f"L and dk must be positive, got L={self.L}, dk={self.dk}")
        ratio = self.L / self.dk
        ncells = round(ratio)
        if ncells < 2 or abs(ratio - ncells) > _DIVISIBILITY_RTOL * ratio:
            raise ConfigurationError(
                f"L must be an integer multiple (>= 2) of dk, got L/dk = {ratio!r}"
            )
        object.__setattr__(self, "M", ncells - 1)
        edges = np.arange(ncells + 1, dtype=np.float64) * self.dk
        midpoints = (np.arange(ncells, dtype=np.float64) + 0.5) * self.dk
        edges.setflags(write=False)
        midpoints.setflags(write=False)
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "midpoints", midpoints)

    @property
    def ncells(self) -> int:
        return self.M + 1


def build_grid(L: float, dk: float) -> Grid:
    """Construct the uniform grid; rejects non-divisible or non-positive inputs."""
    return Grid(L=float(L), dk=float(dk))
