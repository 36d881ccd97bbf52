"""Initial energy-density distributions and their finite-volume projection."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .collision import State
from .errors import ConfigurationError
from .grid import Grid

# Cell averages use composite 5-point Gauss-Legendre on NSUB subpanels per
# cell: plain 5-point quadrature is not accurate enough for the compactly
# supported bump, whose derivatives peak steeply near the support edges.
NSUB = 32
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(5)


@dataclass(frozen=True)
class Scenario:
    """Closed-form initial density with suggested run parameters."""

    name: str
    g0: Callable[[np.ndarray], np.ndarray]
    L_values: tuple[float, ...]
    T: float = 1.0e4
    dk: float = 0.5


def _mollifier(k: np.ndarray) -> np.ndarray:
    k = np.asarray(k, dtype=np.float64)
    r2 = (k - 15.0) ** 2
    out = np.zeros_like(k)
    inside = r2 < 1.0
    out[inside] = np.exp(1.0 / (10.0 * (r2[inside] - 1.0)))
    return out


def _disc_line(k: np.ndarray) -> np.ndarray:
    k = np.asarray(k, dtype=np.float64)
    out = np.where((k >= 20.0) & (k <= 150.0), 1.0 - (k - 20.0) / 130.0, 0.0)
    return out


def _triple_bump(k: np.ndarray) -> np.ndarray:
    k = np.asarray(k, dtype=np.float64)
    return 0.1 * (
        np.exp(-((k - 50.0) ** 2) / 100.0)
        + 0.5 * np.exp(-((k - 75.0) ** 2) / 100.0)
        + np.exp(-((k - 100.0) ** 2) / 100.0)
    )


SCENARIOS: dict[str, Scenario] = {
    "mollifier": Scenario("mollifier", _mollifier, L_values=(30.0, 100.0)),
    "disc_line": Scenario("disc_line", _disc_line, L_values=(200.0, 300.0)),
    "triple_bump": Scenario("triple_bump", _triple_bump, L_values=(200.0, 300.0)),
}


def get_scenario(name: str) -> Scenario:
    try:
        return SCENARIOS[name]
    except KeyError:
        raise ConfigurationError(
            f"unknown scenario {name!r}; available: {sorted(SCENARIOS)}"
        ) from None


def tabulated_scenario(k_values, g_values, name: str = "tabulated",
                       L_values: tuple[float, ...] = (), T: float = 1.0e4) -> Scenario:
    """Scenario interpolating a sampled (k, g0) table linearly, zero outside."""
    kv = np.asarray(k_values, dtype=np.float64)
    gv = np.asarray(g_values, dtype=np.float64)
    if kv.ndim != 1 or kv.shape != gv.shape or len(kv) < 2:
        raise ConfigurationError("tabulated scenario needs two equal-length 1-d columns")
    if np.any(np.diff(kv) <= 0.0):
        raise ConfigurationError("tabulated k values must be strictly increasing")
    if np.any(gv < 0.0):
        raise ConfigurationError("tabulated g0 values must be non-negative")

    def g0(k: np.ndarray) -> np.ndarray:
        return np.interp(np.asarray(k, dtype=np.float64), kv, gv, left=0.0, right=0.0)

    return Scenario(name, g0, L_values=L_values or (float(kv[-1]),), T=T)


def load_tabulated(path, **kwargs) -> Scenario:
    """Load a two-column CSV (k, g0) as a tabulated scenario."""
    data = np.loadtxt(path, delimiter=",", ndmin=2)
    if data.shape[1] != 2:
        raise ConfigurationError(f"{path}: expected two columns (k, g0)")
    return tabulated_scenario(data[:, 0], data[:, 1], **kwargs)


def eval_g0(scenario: Scenario, k) -> np.ndarray | float:
    """Pointwise initial density; scalar in, scalar out."""
    arr = scenario.g0(np.atleast_1d(np.asarray(k, dtype=np.float64)))
    return float(arr[0]) if np.isscalar(k) or np.ndim(k) == 0 else arr


def project_initial(scenario: Scenario, grid: Grid) -> State:
    """Cell averages of g0 at t = 0 (composite Gauss-Legendre per cell)."""
    # quadrature abscissae for all cells at once: (ncells, NSUB * npts)
    sub_edges = np.linspace(0.0, grid.dk, NSUB + 1)
    sub_mid = 0.5 * (sub_edges[:-1] + sub_edges[1:])
    sub_half = 0.5 * grid.dk / NSUB
    offsets = (sub_mid[:, None] + sub_half * _GL_NODES[None, :]).ravel()
    pts = grid.edges[:-1][:, None] + offsets[None, :]
    weights = np.tile(_GL_WEIGHTS, NSUB) / (2.0 * NSUB)  # sums to 1: cell average
    u = scenario.g0(pts.ravel()).reshape(pts.shape) @ weights
    return State(t=0.0, u=u)
