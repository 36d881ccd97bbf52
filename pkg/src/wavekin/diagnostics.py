"""Moments, decay-rate fitting, phase detection and the grid-convergence study."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .collision import State
from .errors import ConfigurationError, InsufficientSamples, NonPositiveValue
from .grid import Grid, build_grid

CONSERVED = "CONSERVED"
DECAYING = "DECAYING"

MIN_FIT_SAMPLES = 10
SLOPE_WINDOW = 7  # samples in the moving local-slope window
MIN_PHASE_SAMPLES = 3  # shorter runs are merged into the preceding phase


@dataclass
class DiagnosticsRecord:
    """Per-step diagnostics captured by the run observer."""

    t: float
    moments: dict[int, float]
    dt_accepted: float
    min_u: float


@dataclass(frozen=True)
class DecayFit:
    """Least-squares power-law fit of E(t) over a time window."""

    t_lo: float
    t_hi: float
    slope: float
    intercept: float
    residual: float
    n_samples: int


@dataclass(frozen=True)
class Phase:
    kind: str
    t_start: float
    t_end: float


def moment(u, grid: Grid, r: int) -> float:
    """Weighted sum dk * sum_j u_j k_j^(r+1); r = 0 is the total energy."""
    if r < 0:
        raise ConfigurationError("moment order must be non-negative")
    u = np.asarray(u, dtype=np.float64)
    return float(grid.dk * np.sum(u * grid.midpoints ** (r + 1)))


def _window_arrays(series, window=None):
    arr = np.asarray(series, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[1] < 2:
        raise ConfigurationError("series must be an (n, 2) array of (t, E) samples")
    t, E = arr[:, 0], arr[:, 1]
    if window is not None:
        t_lo, t_hi = window
        if not t_lo < t_hi:
            raise ConfigurationError(f"empty window ({t_lo}, {t_hi})")
        keep = (t >= t_lo) & (t <= t_hi)
        t, E = t[keep], E[keep]
    return t, E


def fit_decay(series, window) -> DecayFit:
    """Fit ln E against ln t by least squares inside the window.

    Raises InsufficientSamples for fewer than 10 usable samples and
    NonPositiveValue when any t or E in the window is not positive.
    """
    t, E = _window_arrays(series, window)
    if len(t) < MIN_FIT_SAMPLES:
        raise InsufficientSamples(
            f"need at least {MIN_FIT_SAMPLES} samples in window, got {len(t)}"
        )
    if np.any(t <= 0.0) or np.any(E <= 0.0):
        raise NonPositiveValue("log-log fit needs t > 0 and E > 0 throughout the window")
    x, y = np.log(t), np.log(E)
    slope, intercept = np.polyfit(x, y, 1)
    res = float(np.linalg.norm(y - (slope * x + intercept)))
    return DecayFit(float(window[0]), float(window[1]), float(slope), float(intercept),
                    res, len(t))


def _local_slopes(x: np.ndarray, y: np.ndarray, window: int) -> np.ndarray:
    """Centred least-squares slope over a moving window, clamped at the ends."""
    n = len(x)
    half = window // 2
    slopes = np.empty(n)
    for c in range(n):
        lo = max(0, c - half)
        hi = min(n, c + half + 1)
        xs, ys = x[lo:hi], y[lo:hi]
        xm, ym = xs.mean(), ys.mean()
        denom = np.sum((xs - xm) ** 2)
        slopes[c] = np.sum((xs - xm) * (ys - ym)) / denom if denom > 0.0 else 0.0
    return slopes


def detect_phases(series, flat_tol: float = 0.05, window: int = SLOPE_WINDOW,
                  min_phase_samples: int = MIN_PHASE_SAMPLES) -> list[Phase]:
    """Split a positive (t, E) series into CONSERVED / DECAYING spans.

    A sample is conserved when the magnitude of the local log-log slope is
    below flat_tol.  Phase boundaries are refined to the first adjacent-
    sample secant slope crossing flat_tol, so on clean data the breakpoint
    lands within one sample of the true junction.
    """
    t, E = _window_arrays(series)
    if len(t) < max(MIN_FIT_SAMPLES, window):
        raise InsufficientSamples(f"need at least {max(MIN_FIT_SAMPLES, window)} samples")
    if np.any(np.diff(t) <= 0.0):
        raise ConfigurationError("series times must be strictly increasing")
    if np.any(t <= 0.0) or np.any(E <= 0.0):
        raise NonPositiveValue("phase detection needs t > 0 and E > 0")

    x, y = np.log(t), np.log(E)
    labels = np.where(np.abs(_local_slopes(x, y, window)) < flat_tol, CONSERVED, DECAYING)

    # merge runs shorter than min_phase_samples into their predecessor
    runs: list[list] = []
    for idx, lab in enumerate(labels):
        if runs and runs[-1][0] == lab:
            runs[-1][2] = idx
        else:
            runs.append([lab, idx, idx])
    merged: list[list] = []
    for lab, lo, hi in runs:
        if merged and (hi - lo + 1) < min_phase_samples:
            merged[-1][2] = hi
        elif merged and merged[-1][0] == lab:
            merged[-1][2] = hi
        else:
            merged.append([lab, lo, hi])

    # refine boundaries with adjacent-sample secant slopes
    secant = np.diff(y) / np.diff(x)
    for a, b in zip(merged[:-1], merged[1:]):
        cut = a[2]  # last sample of the left phase
        lo = max(0, cut - window // 2)
        hi = min(len(secant) - 1, cut + window // 2)
        want_flat = b[0] == CONSERVED
        for s in range(lo, hi + 1):
            flat = abs(secant[s]) < flat_tol
            if flat == want_flat:
                cut = s
                break
        a[2] = cut
        b[1] = cut + 1

    return [Phase(lab, float(t[lo]), float(t[hi])) for lab, lo, hi in merged if hi >= lo]


@dataclass(frozen=True)
class ConvergenceRow:
    dk: float
    l1_rel: float
    linf_rel: float
    order_l1: float = field(default=float("nan"))
    order_linf: float = field(default=float("nan"))


def interp_to_grid(u_coarse, grid_coarse: Grid, grid_fine: Grid) -> np.ndarray:
    """Piecewise-linear interpolation between cell midpoints (clamped ends)."""
    return np.interp(grid_fine.midpoints, grid_coarse.midpoints,
                     np.asarray(u_coarse, dtype=np.float64))


def relative_errors(u, u_ref) -> tuple[float, float]:
    diff = np.abs(np.asarray(u) - np.asarray(u_ref))
    ref_l1 = float(np.sum(np.abs(u_ref)))
    ref_linf = float(np.max(np.abs(u_ref)))
    return float(diff.sum()) / ref_l1, float(diff.max()) / ref_linf


def convergence_study(scenario, L: float, T: float, dks, dk_ref: float,
                      run_solver=None, stepper_cfg=None) -> list[ConvergenceRow]:
    """Self-convergence of the final state against a fine-grid reference.

    ``run_solver(scenario, grid, T)`` must return the final cell values;
    the default runs the adaptive implicit solver with ``stepper_cfg``.
    """
    dks = [float(d) for d in dks]
    if len(dks) < 2:
        raise ConfigurationError("need at least two cell widths to measure an order")
    if any(b >= a for a, b in zip(dks[:-1], dks[1:])):
        raise ConfigurationError("cell widths must be strictly decreasing")
    if not dk_ref < min(dks):
        raise ConfigurationError("reference width must be finer than every tested width")

    if run_solver is None:
        from .scenarios import project_initial
        from .stepper import StepperConfig, advance
        import dataclasses

        base = stepper_cfg if stepper_cfg is not None else StepperConfig(freeze_jacobian=True)

        def run_solver(scn, grid, T_end):
            cfg = dataclasses.replace(base, T=T_end, dt_max=None)
            return advance(project_initial(scn, grid), grid, cfg).u

    grid_ref = build_grid(L, dk_ref)
    u_ref = run_solver(scenario, grid_ref, T)

    rows: list[ConvergenceRow] = []
    prev = None
    for dk in dks:
        grid = build_grid(L, dk)
        u = run_solver(scenario, grid, T)
        e1, einf = relative_errors(interp_to_grid(u, grid, grid_ref), u_ref)
        if prev is None:
            rows.append(ConvergenceRow(dk, e1, einf))
        else:
            ratio = np.log2(prev.dk / dk)
            rows.append(ConvergenceRow(
                dk, e1, einf,
                order_l1=float(np.log2(prev.l1_rel / e1) / ratio),
                order_linf=float(np.log2(prev.linf_rel / einf) / ratio),
            ))
        prev = rows[-1]
    return rows
