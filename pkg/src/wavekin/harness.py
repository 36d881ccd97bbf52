"""Run orchestration: configuration, file output and the CLI-facing commands.

File formats
------------
series.csv       t,dt,E,M1,M2,M3,min_u  -- one row per sampled accepted step
snapshot_<t>.csv k,u                    -- state at the first accepted step >= t
run.json         {"config": ..., "stats": ..., "snapshots": ...}
convergence.csv  dk,L1_rel,Linf_rel,order_L1,order_Linf
fit.json         fitted slope/intercept/residual plus the phase list

Floats are written with repr (shortest round-trip), so repeated runs of the
same configuration produce byte-identical series files.
"""

from __future__ import annotations

import dataclasses
import json
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import _kernels, __version__
from .diagnostics import convergence_study, detect_phases, fit_decay, moment
from .errors import ConfigurationError
from .grid import build_grid
from .scenarios import get_scenario, project_initial
from .stepper import StepperConfig, StepperStats, advance

MAX_SERIES_ROWS = 5000  # longer series are downsampled to log-spaced rows


@dataclass
class RunConfig:
    """Resolved parameters of one solver run."""

    scenario: str = "mollifier"
    L: float = 30.0
    dk: float = 0.5
    T: float = 1.0e4
    rtol: float = 1e-5
    atol: float = 1e-8
    newton_tol: float = 1e-2
    newton_max_iter: int = 10
    dt_init: float = 1e-3
    dt_min: float = 1e-12
    dt_max: float | None = None
    safety: float = 0.9
    freeze_jacobian: bool = False
    enforce_positivity: bool = True
    moment_orders: tuple[int, ...] = (0, 1, 2, 3)
    snapshot_times: tuple[float, ...] = ()
    outdir: str = "out"
    seed: int | None = None  # reserved; the solver is deterministic

    def __post_init__(self) -> None:
        get_scenario(self.scenario)
        if self.T < 0.0:
            raise ConfigurationError("T must be non-negative")
        self.moment_orders = tuple(int(r) for r in self.moment_orders)
        if any(r < 0 for r in self.moment_orders) or 0 not in self.moment_orders:
            raise ConfigurationError("moment_orders must be non-negative and include 0")
        self.snapshot_times = tuple(float(t) for t in self.snapshot_times)
        if any(t < 0.0 or t > self.T for t in self.snapshot_times):
            raise ConfigurationError("snapshot times must lie within [0, T]")
        self.stepper()  # validates tolerances/step bounds
        build_grid(self.L, self.dk)  # validates divisibility

    def stepper(self) -> StepperConfig:
        return StepperConfig(
            rtol=self.rtol, atol=self.atol, newton_tol=self.newton_tol,
            newton_max_iter=self.newton_max_iter, dt_init=self.dt_init,
            dt_min=self.dt_min, dt_max=self.dt_max, safety=self.safety,
            T=self.T, freeze_jacobian=self.freeze_jacobian,
            enforce_positivity=self.enforce_positivity,
        )

    @classmethod
    def from_dict(cls, doc: dict) -> "RunConfig":
        if "config" in doc and isinstance(doc["config"], dict):
            doc = doc["config"]  # accept a run.json straight back
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(doc) - known
        if unknown:
            raise ConfigurationError(f"unknown config fields: {sorted(unknown)}")
        return cls(**doc)

    @classmethod
    def from_file(cls, path) -> "RunConfig":
        try:
            with open(path) as fh:
                doc = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigurationError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(doc, dict):
            raise ConfigurationError(f"{path}: config must be a JSON object")
        return cls.from_dict(doc)

    def to_dict(self) -> dict:
        out = dataclasses.asdict(self)
        out["moment_orders"] = list(self.moment_orders)
        out["snapshot_times"] = list(self.snapshot_times)
        return out


def _fmt(x: float) -> str:
    return repr(float(x))


def _write_csv(path: Path, header: str, rows) -> None:
    with open(path, "w") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _downsample_log(times: np.ndarray, max_rows: int) -> np.ndarray:
    """Indices of <= max_rows samples, log-spaced in t (first/last kept)."""
    n = len(times)
    if n <= max_rows:
        return np.arange(n)
    nz = np.nonzero(times > 0.0)[0]
    head = np.arange(nz[0] if len(nz) else n)  # leading rows at t <= 0
    targets = np.geomspace(times[nz[0]], times[-1], max_rows - len(head))
    idx = np.unique(np.searchsorted(times, targets).clip(0, n - 1))
    keep = np.union1d(np.union1d(head, idx), [n - 1])
    if len(keep) > max_rows:
        keep = np.concatenate([keep[: max_rows - 1], keep[-1:]])
    return keep


@dataclass
class RunResult:
    config: RunConfig
    stats: StepperStats
    series: np.ndarray  # columns: t, dt, moments..., min_u
    snapshot_files: list[dict] = field(default_factory=list)
    outdir: Path | None = None


def run(config: RunConfig) -> RunResult:
    """Execute one configured run and write its output files."""
    outdir = Path(config.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    grid = build_grid(config.L, config.dk)
    scenario = get_scenario(config.scenario)
    state0 = project_initial(scenario, grid)

    orders = config.moment_orders
    rows = [[0.0, 0.0, *(moment(state0.u, grid, r) for r in orders), float(state0.u.min())]]
    pending = sorted(config.snapshot_times)
    snapshots = []  # (requested, actual, u copy)

    def grab_snapshots(t, u):
        while pending and t >= pending[0]:
            snapshots.append((pending.pop(0), t, np.array(u, copy=True)))

    grab_snapshots(0.0, state0.u)

    def observer(t, u, dt):
        rows.append([t, dt, *(moment(u, grid, r) for r in orders), float(u.min())])
        grab_snapshots(t, u)

    stats = StepperStats()
    t0 = time.perf_counter()
    advance(state0, grid, config.stepper(), observer, stats)
    wall = time.perf_counter() - t0

    series = np.asarray(rows, dtype=np.float64)
    keep = _downsample_log(series[:, 0], MAX_SERIES_ROWS)
    sampled = series[keep]

    header = "t,dt," + ",".join("E" if r == 0 else f"M{r}" for r in orders) + ",min_u"
    _write_csv(outdir / "series.csv", header, sampled)

    snapshot_files = []
    for requested, actual, u in snapshots:
        fname = f"snapshot_{requested:g}.csv"
        _write_csv(outdir / fname, "k,u", zip(grid.midpoints, u))
        snapshot_files.append({"requested_t": requested, "actual_t": actual, "file": fname})

    run_doc = {
        "config": config.to_dict(),
        "backend": _kernels.active_backend(),
        "version": __version__,
        "stats": {
            "steps_accepted": stats.accepted,
            "steps_rejected": stats.rejected,
            "newton_iterations": stats.newton_iters,
            "rhs_evaluations": stats.rhs_evals,
            "min_u": stats.min_u if np.isfinite(stats.min_u) else None,
            "min_u_raw": stats.min_u_raw if np.isfinite(stats.min_u_raw) else None,
            "clipped_mass": stats.clipped_mass,
            "positivity_warnings": stats.positivity_warnings,
            "wall_time_s": wall,
        },
        "snapshots": snapshot_files,
    }
    with open(outdir / "run.json", "w") as fh:
        json.dump(run_doc, fh, indent=2)
        fh.write("\n")

    return RunResult(config, stats, sampled, snapshot_files, outdir)


def cmd_convergence(config: RunConfig, dks, dk_ref: float, outdir=None) -> list:
    """Run the self-convergence study and write convergence.csv."""
    out = Path(outdir if outdir is not None else config.outdir)
    out.mkdir(parents=True, exist_ok=True)
    scenario = get_scenario(config.scenario)
    base = dataclasses.replace(config.stepper(), T=None, dt_max=None)
    rows = convergence_study(scenario, config.L, config.T, dks, dk_ref, stepper_cfg=base)
    _write_csv(out / "convergence.csv", "dk,L1_rel,Linf_rel,order_L1,order_Linf",
               ((r.dk, r.l1_rel, r.linf_rel, r.order_l1, r.order_linf) for r in rows))
    return rows


def load_series(path) -> np.ndarray:
    """Read a series.csv back as (t, E) pairs."""
    try:
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        with open(path) as fh:
            cols = fh.readline().strip().split(",")
    except OSError as exc:
        raise ConfigurationError(f"cannot read series {path}: {exc}") from exc
    for required in ("t", "E"):
        if required not in cols:
            raise ConfigurationError(f"{path}: missing column {required!r}")
    return data[:, [cols.index("t"), cols.index("E")]]


def cmd_fit(series_path, t_lo: float, t_hi: float, out_path=None,
            flat_tol: float = 0.05) -> dict:
    """Fit the decay exponent over [t_lo, t_hi] and classify phases."""
    series = load_series(series_path)
    positive = (series[:, 0] > 0.0) & (series[:, 1] > 0.0)
    fit = fit_decay(series[positive], (t_lo, t_hi))
    phases = detect_phases(series[positive], flat_tol=flat_tol)
    report = {
        "series": str(series_path),
        "window": [t_lo, t_hi],
        "slope": fit.slope,
        "intercept": fit.intercept,
        "residual": fit.residual,
        "n_samples": fit.n_samples,
        "phases": [{"kind": p.kind, "t_start": p.t_start, "t_end": p.t_end} for p in phases],
    }
    if out_path is not None:
        with open(out_path, "w") as fh:
            json.dump(report, fh, indent=2)
            fh.write("\n")
    return report
