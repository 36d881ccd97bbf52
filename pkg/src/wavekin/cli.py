"""Command-line entry points.

Exit codes: 0 success, 2 configuration error, 3 solver abort.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .errors import ConfigurationError, SolverError
from .harness import RunConfig, cmd_convergence, cmd_fit, run

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SOLVER = 3


def _load_config(args, extra_keys: tuple[str, ...] = ()) -> tuple[RunConfig, dict]:
    doc = {}
    if args.config is not None:
        try:
            with open(args.config) as fh:
                doc = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigurationError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(doc, dict):
            raise ConfigurationError(f"{args.config}: config must be a JSON object")
        if "config" in doc and isinstance(doc["config"], dict):
            doc = doc["config"]
    extras = {k: doc.pop(k) for k in extra_keys if k in doc}
    overrides = {
        "scenario": args.scenario,
        "L": args.L,
        "dk": args.dk,
        "T": args.T,
        "outdir": args.out,
        "rtol": getattr(args, "rtol", None),
        "atol": getattr(args, "atol", None),
    }
    doc.update({k: v for k, v in overrides.items() if v is not None})
    return RunConfig.from_dict(doc), extras


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON config file (flags override file values)")
    p.add_argument("--scenario", help="initial distribution name")
    p.add_argument("--L", type=float, help="truncation wavenumber")
    p.add_argument("--dk", type=float, help="uniform cell width")
    p.add_argument("--T", type=float, help="final time")
    p.add_argument("--rtol", type=float, help="relative step tolerance")
    p.add_argument("--atol", type=float, help="absolute step tolerance")
    p.add_argument("--out", help="output directory")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="wavekin",
                                     description="3-wave kinetic equation solver")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="integrate one scenario and write series/snapshots")
    _add_common(p_run)

    p_conv = sub.add_parser("convergence", help="grid self-convergence study")
    _add_common(p_conv)
    p_conv.add_argument("--dks", type=float, nargs="+",
                        help="strictly decreasing cell widths to test")
    p_conv.add_argument("--dk-ref", type=float, help="reference cell width")

    p_fit = sub.add_parser("fit", help="fit a decay exponent to a series file")
    p_fit.add_argument("--series", required=True, help="series.csv produced by run")
    p_fit.add_argument("--t-lo", type=float, required=True)
    p_fit.add_argument("--t-hi", type=float, required=True)
    p_fit.add_argument("--flat-tol", type=float, default=0.05)
    p_fit.add_argument("--out", help="where to write fit.json (default: next to series)")

    args = parser.parse_args(argv)

    try:
        if args.command == "run":
            config, _ = _load_config(args)
            result = run(config)
            print(f"wrote {result.outdir}/series.csv "
                  f"({result.stats.accepted} steps, {result.stats.rejected} rejected)")
        elif args.command == "convergence":
            config, extras = _load_config(args, extra_keys=("dks", "dk_ref"))
            dks = args.dks if args.dks is not None else extras.get("dks")
            dk_ref = args.dk_ref if args.dk_ref is not None else extras.get("dk_ref")
            if dks is None or dk_ref is None:
                raise ConfigurationError("convergence needs --dks and --dk-ref (or config keys)")
            rows = cmd_convergence(config, dks, dk_ref)
            for r in rows:
                print(f"dk={r.dk:g}  L1={r.l1_rel:.3e}  Linf={r.linf_rel:.3e}  "
                      f"order_L1={r.order_l1:.2f}  order_Linf={r.order_linf:.2f}")
        elif args.command == "fit":
            out = args.out if args.out is not None else str(Path(args.series).parent / "fit.json")
            report = cmd_fit(args.series, args.t_lo, args.t_hi, out, flat_tol=args.flat_tol)
            print(f"slope={report['slope']:.4f} intercept={report['intercept']:.4f} "
                  f"residual={report['residual']:.3e}")
            for ph in report["phases"]:
                print(f"  {ph['kind']:9s} t in [{ph['t_start']:g}, {ph['t_end']:g}]")
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SolverError as exc:
        print(f"solver abort: {exc}", file=sys.stderr)
        config = locals().get("config")
        if config is not None:
            outdir = Path(config.outdir)
            outdir.mkdir(parents=True, exist_ok=True)
            with open(outdir / "error.json", "w") as fh:
                json.dump({"error": type(exc).__name__, "message": str(exc)}, fh, indent=2)
                fh.write("\n")
        return EXIT_SOLVER
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
