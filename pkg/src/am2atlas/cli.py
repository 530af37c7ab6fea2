"""Command-line front end.

Subcommands: steady-states, classify, diagram, bifurcate, simulate,
check-hypotheses, h-case.  Model parameters come from a preset
(--preset) or a key-value config file (--config); outputs land in
--out, the config's output.dir, $AM2_ATLAS_OUT, or the working
directory, in that order.  All floats print with 9 significant digits
and all emitted files are deterministic for fixed inputs.

Exit codes: 0 ok, 2 usage error, 3 I/O error, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import bifurcations, kinetics, presets, regions, simulate
from .config import Config, ConfigError
from .equilibria import ModelParams, OperatingPoint, Status, steady_states
from .regions import Boundary, Gamma, GridSpec, Region


class UsageError(ValueError):
    pass


def _fmt(v: float) -> str:
    return f"{v:.9g}"


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--preset", choices=sorted(presets.PRESETS), help="built-in parameter set")
    p.add_argument("--config", help="key-value config file")
    p.add_argument("--out", help="output directory")
    p.add_argument("--seed", type=int, default=0, help="seed recorded for reproducibility")
    p.add_argument("--resolution", type=int, help="raster cells per axis")


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="am2-atlas",
        description="Steady states, operating diagrams and bifurcations of the AM2 model",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("steady-states", help="table of the six steady states at one point")
    _add_common(p)
    p.add_argument("--D", type=float, required=True)
    p.add_argument("--s1in", type=float, required=True)
    p.add_argument("--s2in", type=float, required=True)
    p.add_argument("--csv", help="also write the table to this CSV file")

    p = sub.add_parser("classify", help="operating-diagram region of one point")
    _add_common(p)
    p.add_argument("--D", type=float, required=True)
    p.add_argument("--s1in", type=float, required=True)
    p.add_argument("--s2in", type=float, required=True)

    p = sub.add_parser("diagram", help="rasterize a 2-D cut of the operating diagram")
    _add_common(p)
    p.add_argument("--plane", choices=["s1s2", "ds1"], required=True)
    p.add_argument("--fixed", type=float, required=True, help="D (s1s2) or S2in (ds1)")
    p.add_argument(
        "--bounds", required=True, help="xmin,xmax,ymin,ymax of the cut rectangle"
    )
    p.add_argument("--no-csv", action="store_true")
    p.add_argument("--no-svg", action="store_true")

    p = sub.add_parser("bifurcate", help="scan the dilution rate along a feed line")
    _add_common(p)
    p.add_argument("--s1in", type=float, required=True)
    p.add_argument("--s2in", type=float, required=True)
    p.add_argument("--dmin", type=float, required=True)
    p.add_argument("--dmax", type=float, required=True)
    p.add_argument("--n", type=int, default=2048, help="scan grid points")
    p.add_argument("--component", choices=["S1", "X1", "S2", "X2"], default="X1")

    p = sub.add_parser("simulate", help="integrate one trajectory")
    _add_common(p)
    p.add_argument("--D", type=float, required=True)
    p.add_argument("--s1in", type=float, required=True)
    p.add_argument("--s2in", type=float, required=True)
    p.add_argument("--x0", required=True, help="S1,X1,S2,X2 initial state")
    p.add_argument("--t-max", type=float, default=1000.0)

    p = sub.add_parser("check-hypotheses", help="verify the qualitative shape of both laws")
    _add_common(p)
    p.add_argument("--grid-size", type=int, default=1000)

    p = sub.add_parser("h-case", help="shape classification of the coexistence threshold")
    _add_common(p)
    return ap


def _resolve_params(args) -> tuple[ModelParams, Config | None]:
    if args.config:
        cfg = Config.from_file(args.config)
        return cfg.model_params(), cfg
    return presets.get(args.preset or "caseA"), None


def _resolve_out_dir(args, cfg: Config | None) -> str:
    out = args.out or (cfg.out_dir if cfg else None) or os.environ.get("AM2_ATLAS_OUT") or "."
    os.makedirs(out, exist_ok=True)
    probe = os.path.join(out, ".am2atlas-write-test")
    with open(probe, "w", encoding="utf-8"):
        pass
    os.remove(probe)
    return out


def _operating_point(args) -> OperatingPoint:
    try:
        return OperatingPoint(args.D, args.s1in, args.s2in)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


_STATUS_TEXT = {
    Status.ABSENT: "absent",
    Status.GAS: "GAS",
    Status.STABLE: "stable",
    Status.UNSTABLE: "unstable",
    Status.NON_HYPERBOLIC: "non-hyperbolic",
}


def _cmd_steady_states(args) -> int:
    params, cfg = _resolve_params(args)
    pt = _operating_point(args)
    states = steady_states(params, pt)
    rows = [("label", "S1", "X1", "S2", "X2", "status")]
    for st in states:
        if st.exists:
            rows.append(
                (st.label.value, _fmt(st.s1), _fmt(st.x1), _fmt(st.s2), _fmt(st.x2),
                 _STATUS_TEXT[st.status])
            )
        else:
            rows.append((st.label.value, "-", "-", "-", "-", _STATUS_TEXT[st.status]))
    widths = [max(len(r[i]) for r in rows) for i in range(6)]
    for r in rows:
        print("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip())
    if args.csv:
        with open(args.csv, "w", encoding="utf-8") as fh:
            for r in rows:
                fh.write(",".join(r) + "\n")
    return 0


def _cmd_classify(args) -> int:
    params, _ = _resolve_params(args)
    pt = _operating_point(args)
    result = regions.classify(params, pt)
    if isinstance(result, Boundary):
        print("boundary " + " ".join(g.value for g in result.gammas))
        return 0
    existing = [
        f"{st.label.value}:{_STATUS_TEXT[st.status]}"
        for st in steady_states(params, pt)
        if st.exists
    ]
    print(f"{result.value} {result.color.capitalize()}  [{' '.join(existing)}]")
    return 0


def _parse_bounds(text: str) -> tuple[float, float, float, float]:
    try:
        vals = tuple(float(v) for v in text.split(","))
    except ValueError:
        raise UsageError(f"bad --bounds {text!r}") from None
    if len(vals) != 4:
        raise UsageError("--bounds needs xmin,xmax,ymin,ymax")
    return vals


def _cmd_diagram(args) -> int:
    params, cfg = _resolve_params(args)
    out = _resolve_out_dir(args, cfg)
    xmin, xmax, ymin, ymax = _parse_bounds(args.bounds)
    n = args.resolution or (cfg.resolution if cfg else 800)
    try:
        grid = GridSpec(n, n, xmin, xmax, ymin, ymax)
        if args.plane == "s1s2":
            if args.fixed <= 0:
                raise UsageError("--fixed (D) must be positive for the s1s2 plane")
            cut = regions.cut_s1s2(params, args.fixed, grid)
        else:
            if args.fixed < 0:
                raise UsageError("--fixed (S2in) must be nonnegative for the ds1 plane")
            cut = regions.cut_ds1(params, args.fixed, grid)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    base = os.path.join(out, f"diagram_{args.plane}_{_fmt(args.fixed)}")
    write_csv = not args.no_csv and (cfg.write_csv if cfg else True)
    write_svg = not args.no_svg and (cfg.write_svg if cfg else True)
    written = []
    if write_csv:
        regions.write_raster_csv(cut, base + ".csv")
        regions.write_boundaries_csv(cut, base + "_boundaries.csv")
        written += [base + ".csv", base + "_boundaries.csv"]
    if write_svg:
        regions.write_svg(cut, base + ".svg")
        written.append(base + ".svg")
    present = sorted(r.value for r in cut.regions_present())
    print("regions: " + " ".join(present))
    for path in written:
        print("wrote " + path)
    return 0


def _cmd_bifurcate(args) -> int:
    params, cfg = _resolve_params(args)
    out = _resolve_out_dir(args, cfg)
    if not (0 < args.dmin < args.dmax):
        raise UsageError("need 0 < --dmin < --dmax")
    if args.s1in < 0 or args.s2in < 0:
        raise UsageError("feed concentrations must be nonnegative")
    res = bifurcations.scan_dilution(
        params, args.s1in, args.s2in, (args.dmin, args.dmax), n=args.n
    )
    print("D            kind           pair       gamma  regions")
    for e in res.events:
        print(
            f"{_fmt(e.D):<12} {e.kind.value:<14} "
            f"{e.pair[0].value}={e.pair[1].value}  {e.gamma.value}     "
            f"{e.region_before.value}->{e.region_after.value}"
        )
    for c in res.codim_two:
        print(f"{_fmt(c.D):<12} codimension-two candidate: "
              + " ".join(g.value for g in c.gammas))
    base = os.path.join(
        out, f"bifurcation_{_fmt(args.s1in)}_{_fmt(args.s2in)}"
    )
    bifurcations.write_events_csv(res.events, base + "_events.csv")
    bifurcations.write_branches_csv(res.branches, base + "_branches.csv")
    bifurcations.write_diagram_svg(res.branches, res.events, base + ".svg", args.component)
    for suffix in ("_events.csv", "_branches.csv", ".svg"):
        print("wrote " + base + suffix)
    return 0


def _cmd_simulate(args) -> int:
    params, cfg = _resolve_params(args)
    out = _resolve_out_dir(args, cfg)
    pt = _operating_point(args)
    try:
        x0 = [float(v) for v in args.x0.split(",")]
    except ValueError:
        raise UsageError(f"bad --x0 {args.x0!r}") from None
    if len(x0) != 4 or any(v < 0 for v in x0):
        raise UsageError("--x0 needs four nonnegative components S1,X1,S2,X2")
    if args.t_max <= 0:
        raise UsageError("--t-max must be positive")
    traj = simulate.integrate(params, pt, np.array(x0), t_max=args.t_max)
    path = os.path.join(out, "trajectory.csv")
    simulate.write_trajectory_csv(traj, path)
    if traj.terminal is simulate.Terminal.CONVERGED:
        print(f"converged {traj.attracted_to.value} at t={_fmt(float(traj.t[-1]))}")
    else:
        print(traj.terminal.value)
    print("wrote " + path)
    return 0


def _cmd_check_hypotheses(args) -> int:
    params, _ = _resolve_params(args)
    try:
        r1 = kinetics.check_hypotheses(params.mu1, args.grid_size)
        r2 = kinetics.check_hypotheses(params.mu2, args.grid_size)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    for name, rep in (("mu1", r1), ("mu2", r2)):
        verdict = "pass" if rep.ok else "fail"
        print(f"{name}: {verdict}")
        for v in rep.violations:
            print(f"  violation: {v}")
        if rep.peak_bracket:
            lo, hi = rep.peak_bracket
            print(f"  peak bracket: [{_fmt(lo)}, {_fmt(hi)}]")
    return 0


def _cmd_h_case(args) -> int:
    params, _ = _resolve_params(args)
    rep = regions.h_case(params)
    print(f"case {rep.case}  d1={_fmt(rep.d1)}  d2={_fmt(rep.d2)}")
    for d, h in rep.minima:
        print(f"interior minimum of h2 at D={_fmt(d)}, (k1/k2)h2={_fmt(h / params.feed_ratio)}")
    for d, h in rep.maxima:
        print(f"interior maximum of h2 at D={_fmt(d)}, (k1/k2)h2={_fmt(h / params.feed_ratio)}")
    return 0


_COMMANDS = {
    "steady-states": _cmd_steady_states,
    "classify": _cmd_classify,
    "diagram": _cmd_diagram,
    "bifurcate": _cmd_bifurcate,
    "simulate": _cmd_simulate,
    "check-hypotheses": _cmd_check_hypotheses,
    "h-case": _cmd_h_case,
}


def run(argv: list[str] | None = None) -> int:
    """Parse arguments and dispatch; returns the process exit code."""
    ap = _build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except (UsageError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return 3
    except simulate.IntegrationError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 4


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
