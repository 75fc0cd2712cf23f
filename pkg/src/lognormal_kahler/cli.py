"""Command-line front end.

Exit codes: 0 all asserted checks pass, 1 an asserted check failed, 2 bad
configuration or empty suite, 3 domain error in the inputs, 4 I/O error.
"""

from __future__ import annotations

import argparse
import sys
from typing import Sequence

import numpy as np

from . import __version__
from . import jacobi as jd
from . import manifold as mf
from . import report
from . import schrodinger as sr
from .config import COMMANDS, DEFAULTS, OUT_DIR_ENV, ConfigError, RunConfig, load_config, parse_floats
from .dombrowski import TangentState
from .errors import DomainError

EXIT_OK, EXIT_CHECK, EXIT_CONFIG, EXIT_DOMAIN, EXIT_IO = 0, 1, 2, 3, 4


def _defaults_epilog() -> str:
    rows = [f"  {k:<20} {spec[1]!r:<14} {spec[2]}" for k, spec in DEFAULTS.items()]
    return "configuration keys (set with --set KEY=VALUE or a config file):\n" + "\n".join(rows) + (
        f"\n\nThe output directory can also be set with the {OUT_DIR_ENV} environment variable."
    )


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key = value configuration file")
    common.add_argument("--set", action="append", default=[], metavar="KEY=VALUE", help="override one key")
    common.add_argument("--seed", type=int, help="random seed")
    common.add_argument("--out-dir", help="output directory")

    parser = argparse.ArgumentParser(
        prog="lognormal-kahler",
        description="Numerical checks of the Kähler structure on the lognormal tangent bundle.",
        epilog=_defaults_epilog(),
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name, parents=[common])
        if name == "metric":
            p.add_argument("--theta", nargs=2, type=float, metavar=("T1", "T2"))
        if name in ("flow", "schrodinger"):
            p.add_argument("--gen", help="generator, e.g. Q or P=1,Q=-0.5")
            p.add_argument("--start", nargs=4, type=float, metavar=("T1", "T2", "D1", "D2"))
            p.add_argument("--s-end", type=float)
            p.add_argument("--step", type=float)
        if name == "schrodinger":
            p.add_argument("--flags", choices=("calibrated", "literal"))
    return parser


def _overrides(args: argparse.Namespace) -> dict:
    out: dict = {}
    for item in args.set:
        key, sep, val = item.partition("=")
        if not sep:
            raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
        out[key.strip()] = val.strip()
    if args.seed is not None:
        out["seed"] = args.seed
    if args.out_dir is not None:
        out["out_dir"] = args.out_dir
    if getattr(args, "theta", None):
        out["theta"] = ",".join(map(repr, args.theta))
    if getattr(args, "gen", None):
        out["gen"] = args.gen
    if getattr(args, "start", None):
        out["start"] = ",".join(map(repr, args.start))
    if getattr(args, "s_end", None) is not None:
        out["s_end"] = args.s_end
    if getattr(args, "step", None) is not None:
        out["flow_step"] = args.step
    if getattr(args, "flags", None):
        out["flags"] = args.flags
    return out


def _print_metric(cfg: RunConfig) -> None:
    p = mf.NaturalPoint(*parse_floats(cfg["theta"], 2, "theta"))
    h = mf.fisher_metric(p)
    dev = float(np.abs(h - mf.fisher_metric_oracle(p, mf.QuadratureSpec(cfg["quadrature_order"]))).max())
    print(f"theta = ({p.theta1:g}, {p.theta2:g})")
    print(f"fisher metric = {h.tolist()}")
    print(f"inverse metric = {mf.inverse_metric(p).tolist()}")
    print(f"dual coordinates = {mf.dual_coordinates(p).as_array().tolist()}")
    print(f"oracle deviation = {dev:.3e}")


def _curve(cfg: RunConfig, s_end: float) -> jd.SpectralCurve:
    gen = jd.JacobiElement.parse(cfg["gen"])
    start = TangentState.from_array(parse_floats(cfg["start"], 4, "start"))
    return jd.integrate_flow(gen, start, s_end, cfg["flow_step"])


def _export_flow(cfg: RunConfig) -> None:
    c = _curve(cfg, cfg["s_end"])
    path = jd.write_curve_csv(c, cfg.out_dir() / "flow.csv")
    print(f"generator {c.generator.label()}: end state {c.states[-1].tolist()}, drift {jd.conservation_report(c):.3e}")
    print(f"wrote {path}")


def _export_schrodinger(cfg: RunConfig) -> None:
    c = _curve(cfg, cfg["flow_s_end"])
    flags = sr.CALIBRATED if cfg["flags"] == "calibrated" else sr.LITERAL
    p = sr.SchrodingerParams.for_generator(c.generator, flags=flags)
    grid = sr.LogGrid.uniform(cfg["grid_lo"], cfg["grid_hi"], cfg["grid_n"])
    r = sr.schrodinger_residual(c, grid, p)
    out = cfg.out_dir()
    sr.write_residual_csv(r, out / "schrodinger_residual.csv")
    sr.write_residual_summary(r, out / "schrodinger_summary.json")
    s = r.summary()
    print(f"flags {flags.as_dict()}: max chain-rule residual {s['max_abs_residual_eq23']:.3e}, "
          f"max Hamiltonian-form residual {s['max_abs_residual_eq21']:.3e}")


def run(cfg: RunConfig) -> int:
    try:
        out = cfg.out_dir()
        out.mkdir(parents=True, exist_ok=True)
        if cfg.command == "metric":
            _print_metric(cfg)
        elif cfg.command == "flow":
            _export_flow(cfg)
        elif cfg.command == "schrodinger":
            _export_schrodinger(cfg)
        verdicts = report.run_suite(cfg)
        text = report.emit_verdicts(verdicts, cfg)
        path = report.write_verdicts(text, out / f"verdicts-{cfg.command}.json")
    except report.EmptySuiteError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DomainError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            print(f"config error: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    for v in verdicts:
        print(f"{v.status.value:<9} {v.claim:<24} residual {v.residual:.3e} {v.comparison} {v.tolerance:.1e}")
    print(f"wrote {path}")
    return report.exit_code(verdicts)


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.command, args.config, _overrides(args))
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
