"""Command-line front end: ``analyze``, ``scan``, ``oracle`` and ``render``.

Exit codes: 0 success, 2 bad input or arguments, 3 internal numerical failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import report as rep
from .config import load_config
from .curves import load_curve
from .errors import InputError
from .svg import render_svg
from .transitions import scan_family_detailed

log = logging.getLogger("minkss")

EXIT_OK, EXIT_INPUT, EXIT_INTERNAL = 0, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_INPUT)


def _write(path: str, text: str) -> None:
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot write {path}: {exc}") from exc


def _config(args, **extra):
    """Defaults, then ``--config``, then flags that were given explicitly."""
    overrides = {"tol": args.tol, **extra}
    cfg = load_config(args.config, overrides)
    if cfg.grid_n < 64 or cfg.scan_grid < 64:
        raise InputError("grid resolution must be at least 64")
    return cfg


def cmd_analyze(args) -> int:
    family = load_curve(args.curve)
    cfg = _config(args, grid_n=args.grid)
    report = rep.build_analysis(family, args.u, cfg)
    _write(args.out, rep.dumps(report))
    if args.svg:
        _write(args.svg, render_svg(report))
    return EXIT_OK


def cmd_scan(args) -> int:
    family = load_curve(args.curve)
    if not family.has_family:
        raise InputError(f"{args.curve} has no 'family' entry to scan")
    if not args.u_min < args.u_max:
        raise InputError("--u-min must be smaller than --u-max")
    if args.steps is not None and args.steps < 2:
        raise InputError("--steps must be at least 2")
    cfg = _config(args, scan_grid=args.grid, scan_steps=args.steps)
    result = scan_family_detailed(family, args.u_min, args.u_max, cfg.scan_steps, cfg=cfg,
                                  progress=lambda k, u: log.info("scan step %d u=%.6g", k, u))
    log.info("%d events, %d unconverged seeds", len(result.events), len(result.failed_seeds))
    report = rep.build_event_report(family, result, args.u_min, args.u_max, cfg.scan_steps, cfg)
    _write(args.out, rep.dumps(report))
    return EXIT_OK


def cmd_oracle(args) -> int:
    family = load_curve(args.curve)
    cfg = _config(args, grid_n=args.grid)
    _write(args.out, rep.oracle_csv(family, args.u, cfg.grid_n, cfg))
    return EXIT_OK


def cmd_render(args) -> int:
    try:
        data = json.loads(Path(args.report).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read report {args.report}: {exc}") from exc
    rep.validate(data, "analysis_report")
    _write(args.out, render_svg(data))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="minkss", description="Minkowski symmetry sets of closed plane curves")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, grid_help: str = "torus grid resolution (default from config, 512)"):
        sp.add_argument("--curve", required=True, help="curve spec (JSON)")
        sp.add_argument("--grid", type=int, help=grid_help)
        sp.add_argument("--tol", type=float, help="contact-order tolerance (default from config, 1e-6)")
        sp.add_argument("--config", help="JSON file with tolerance and grid settings")
        sp.add_argument("--out", required=True, help="output file")

    a = sub.add_parser("analyze", help="trace the MSS at one parameter value")
    common(a)
    a.add_argument("--u", type=float, default=0.0, help="family parameter")
    a.add_argument("--svg", help="also render the report to this SVG file")
    a.set_defaults(func=cmd_analyze)

    s = sub.add_parser("scan", help="locate and classify transition events")
    common(s, "contour grid used by the scan (default from config, 128)")
    s.add_argument("--u-min", type=float, required=True)
    s.add_argument("--u-max", type=float, required=True)
    s.add_argument("--steps", type=int, help="scan steps (default from config, 200)")
    s.set_defaults(func=cmd_scan)

    o = sub.add_parser("oracle", help="dense t1,t2,g dump of the bitangency residual")
    common(o)
    o.add_argument("--u", type=float, default=0.0, help="family parameter")
    o.set_defaults(func=cmd_oracle)

    r = sub.add_parser("render", help="render an analysis report to SVG")
    r.add_argument("report", help="AnalysisReport JSON")
    r.add_argument("--out", required=True, help="output SVG")
    r.set_defaults(func=cmd_render)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s")
    try:
        return args.func(args)
    except InputError as exc:
        print(f"minkss: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except Exception as exc:
        print(f"minkss: numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
