"""Command-line entry point: ``markoff-mcshane <command> ...``.

Exit codes
----------
0  success
1  an identity check disagreed with its expected value
2  unparseable input or invalid option
3  Bowditch conditions violated, or a sum refused because of them
4  budget exhausted without a verdict (inconclusive)
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import appendix_series
from .bowditch import INCONCLUSIVE, VIOLATED, BQConfig, check_bq
from .farey import ROOT, DirectedEdge, IntegerMatrix2, Slope, parity_class, regions_within, sorted_slopes
from .identities import (BQRefused, DomainError, NotInvariant, Weights, anosov_fixed_seed, h_mu,
                         sum_branch, sum_main, sum_relative, sum_tricolor, z_branch)
from .markoff import (MarkoffMap, TraceOverflow, from_matrices, from_seed, parse_complex,
                      parse_seed)
from .scan import MODES, ScanConfig, run_scan

log = logging.getLogger("markoff_mcshane")

EXIT_OK, EXIT_MISMATCH, EXIT_PARSE, EXIT_BQ, EXIT_BUDGET = 0, 1, 2, 3, 4
ENUMERATE_CAP = 14


class UsageError(ValueError):
    pass


def _pair(v: complex) -> list[float]:
    return [v.real, v.imag]


def _complex_list(text: str, n: int | None = None) -> list[complex]:
    values = [parse_complex(p) for p in text.split(",")]
    if n is not None and len(values) != n:
        raise UsageError(f"expected {n} comma-separated values, got {text!r}")
    return values


def parse_matrices(text: str) -> MarkoffMap:
    """``a11,a12,a21,a22;b11,b12,b21,b22``."""
    parts = text.split(";")
    if len(parts) != 2:
        raise UsageError("--matrices needs two matrices separated by ';'")
    A, B = (np.array(_complex_list(p, 4)).reshape(2, 2) for p in parts)
    return from_matrices(A, B)


def parse_edge(text: str) -> DirectedEdge:
    """``root:k`` (k-th inward edge at the root) or ``X,Y:Z>W``."""
    head, _, rest = text.partition(":")
    if head == "root":
        k = int(rest)
        edges = ROOT.edges()
        if not 0 <= k < len(edges):
            raise UsageError("root edge index must be 0, 1 or 2")
        return edges[k]
    tail, _, to = rest.partition(">")
    x, y = (Slope.parse(s) for s in head.split(","))
    return DirectedEdge((x, y), Slope.parse(tail), Slope.parse(to))


def build_map(args) -> MarkoffMap:
    if args.seed and args.matrices:
        raise UsageError("give --seed or --matrices, not both")
    if args.matrices:
        return parse_matrices(args.matrices)
    if not args.seed:
        raise UsageError("a --seed or --matrices is required")
    values = _complex_list(args.seed)
    if len(values) == 2:
        if args.mu is None:
            raise UsageError("a two-value seed needs --mu to fix z")
        x, y = values
        return from_seed(x, y, z_branch(x, y, parse_complex(args.mu)))
    if len(values) != 3:
        raise UsageError("--seed takes x,y,z or x,y together with --mu")
    return from_seed(*parse_seed(args.seed))


def bq_config(args) -> BQConfig:
    return BQConfig(max_depth=args.depth, relaxed=args.relaxed)


def _emit(args, payload) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _bq_exit(status: str) -> int:
    return {VIOLATED: EXIT_BQ, INCONCLUSIVE: EXIT_BUDGET}.get(status, EXIT_OK)


def cmd_verify(args) -> int:
    theta = IntegerMatrix2.parse(args.theta) if args.theta else None
    if args.which == "relative":
        if theta is None:
            raise UsageError("verify relative needs --theta")
        if args.seed or args.matrices:
            m = build_map(args)
        else:
            mu = parse_complex(args.mu) if args.mu is not None else 0j
            found = anosov_fixed_seed(theta, mu)
            if not found:
                log.error("no theta-fixed character found")
                return EXIT_BUDGET
            m = from_seed(*found[0])
    else:
        m = build_map(args)
    cfg = bq_config(args)
    report = None if args.which == "relative" else check_bq(m, cfg)
    payload = {"which": args.which, "map": m.to_json(),
               "bq_report": None if report is None else report.to_json()}
    kw = dict(tol=args.tol, max_depth=args.depth, force=args.force, bq=cfg)
    try:
        if args.which == "main":
            res = sum_main(m, **kw)
        elif args.which == "tricolor":
            w = Weights(*_complex_list(args.weights, 3)) if args.weights else Weights(0.2, 0.3, 0.5)
            res = sum_tricolor(m, w, **kw)
            payload["weights"] = [_pair(complex(p)) for p in (w.p1, w.p2, w.p3)]
        elif args.which == "branch":
            e = parse_edge(args.edge or "root:0")
            res = sum_branch(m, e, **kw)
            payload["edge"] = str(e)
        else:
            res = sum_relative(m, theta, **kw)
            payload["theta"] = [theta.a, theta.b, theta.c, theta.d]
    except BQRefused as exc:
        payload["bq_report"] = exc.report.to_json()
        payload["series_result"] = None
        _emit(args, payload)
        return _bq_exit(exc.report.status) or EXIT_BQ
    except NotInvariant as exc:
        log.error("%s", exc)
        payload["series_result"] = None
        payload["refused"] = str(exc)
        _emit(args, payload)
        return EXIT_BQ
    expected = complex(res.expected)
    err = res.abs_error
    limit = 10 * max(args.tol, res.residual_estimate)
    payload.update(series_result=res.to_json(), expected=_pair(expected), abs_error=err,
                   agrees=err <= limit)
    _emit(args, payload)
    if not res.reliable:
        return EXIT_BUDGET
    return EXIT_OK if err <= limit else EXIT_MISMATCH


def enumerate_rows(m: MarkoffMap, depth: int) -> list[dict]:
    mu = m.mu
    rows = []
    for x in sorted_slopes(regions_within(depth, m.root)):
        v = m.trace(x)
        try:
            h = abs(h_mu(v, mu))
        except DomainError:
            h = None
        rows.append({"slope": str(x), "class": parity_class(x), "trace": _pair(v), "abs_h": h})
    return rows


def cmd_enumerate(args) -> int:
    if args.depth > ENUMERATE_CAP:
        raise UsageError(f"enumerate depth is capped at {ENUMERATE_CAP}")
    m = build_map(args)
    rows = enumerate_rows(m, args.depth)
    if args.format == "csv":
        lines = ["slope,class,trace_re,trace_im,abs_h"]
        for r in rows:
            h = "" if r["abs_h"] is None else repr(r["abs_h"])
            lines.append(f"{r['slope']},{r['class']},{r['trace'][0]!r},{r['trace'][1]!r},{h}")
        text = "\n".join(lines) + "\n"
        if args.out:
            Path(args.out).write_text(text)
        else:
            sys.stdout.write(text)
    else:
        _emit(args, {"map": m.to_json(), "depth": args.depth, "rows": rows})
    return EXIT_OK


def cmd_check_bq(args) -> int:
    m = build_map(args)
    report = check_bq(m, bq_config(args))
    _emit(args, {"map": m.to_json(), "bq_report": report.to_json()})
    return _bq_exit(report.status)


def cmd_scan(args) -> int:
    fixed = {}
    for item in args.fixed or []:
        key, _, val = item.partition("=")
        if key not in ("x", "y", "mu"):
            raise UsageError(f"unknown fixed value {key!r}")
        fixed[key] = parse_complex(val)
    if args.mu is not None:
        fixed.setdefault("mu", parse_complex(args.mu))
    if args.seed:
        vals = _complex_list(args.seed)
        fixed.setdefault("x", vals[0])
        if len(vals) > 1:
            fixed.setdefault("y", vals[1])
    w, _, h = args.resolution.partition("x")
    cfg = ScanConfig(
        mode=args.mode,
        fixed_values=fixed,
        center=parse_complex(args.center),
        width=args.width,
        height=args.height if args.height is not None else args.width,
        resolution=(int(w), int(h or w)),
        bq=BQConfig(max_depth=args.depth, relaxed=args.relaxed, max_vertices=args.max_vertices),
    )
    result = run_scan(cfg, args.workers)
    formats = args.format or ["pgm", "csv"]
    out = Path(args.out or "scan")
    written = []
    for fmt in formats:
        path = out.with_suffix("." + fmt)
        if fmt == "pgm":
            path.write_bytes(result.pgm_bytes())
        elif fmt == "csv":
            path.write_text(result.csv_text())
        else:
            path.write_text(json.dumps(result.summary(), indent=2, sort_keys=True) + "\n")
        written.append(str(path))
    summary = result.summary()
    summary["files"] = written
    sys.stdout.write(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    return EXIT_OK


def cmd_prop41(args) -> int:
    report = appendix_series.property_suite(args.trials, args.rng_seed)
    _emit(args, report)
    return EXIT_OK if report["pass"] else EXIT_MISMATCH


def _common(depth: int) -> argparse.ArgumentParser:
    # a fresh parent per subcommand: argparse shares action objects between
    # children, so set_defaults on one would leak into the others
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", help="x,y,z (or x,y with --mu); complex as re+imi")
    common.add_argument("--matrices", help="a11,a12,a21,a22;b11,b12,b21,b22")
    common.add_argument("--mu", help="mu for two-value seeds, scans and fixed characters")
    common.add_argument("--depth", type=int, default=depth)
    common.add_argument("--tol", type=float, default=1e-10)
    common.add_argument("--relaxed", action="store_true", help="tolerate traces equal to +-2")
    common.add_argument("--out", help="output file (default stdout)")
    common.add_argument("--rng-seed", type=int, default=0)
    return common


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="markoff-mcshane", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", parents=[_common(64)], help="run one identity and compare")
    v.add_argument("which", choices=["main", "tricolor", "branch", "relative"])
    v.add_argument("--theta", help="a,b,c,d for relative sums")
    v.add_argument("--edge", help="root:k or X,Y:Z>W for branch sums")
    v.add_argument("--weights", help="p1,p2,p3 for tricolor sums")
    v.add_argument("--force", action="store_true", help="sum even without a BQ certificate")
    v.set_defaults(func=cmd_verify)

    e = sub.add_parser("enumerate", parents=[_common(2)], help="list slopes, classes and traces")
    e.add_argument("--format", choices=["json", "csv"], default="json")
    e.set_defaults(func=cmd_enumerate)

    b = sub.add_parser("check-bq", parents=[_common(64)], help="test the Bowditch conditions")
    b.set_defaults(func=cmd_check_bq)

    s = sub.add_parser("scan", parents=[_common(24)], help="raster scan of BQ verdicts")
    s.add_argument("--mode", choices=MODES, default="vary_z")
    s.add_argument("--fixed", action="append", help="x=..., y=... or mu=... (repeatable)")
    s.add_argument("--center", default="0")
    s.add_argument("--width", type=float, default=4.0)
    s.add_argument("--height", type=float)
    s.add_argument("--resolution", default="128x128", help="WxH")
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--max-vertices", type=int, default=4000)
    s.add_argument("--format", action="append", choices=["pgm", "csv", "json"])
    s.set_defaults(func=cmd_scan)

    q = sub.add_parser("prop41", parents=[_common(64)], help="closed forms against direct sums")
    q.add_argument("--trials", type=int, default=1000)
    q.set_defaults(func=cmd_prop41)
    return p


def _configure_logging() -> None:
    level = os.environ.get("MARKOFF_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")


def main(argv=None) -> int:
    _configure_logging()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_PARSE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (UsageError, ValueError, ZeroDivisionError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_PARSE
    except TraceOverflow as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_BUDGET
    except OSError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
