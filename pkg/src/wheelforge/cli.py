"""Command-line interface for wheelforge.

Usage:
    wheelforge pattern -k 3                 # gap pattern as JSON
    wheelforge verify -k 9                  # structural checks, exit 1 on failure
    wheelforge histogram -k 4               # gap,count CSV
    wheelforge maxskip -k 9                 # largest gap vs. the published table
    wheelforge maxskip --reference-only     # list the published table with labels
    wheelforge primes -n 3                  # consecutive primes read off the wheel
    wheelforge intervals -c 3 -m 1000       # prime-occupied interval counts (CSV)
    wheelforge sweep --c-list 3,10 --m-max 10000

Exit codes: 0 success, 1 verification mismatch, 2 usage, 3 resource cap.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import random
import sys
import tempfile
from pathlib import Path
from typing import Optional

from . import __version__
from .engine import DEFAULT_SEGMENT_LENGTH, ScanConfig, scan_level
from .errors import ResourceCapError, UsageError
from .levels import WheelLevel
from .primetools import (
    chi_bounds_sweep,
    consecutive_primes_from_block,
    interval_series,
    interval_stats_csv,
)
from .reference import claim_for, claims
from .residues import count_gap, max_skip_lower_bound, multiplicity_small_gaps
from .wheel import Pattern, pattern_build, pattern_sieve_oracle, prefix_sums_coprime, verify_pattern

EXIT_OK, EXIT_MISMATCH, EXIT_USAGE, EXIT_RESOURCE = 0, 1, 2, 3
DEFAULT_SEED = 20140414
DEFAULT_MAX_GAPS = 100_000


def _write(text: str, out: Optional[str]):
    """Write to ``out`` atomically (temp file + rename), or to stdout."""
    if out is None:
        sys.stdout.write(text)
        return
    path = Path(out)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _json(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _table(pairs) -> str:
    width = max(len(str(k)) for k, _ in pairs)
    return "".join(f"{str(k).ljust(width)}  {v}\n" for k, v in pairs)


def _csv(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _scan_config(args, level: WheelLevel, **extra) -> ScanConfig:
    segment = DEFAULT_SEGMENT_LENGTH if args.segment_bytes is None else 2 * args.segment_bytes
    return ScanConfig(level, segment_length=segment, worker_count=args.workers,
                      long_run=args.long_run, **extra)


def cmd_pattern(args) -> int:
    level = WheelLevel(args.k)
    build = pattern_sieve_oracle if args.method == "sieve" else pattern_build
    pat = build(level)
    fmt = args.format or "json"
    if fmt == "json":
        text = _json(pat.to_json_dict(max_gaps=args.max_gaps))
    elif fmt == "csv":
        text = _csv(["index", "gap"], enumerate(pat.gaps.tolist()))
    else:
        text = _table([("k", level.k), ("primes", list(level.primes)),
                       ("period", pat.period), ("length", pat.length)])
    _write(text, args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    pat = pattern_build(WheelLevel(args.k))
    if args.inject_fault:
        gaps = pat.gaps.copy()
        gaps[0] += 2
        pat = Pattern(pat.level, gaps)
    report = verify_pattern(pat)
    rng = random.Random(args.seed)
    sample = [rng.randrange(pat.period) for _ in range(args.samples)]
    prefix_ok = prefix_sums_coprime(pat, sample)
    ok = report.ok and prefix_ok
    out = report.to_json_dict()
    out["prefix_sums_coprime"] = prefix_ok
    out["ok"] = ok
    fmt = args.format or "json"
    if fmt == "json":
        text = _json(out)
    elif fmt == "csv":
        text = _csv(["finding", "value"], out.items())
    else:
        text = _table(list(out.items()))
    _write(text, args.out)
    return EXIT_OK if ok else EXIT_MISMATCH


def _range(args):
    return None if args.range is None else tuple(args.range)


def cmd_histogram(args) -> int:
    level = WheelLevel(args.k)
    res = scan_level(_scan_config(args, level, range=_range(args)))
    hist = res.histogram
    formula = multiplicity_small_gaps(level)
    full = res.bounds == ScanConfig(level).bounds
    matches = None
    if full:
        matches = count_gap(hist, 2) == count_gap(hist, 4) == formula
    fmt = args.format or "csv"
    if fmt == "csv":
        text = hist.to_csv()
    elif fmt == "json":
        text = _json({
            "k": level.k,
            "histogram": {str(g): c for g, c in hist.items()},
            "gap_count": res.gap_count,
            "mode": hist.mode() if hist.entries else None,
            "small_gap_formula": formula,
            "formula_matches": matches,
        })
    else:
        text = _table(hist.items())
    _write(text, args.out)
    if matches is not None:
        print(f"gap-2/gap-4 counts vs formula {formula}: {'match' if matches else 'MISMATCH'}",
              file=sys.stderr)
    return EXIT_MISMATCH if matches is False else EXIT_OK


def _reference_listing(args) -> int:
    rows = claims() if args.k is None else [c for c in claims() if c.k == args.k]
    if not rows:
        raise UsageError(f"no published claim recorded for k={args.k}")
    fmt = args.format or "json"
    if fmt == "json":
        text = _json([c.to_json_dict() for c in rows])
    elif fmt == "csv":
        text = _csv(["k", "prime", "max_skip", "multiplicity", "defect", "verified"],
                    [(c.k, c.prime, c.max_skip, c.multiplicity, c.defect, c.verified) for c in rows])
    else:
        text = "".join(f"k={c.k:<3} p={c.prime:<4} max={c.max_skip} mult={c.multiplicity} "
                       f"defect={c.defect}  [{c.label}]\n" for c in rows)
    _write(text, args.out)
    return EXIT_OK


def cmd_maxskip(args) -> int:
    if args.reference_only:
        return _reference_listing(args)
    if args.k is None:
        raise UsageError("maxskip needs -k (or --reference-only)")
    level = WheelLevel(args.k)
    res = scan_level(_scan_config(args, level))
    claim = claim_for(level.k)
    agrees = claim.compare(res.max_gap, res.max_gap_multiplicity) if claim else None
    if claim is None or agrees is None:
        status = "no published value"
    elif agrees:
        status = "matches paper (verified)"
    else:
        status = "MISMATCH vs paper"

    csv_path = None
    if args.out is not None:
        csv_path = str(Path(args.out).with_suffix(".histogram.csv"))
        _write(res.histogram.to_csv(), csv_path)
    out = res.to_json_dict(histogram_csv=csv_path, verified=bool(agrees))
    bound = max_skip_lower_bound(level)
    out.update({
        "lower_bound": bound,
        "defect": res.max_gap - bound,
        "status": status,
        "reference": claim.to_json_dict() if claim else None,
    })
    fmt = args.format or "json"
    if fmt == "json":
        text = _json(out)
    elif fmt == "csv":
        keys = ["k", "max_gap", "multiplicity", "gap_count", "lower_bound", "defect", "status"]
        text = _csv(keys, [[out[k] for k in keys]])
    else:
        text = _table([(k, out[k]) for k in ("k", "max_gap", "multiplicity", "positions",
                                              "gap_count", "lower_bound", "defect", "status")])
    _write(text, args.out)
    return EXIT_MISMATCH if agrees is False else EXIT_OK


def cmd_primes(args) -> int:
    window = consecutive_primes_from_block(args.n)
    if window.below_stated_range:
        print(f"note: n={args.n} lies below the range the construction is stated for",
              file=sys.stderr)
    fmt = args.format or "json"
    data = window.to_json_dict()
    if fmt == "json":
        text = _json(data)
    elif fmt == "csv":
        text = _csv(["prime"], [[q] for q in window.primes])
    else:
        text = _table(list(data.items()))
    _write(text, args.out)
    return EXIT_OK if window.verified_against_sieve else EXIT_MISMATCH


def cmd_intervals(args) -> int:
    rows = interval_series(args.c, args.m)
    fmt = args.format or "csv"
    if fmt == "json":
        text = _json([{"c": r.c, "m": r.m, "chi_sum": r.chi_sum, "pi_mc": r.pi_mc,
                       "lower_ok": r.lower_ok, "upper_ok": r.upper_ok} for r in rows])
    else:
        text = interval_stats_csv(rows)
    _write(text, args.out)
    return EXIT_OK if all(r.bounds_hold for r in rows) else EXIT_MISMATCH


def cmd_sweep(args) -> int:
    c_values = [int(c) for c in args.c_list.split(",") if c.strip()]
    report = chi_bounds_sweep(c_values, args.m_max)
    fmt = args.format or "json"
    if fmt == "json":
        text = _json(report.to_json_dict())
    else:
        text = _csv(["c", "m", "bound"], report.violations)
    _write(text, args.out)
    return EXIT_OK if report.ok else EXIT_MISMATCH


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _global_flags(parser: argparse.ArgumentParser, suppress: bool):
    # subparsers repeat the globals with SUPPRESS so either position works
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    parser.add_argument("--format", choices=["json", "csv", "table"], default=d(None))
    parser.add_argument("--out", metavar="PATH", default=d(None))
    parser.add_argument("--workers", type=_positive, default=d(1))
    parser.add_argument("--segment-bytes", type=_positive, default=d(None))
    parser.add_argument("--long-run", action="store_true", default=d(False))
    parser.add_argument("--seed", type=int, default=d(DEFAULT_SEED))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wheelforge", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    _global_flags(parser, suppress=False)
    common = argparse.ArgumentParser(add_help=False)
    _global_flags(common, suppress=True)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("pattern", parents=[common], help="emit the gap pattern of a level")
    p.add_argument("-k", type=int, required=True)
    p.add_argument("--method", choices=["recursive", "sieve"], default="recursive")
    p.add_argument("--max-gaps", type=int, default=DEFAULT_MAX_GAPS,
                   help="omit the gap list when the period exceeds this")
    p.set_defaults(func=cmd_pattern)

    p = sub.add_parser("verify", parents=[common], help="check the structural findings")
    p.add_argument("-k", type=int, required=True)
    p.add_argument("--samples", type=int, default=64, help="random prefix sums to test")
    p.add_argument("--inject-fault", action="store_true", help="corrupt the first gap (negative test)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("histogram", parents=[common], help="gap histogram of a level")
    p.add_argument("-k", type=int, required=True)
    p.add_argument("--range", type=int, nargs=2, metavar=("LO", "HI"))
    p.set_defaults(func=cmd_histogram)

    p = sub.add_parser("maxskip", parents=[common], help="largest gap of a level")
    p.add_argument("-k", type=int)
    p.add_argument("--reference-only", action="store_true",
                   help="print the published table instead of scanning")
    p.set_defaults(func=cmd_maxskip)

    p = sub.add_parser("primes", parents=[common], help="consecutive primes from the wheel")
    p.add_argument("-n", type=int, required=True)
    p.set_defaults(func=cmd_primes)

    p = sub.add_parser("intervals", parents=[common], help="prime-occupied intervals of width c")
    p.add_argument("-c", type=_positive, required=True)
    p.add_argument("-m", type=_positive, required=True)
    p.set_defaults(func=cmd_intervals)

    p = sub.add_parser("sweep", parents=[common], help="bound sweep over several widths")
    p.add_argument("--c-list", default="3,4,10,30,246")
    p.add_argument("--m-max", type=_positive, default=10_000)
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"wheelforge: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ResourceCapError as exc:
        print(f"wheelforge: resource cap: {exc}", file=sys.stderr)
        return EXIT_RESOURCE


if __name__ == "__main__":
    sys.exit(main())
