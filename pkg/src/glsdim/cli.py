"""Command-line front end.

Subcommands: encode, decode, dim, sample, boxdim, cdf, validate.  Every
command reads the scheme from a JSON config (--scheme) and is deterministic
given its full flag set.  Exit codes: 1 config/usage error, 2 point without a
digit expansion, 3 no-root regime when --method root was forced, 4 indecisive
series bounds, 5 degenerate box-count fit.

Reals are displayed with 15 significant digits; machine-readable files carry
17 so doubles round-trip exactly.
"""

from __future__ import annotations

import argparse
import json
import re
import sys

from .dimension import dim_hausdorff, dim_limit, dim_root, dim_sup
from .errors import (ConfigError, DegenerateFitError, DeltaInfinityError,
                     GlsdimError, IndecisiveBoundError, NoRootError)
from .sampling import (DigitDistribution, box_count, empirical_cdf,
                       read_points_csv, sample_points, spectrum_dimension,
                       write_boxcount_csv, write_cdf_csv, write_sample_csv)
from .scheme import load_scheme, validate_scheme
from .support import SupportSet

_SCALE_RANGE = re.compile(r"^(\d+)\^-(\d+)\.\.(\d+)\^-(\d+)$")


def parse_scales(spec: str) -> list[float]:
    """Parse "3^-2..3^-8" (power ladder) or a comma list of floats."""
    m = _SCALE_RANGE.match(spec.strip())
    if m:
        base1, lo, base2, hi = (int(g) for g in m.groups())
        if base1 != base2:
            raise ConfigError(f"scale ladder bases differ in {spec!r}")
        if base1 < 2 or lo >= hi:
            raise ConfigError(f"bad scale ladder {spec!r}")
        return [float(base1) ** -p for p in range(lo, hi + 1)]
    try:
        scales = [float(s) for s in spec.split(",")]
    except ValueError:
        raise ConfigError(f"bad scales spec {spec!r}") from None
    if not scales:
        raise ConfigError("scales spec is empty")
    return scales


def _open_out(path):
    if path is None:
        return sys.stdout, False
    return open(path, "w", encoding="utf-8"), True


def _emit(path, write):
    fh, close = _open_out(path)
    try:
        write(fh)
    finally:
        if close:
            fh.close()


def _cmd_encode(args) -> int:
    scheme = load_scheme(args.scheme)
    digits = scheme.encode(args.x, args.n)
    print(",".join(str(d) for d in digits))
    return 0


def _cmd_decode(args) -> int:
    scheme = load_scheme(args.scheme)
    try:
        digits = [int(s) for s in args.digits.split(",")]
    except ValueError:
        raise ConfigError(f"bad digits spec {args.digits!r}") from None
    print(f"{scheme.decode(digits):.15g}")
    return 0


def _cmd_dim(args) -> int:
    scheme = load_scheme(args.scheme)
    v = SupportSet.from_spec(args.V)
    fam = scheme.weights
    if args.method == "root":
        res = dim_root(fam, v, **({"tol": args.tol} if args.tol else {}))
    elif args.method == "sup":
        res = dim_sup(fam, v, **({"tol": args.tol} if args.tol else {}))
    elif args.method == "limit":
        kw = {"tol": args.tol} if args.tol else {}
        res = dim_limit(fam, v, k_max=args.k_max, **kw)
    else:
        res = dim_hausdorff(fam, v, tol=args.tol)
    out = json.dumps(res.to_dict())
    print(out)
    if args.out:
        _emit(args.out, lambda fh: fh.write(out + "\n"))
    return 0


def _cmd_sample(args) -> int:
    scheme = load_scheme(args.scheme)
    p = DigitDistribution.from_spec(args.p, scheme.weights)
    sample = sample_points(scheme, p, args.n, args.count, args.seed)
    _emit(args.out, lambda fh: write_sample_csv(fh, sample))
    return 0


def _cmd_boxdim(args) -> int:
    with open(args.infile, "r", encoding="utf-8") as fh:
        points = read_points_csv(fh)
    scales = parse_scales(args.scales)
    floor = None
    if args.scheme and args.n:
        floor = load_scheme(args.scheme).q_max ** args.n
    result = box_count(points, scales, resolution_floor=floor)
    summary = result.to_dict()
    if args.compare:
        if not (args.scheme and args.p):
            raise ConfigError("--compare needs --scheme and --p for the theoretical value")
        scheme = load_scheme(args.scheme)
        p = DigitDistribution.from_spec(args.p, scheme.weights)
        theory = spectrum_dimension(scheme, p, args.tol)
        summary["theory"] = theory.value
        summary["difference"] = result.slope - theory.value
    print(json.dumps(summary))
    if args.out:
        _emit(args.out, lambda fh: write_boxcount_csv(fh, result))
    return 0


def _cmd_cdf(args) -> int:
    with open(args.infile, "r", encoding="utf-8") as fh:
        points = read_points_csv(fh)
    pairs = empirical_cdf(points, args.grid)
    _emit(args.out, lambda fh: write_cdf_csv(fh, pairs))
    return 0


def _cmd_validate(args) -> int:
    try:
        scheme = load_scheme(args.scheme)
    except (ConfigError, GlsdimError) as exc:
        print(json.dumps({"passed": False,
                          "checks": [{"name": "construction", "passed": False,
                                      "detail": str(exc)}]}))
        return 1
    report = validate_scheme(scheme)
    print(json.dumps(report.to_dict()))
    return 0 if report.passed else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="glsdim",
        description="Expansion codecs, dimensions of digit-restricted sets, "
                    "and Monte Carlo cross-checks.")
    sub = parser.add_subparsers(dest="command", required=True)

    def scheme_arg(sp, required=True):
        sp.add_argument("--scheme", required=required, help="scheme JSON config path")

    sp = sub.add_parser("encode", help="digits of x at a given rank")
    scheme_arg(sp)
    sp.add_argument("--x", type=float, required=True)
    sp.add_argument("--n", type=int, required=True, help="number of digits")
    sp.set_defaults(func=_cmd_encode)

    sp = sub.add_parser("decode", help="left endpoint of a digit string")
    scheme_arg(sp)
    sp.add_argument("--digits", required=True, help="comma-separated digits")
    sp.set_defaults(func=_cmd_decode)

    sp = sub.add_parser("dim", help="dimension of the digit-restricted set")
    scheme_arg(sp)
    sp.add_argument("--V", required=True,
                    help="support spec: all | only:0,2 | exclude:0,5")
    sp.add_argument("--tol", type=float, default=None)
    sp.add_argument("--method", choices=("auto", "root", "limit", "sup"), default="auto")
    sp.add_argument("--k-max", type=int, default=4096, dest="k_max",
                    help="truncation cap for --method limit")
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=_cmd_dim)

    sp = sub.add_parser("sample", help="sample points with i.i.d. digits")
    scheme_arg(sp)
    sp.add_argument("--p", required=True,
                    help="digit law: '0:0.5,2:0.5' or 'proportional:<support spec>'")
    sp.add_argument("--n", type=int, default=25, help="digits per point")
    sp.add_argument("--count", type=int, required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=_cmd_sample)

    sp = sub.add_parser("boxdim", help="box-counting slope of a sample CSV")
    sp.add_argument("--in", dest="infile", required=True, help="sample CSV path")
    sp.add_argument("--scales", required=True,
                    help="'3^-2..3^-8' or comma-separated values")
    sp.add_argument("--compare", action="store_true",
                    help="also print the theoretical dimension and difference")
    scheme_arg(sp, required=False)
    sp.add_argument("--p", default=None, help="digit law (for --compare)")
    sp.add_argument("--n", type=int, default=None,
                    help="sampling rank (enforces the resolution floor)")
    sp.add_argument("--tol", type=float, default=None)
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=_cmd_boxdim)

    sp = sub.add_parser("cdf", help="empirical CDF of a sample CSV")
    sp.add_argument("--in", dest="infile", required=True, help="sample CSV path")
    sp.add_argument("--grid", type=int, default=1000)
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=_cmd_cdf)

    sp = sub.add_parser("validate", help="structural checks of a scheme config")
    scheme_arg(sp)
    sp.set_defaults(func=_cmd_validate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DeltaInfinityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NoRootError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except IndecisiveBoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except DegenerateFitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 5
    except (ConfigError, GlsdimError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
