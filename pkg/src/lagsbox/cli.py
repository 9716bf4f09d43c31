"""Command-line front end: ``lagsbox {gen,analyze,compare,trace,dynamics,image}``.

Exit codes: 0 success, 2 usage or invalid configuration, 3 parse/format or
I/O failure, 4 generation exhaustion, 5 invariant violation under
``--strict``.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .chaos import (
    PRESETS,
    GeneratorConfig,
    LogisticParams,
    bifurcation_scan,
    fixed_points,
    lyapunov_exponent,
    trace,
    write_bits,
    write_trace_csv,
)
from .criteria import full_report
from .errors import (
    ConfigError,
    DomainError,
    ExhaustionError,
    FamilyTooSmallError,
    FixtureParseError,
    ImageFormatError,
    NotBijectiveError,
)
from .imaging import (
    bundled_image,
    chi_square_uniformity,
    histogram,
    read_pgm,
    substitute,
    unsubstitute,
    write_histogram_csv,
    write_pgm,
)
from .report import comparison_row, format_comparison, format_json, format_text, write_csv_dir
from .sbox import bundled_fixture, format_fixture, generate_family, load_fixture

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_FORMAT = 3
EXIT_EXHAUSTED = 4
EXIT_STRICT = 5

BUNDLED_PREFIX = "bundled:"


class CommandError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _lags(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(k) for k in text.replace(" ", "").split(",") if k)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"lags must be comma-separated integers, got {text!r}") from exc


def _add_config_options(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("generator configuration (flags override --config, which overrides --preset)")
    g.add_argument("--preset", choices=sorted(PRESETS), default="table2", help="base parameter set (default: table2)")
    g.add_argument("--config", metavar="FILE", help="key = value configuration file")
    g.add_argument("--alpha1", type=float)
    g.add_argument("--alpha2", type=float)
    g.add_argument("--x01", type=float)
    g.add_argument("--x02", type=float)
    g.add_argument("--lags1", type=_lags, metavar="K,K,...")
    g.add_argument("--lags2", type=_lags, metavar="K,K,...")
    g.add_argument("--burn-in", dest="burn_in", type=int)


def _config(args) -> GeneratorConfig:
    config = PRESETS[args.preset]
    if args.config:
        try:
            text = Path(args.config).read_text()
        except OSError as exc:
            raise CommandError(f"cannot read config: {exc}", EXIT_FORMAT) from exc
        config = GeneratorConfig.from_text(text, base=config)
    return config.with_overrides(
        alpha1=args.alpha1, alpha2=args.alpha2, x01=args.x01, x02=args.x02,
        lags1=args.lags1, lags2=args.lags2, burn_in=args.burn_in,
    )


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _load_sbox(path: str, *, check: bool = True):
    if path.startswith(BUNDLED_PREFIX):
        try:
            return bundled_fixture(path[len(BUNDLED_PREFIX):])
        except KeyError as exc:
            raise CommandError(str(exc), EXIT_USAGE) from exc
    try:
        return load_fixture(path, check=check)
    except OSError as exc:
        raise CommandError(f"{path}: {exc.strerror or exc}", EXIT_FORMAT) from exc


def cmd_gen(args) -> int:
    config = _config(args)
    family = generate_family(config, n=args.n, count=args.count, max_bits=args.max_bits)
    flat = {k: list(v) if isinstance(v, tuple) else v for k, v in config.as_flat().items()}
    if args.count == 1:
        box = family[0]
        text = format_fixture(box)
        provenance = {"config": flat, "n": args.n, "offset": 0, "bits_consumed": box.bits_consumed}
        if args.out:
            Path(args.out).write_text(text)
            Path(args.out + ".provenance.json").write_text(json.dumps(provenance, indent=2) + "\n")
        else:
            sys.stdout.write(text)
        return EXIT_OK
    if not args.out:
        raise CommandError("--count > 1 needs --out DIRECTORY", EXIT_USAGE)
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    width = max(4, len(str(args.count - 1)))
    members = []
    for k, box in enumerate(family):
        name = f"sbox_{k:0{width}d}.txt"
        (outdir / name).write_text(format_fixture(box))
        members.append({"file": name, "offset": family.offsets[k], "bits_consumed": box.bits_consumed})
    (outdir / "config.txt").write_text(config.to_text())
    (outdir / "family.json").write_text(json.dumps({"config": flat, "n": args.n, "members": members}, indent=2) + "\n")
    return EXIT_OK


def cmd_analyze(args) -> int:
    box = _load_sbox(args.input, check=False)
    report = full_report(box)
    if args.format == "csv-dir":
        if not args.out:
            raise CommandError("--format csv-dir needs --out DIRECTORY", EXIT_USAGE)
        write_csv_dir(report, args.out)
    elif args.format == "json":
        _emit(format_json(report, indent=2 if args.pretty else None), args.out)
    else:
        _emit(format_text(report), args.out)
    if args.strict and not report.bijective:
        print(f"{args.input}: not bijective", file=sys.stderr)
        return EXIT_STRICT
    return EXIT_OK


def cmd_compare(args) -> int:
    rows, failed = [], False
    for path in args.inputs:
        try:
            box = _load_sbox(path, check=False)
        except (CommandError, FixtureParseError, ValueError) as exc:
            print(f"{path}: {exc}", file=sys.stderr)
            failed = True
            continue
        name = path[len(BUNDLED_PREFIX):] if path.startswith(BUNDLED_PREFIX) else Path(path).stem
        rows.append(comparison_row(name, full_report(box)))
    if rows:
        _emit(format_comparison(rows, args.format), args.out)
    return EXIT_FORMAT if failed else EXIT_OK


def cmd_trace(args) -> int:
    config = _config(args)
    if args.samples < 0:
        raise CommandError("--samples must be nonnegative", EXIT_USAGE)
    columns = trace(config, args.samples)
    buf = io.StringIO()
    write_trace_csv(buf, columns)
    _emit(buf.getvalue(), args.out)
    if args.bits:
        write_bits(args.bits, (columns["z"] > 0.5).astype(np.uint8), args.bits_format)
    return EXIT_OK


def _alphas(args) -> list[float]:
    if args.alpha:
        return list(args.alpha)
    steps = args.steps
    return np.linspace(args.alpha_min, args.alpha_max, steps).tolist() if steps > 1 else [args.alpha_min]


def _num(v: float) -> str:
    if math.isinf(v):
        return "-inf" if v < 0 else "inf"
    return format(v, ".10g")


def cmd_dynamics(args) -> int:
    alphas = _alphas(args)
    for a in alphas:
        if not -2.0 <= a <= 4.0:
            raise CommandError(f"alpha={a} outside [-2, 4]", EXIT_USAGE)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    if args.mode == "fixed-points":
        writer.writerow(["alpha", "fixed_points"])
        for a in alphas:
            points = ";".join(f"{_num(p.value)},{p.stability}" for p in fixed_points(a))
            writer.writerow([_num(a), points])
    elif args.mode == "lyapunov":
        writer.writerow(["alpha", "lyapunov"])
        for a in alphas:
            lam = lyapunov_exponent(LogisticParams(a, args.x0), n_iter=args.iterations, burn_in=args.burn_in)
            writer.writerow([_num(a), _num(lam)])
    else:
        writer.writerow(["alpha", "x"])
        for a in alphas:
            for alpha, orbit in bifurcation_scan(a, a, 1, burn_in=args.burn_in, keep=args.keep, x0=args.x0):
                for x in orbit:
                    writer.writerow([_num(alpha), repr(float(x))])
    _emit(buf.getvalue(), args.out)
    return EXIT_OK


def cmd_image(args) -> int:
    if args.input.startswith(BUNDLED_PREFIX):
        if args.input != BUNDLED_PREFIX + "camera":
            raise CommandError(f"no bundled image {args.input!r}; use {BUNDLED_PREFIX}camera", EXIT_USAGE)
        image = bundled_image()
    else:
        try:
            image = read_pgm(args.input)
        except OSError as exc:
            raise CommandError(f"{args.input}: {exc.strerror or exc}", EXIT_FORMAT) from exc
    config = _config(args)
    family = generate_family(config, n=8, count=image.height)
    result = unsubstitute(image, family) if args.decrypt else substitute(image, family)
    write_pgm(args.out, result)
    hist_in, hist_out = histogram(image), histogram(result)
    if args.hist:
        write_histogram_csv(args.hist, hist_in)
    if args.hist_out:
        write_histogram_csv(args.hist_out, hist_out)
    print(
        f"rows {image.height} columns {image.width} "
        f"chi2_in {chi_square_uniformity(hist_in):.2f} chi2_out {chi_square_uniformity(hist_out):.2f}"
    )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lagsbox", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate S-box fixture(s) from the chaotic bit stream")
    _add_config_options(p)
    p.add_argument("--n", type=int, default=8, help="word size in bits (default 8)")
    p.add_argument("--count", type=int, default=1, help="number of consecutive S-boxes (default 1)")
    p.add_argument("--max-bits", type=int, help="bit budget per S-box (default 64*n*2**n)")
    p.add_argument("--out", help="fixture file, or directory when --count > 1")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("analyze", help="evaluate the six criteria on one fixture")
    p.add_argument("--in", dest="input", required=True, help="fixture path or bundled:table2 / bundled:aes")
    p.add_argument("--format", choices=("text", "json", "csv-dir"), default="text")
    p.add_argument("--out", help="output file (directory for csv-dir); stdout otherwise")
    p.add_argument("--pretty", action="store_true", help="indent JSON output")
    p.add_argument("--strict", action="store_true", help="exit 5 when the table is not bijective")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("compare", help="one comparison row per fixture")
    p.add_argument("--in", dest="inputs", nargs="+", required=True, metavar="FIXTURE")
    p.add_argument("--format", choices=("text", "json", "csv"), default="text")
    p.add_argument("--out")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("trace", help="CSV trace of orbit, lag series and delayed map")
    _add_config_options(p)
    p.add_argument("--samples", type=int, default=10000)
    p.add_argument("--out", help="CSV path (stdout otherwise)")
    p.add_argument("--bits", metavar="PATH", help="also write the quantized bits")
    p.add_argument("--bits-format", choices=("packed", "ascii"), default="packed")
    p.set_defaults(func=cmd_trace)

    p = sub.add_parser("dynamics", help="logistic-map diagnostics")
    p.add_argument("--mode", choices=("lyapunov", "bifurcation", "fixed-points"), required=True)
    p.add_argument("--alpha", type=float, action="append", help="explicit parameter value (repeatable)")
    p.add_argument("--alpha-min", type=float, default=-2.0)
    p.add_argument("--alpha-max", type=float, default=4.0)
    p.add_argument("--steps", type=int, default=121)
    p.add_argument("--x0", type=float, default=0.8147)
    p.add_argument("--iterations", type=int, default=1_000_000)
    p.add_argument("--burn-in", type=int, default=1000)
    p.add_argument("--keep", type=int, default=100)
    p.add_argument("--out")
    p.set_defaults(func=cmd_dynamics)

    p = sub.add_parser("image", help="row-wise dynamical S-box substitution of a PGM image")
    _add_config_options(p)
    p.add_argument("--in", dest="input", required=True, help="binary PGM path or bundled:camera")
    p.add_argument("--out", required=True)
    p.add_argument("--decrypt", action="store_true", help="apply the inverse substitution")
    p.add_argument("--hist", metavar="CSV", help="histogram of the input image")
    p.add_argument("--hist-out", metavar="CSV", help="histogram of the output image")
    p.set_defaults(func=cmd_image)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CommandError as exc:
        print(f"lagsbox: {exc}", file=sys.stderr)
        return exc.code
    except (ConfigError, DomainError) as exc:
        print(f"lagsbox: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ExhaustionError as exc:
        print(f"lagsbox: {exc}", file=sys.stderr)
        return EXIT_EXHAUSTED
    except (FixtureParseError, ImageFormatError, NotBijectiveError, FamilyTooSmallError) as exc:
        print(f"lagsbox: {exc}", file=sys.stderr)
        return EXIT_FORMAT
    except OSError as exc:
        print(f"lagsbox: {exc}", file=sys.stderr)
        return EXIT_FORMAT


if __name__ == "__main__":
    sys.exit(main())
