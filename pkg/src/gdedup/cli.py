"""Command-line frontend: ``gdedup {encode,decode,bounds,simulate,sweep,plot}``.

Exit status is 0 on success, 1 on usage errors and 2 on data or decode errors.
"""

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path
from typing import Sequence

from . import analysis
from .bitstream import BitstreamError
from .code import CodeSpec
from .codec import EncodedStream, decode, encode, join_chunks, split_chunks
from .harness import (
    ExperimentConfig,
    default_record_points,
    emit_plot,
    export_csv,
    read_csv,
    run_experiment,
    sweep_chunk_length,
    sweep_slope,
)
from .source import build_source

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # type: ignore[override]
        raise UsageError(f"{self.prog}: error: {message}")


def _add_code_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--m", type=int, help="parity bits of the Hamming code (n = 2^m - 1)")
    p.add_argument("--n", type=int, help="raw chunk length in bits (classic mode only)")
    p.add_argument("--k-mode", choices=("full", "compact"), default="full")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="gdedup", description="Generalized deduplication toolkit.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("encode", help="encode a raw bit file into a GDDP container")
    p.add_argument("--mode", choices=("classic", "generalized"), default="generalized")
    _add_code_args(p)
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--bits", type=int, help="exact input length in bits (multiple of n)")

    p = sub.add_parser("decode", help="decode a GDDP container")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--bits-out", action="store_true", help="print the decoded bit length to stdout")

    p = sub.add_parser("bounds", help="tabulate the analytical length and ratio bounds")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--active", type=int, required=True, help="number of active bases |X|")
    p.add_argument("--chunks", type=int, required=True, help="largest C")
    p.add_argument("--k-mode", choices=("full", "compact"), default="full")
    p.add_argument("--out", help="CSV path (default: stdout)")

    p = sub.add_parser("simulate", help="Monte Carlo comparison of both coders")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--active", type=int, required=True)
    p.add_argument("--chunks", type=int, default=16384)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--k-mode", choices=("full", "compact"), default="full")
    p.add_argument("--baseline", action="store_true", help="add the DEFLATE column")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", required=True, help="CSV path")
    p.add_argument("--plot", help="also write SVG charts using this path stem")

    p = sub.add_parser("sweep", help="peak ratio as a function of chunk length")
    p.add_argument("--m-values", type=int, nargs="+", required=True)
    p.add_argument("--active", type=int, required=True)
    p.add_argument("--chunks", type=int, default=2048)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--k-mode", choices=("full", "compact"), default="full")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", help="CSV path (default: stdout)")

    p = sub.add_parser("plot", help="render SVG charts from a simulate CSV")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True, help="path stem for the SVG files")
    return parser


def _code_spec(args: argparse.Namespace, mode: str) -> CodeSpec:
    try:
        return _code_spec_unchecked(args, mode)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _code_spec_unchecked(args: argparse.Namespace, mode: str) -> CodeSpec:
    if args.m is not None and args.n is not None:
        raise UsageError("give either --m or --n, not both")
    if args.m is not None:
        return CodeSpec.hamming(args.m, args.k_mode)
    if args.n is None:
        raise UsageError("--m is required (or --n in classic mode)")
    if mode != "classic":
        raise UsageError("--n is only valid with --mode classic")
    if args.k_mode != "full":
        raise UsageError("--k-mode compact needs a Hamming code")
    return CodeSpec.trivial(args.n)


def _cmd_encode(args: argparse.Namespace) -> int:
    spec = _code_spec(args, args.mode)
    data = Path(args.input).read_bytes()
    if args.bits is not None and not 0 <= args.bits <= len(data) * 8:
        raise UsageError(f"--bits {args.bits} outside the {len(data) * 8}-bit input")
    chunks = split_chunks(data, spec.n, args.bits)
    Path(args.output).write_bytes(encode(chunks, spec, args.mode).to_bytes())
    return EXIT_OK


def _cmd_decode(args: argparse.Namespace) -> int:
    stream = EncodedStream.from_bytes(Path(args.input).read_bytes())
    chunks = decode(stream)
    data, nbits = join_chunks(chunks, stream.n)
    Path(args.output).write_bytes(data)
    if args.bits_out:
        print(nbits)
    return EXIT_OK


def _open_out(path: str | None):
    return open(path, "w", newline="") if path else sys.stdout


def _cmd_bounds(args: argparse.Namespace) -> int:
    args.n = None
    spec = _code_spec(args, "generalized")
    if not 1 <= args.active <= spec.base_count:
        raise UsageError(f"--active must be in [1, {spec.base_count}]")
    if args.chunks < 1:
        raise UsageError("--chunks must be at least 1")
    x, y = args.active, spec.deviation_count
    tl = analysis.theta_lower_series(args.chunks, x, y, spec.k)
    tu = analysis.theta_upper_series(args.chunks, x, y, spec.k)
    dl, du = analysis.dedup_bounds_series(args.chunks, x * y, spec.n)
    fh = _open_out(args.out)
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["C", "theta_L_gen", "theta_U_gen", "theta_L_classic", "theta_U_classic", "ratio_lower", "ratio_upper"])
        for C in default_record_points(args.chunks):
            i = C - 1
            w.writerow([C] + [repr(v) for v in (tl[i], tu[i], dl[i], du[i], dl[i] / tu[i], du[i] / tl[i])])
    finally:
        if fh is not sys.stdout:
            fh.close()
    return EXIT_OK


def _cmd_simulate(args: argparse.Namespace) -> int:
    if args.trials < 1 or args.chunks < 1:
        raise UsageError("--trials and --chunks must be at least 1")
    try:
        src = build_source(args.m, args.active, args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    cfg = ExperimentConfig(
        src, args.chunks, args.trials, args.k_mode, baseline_enabled=args.baseline, workers=args.workers
    )
    table = run_experiment(cfg)
    export_csv(table, args.out)
    if args.plot:
        emit_plot(table, args.plot)
    return EXIT_OK


def _cmd_sweep(args: argparse.Namespace) -> int:
    records = sweep_chunk_length(
        args.m_values, args.active, args.trials, args.chunks, args.seed, args.k_mode, args.workers
    )
    fh = _open_out(args.out)
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["m", "n", "max_ratio", "argmax_C"])
        for r in records:
            w.writerow([r.m, r.n, repr(r.max_ratio), r.argmax_C])
        if len(records) > 1:
            fh.write(f"# slope={sweep_slope(records)!r}\n")
    finally:
        if fh is not sys.stdout:
            fh.close()
    return EXIT_OK


def _cmd_plot(args: argparse.Namespace) -> int:
    for path in emit_plot(read_csv(args.input), args.output):
        print(path)
    return EXIT_OK


_COMMANDS = {
    "encode": _cmd_encode,
    "decode": _cmd_decode,
    "bounds": _cmd_bounds,
    "simulate": _cmd_simulate,
    "sweep": _cmd_sweep,
    "plot": _cmd_plot,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except (BitstreamError, ValueError, OSError) as exc:
        print(f"gdedup: error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
