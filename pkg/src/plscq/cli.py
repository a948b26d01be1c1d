"""Command-line front end.

Subcommands mirror the library: design a codebook, evaluate one
analytically or empirically, sweep SQNR across segment counts, dump the
compressor curves, and quantize a sample file.  Machine-readable output
is JSON/CSV at full precision; sweep and compress-curve additionally
render a figure (PNG) next to the delimited file unless --no-figure is
given.  Exit codes: 0 success, 1 validation error, 2 runtime or I/O
error.  No command leaves a partial artifact behind: files are written
to a temporary name and renamed into place.
"""

import argparse
import json
import math
import os
import sys

from . import __version__, analysis, codec, compressor, design

__all__ = ["main"]

_DB_DECIMALS = 2
_THRESHOLD_DECIMALS = 4


def _write_text_atomic(path: str, content: str) -> None:
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(content)
    os.replace(tmp, path)


def _sibling(path: str, new_ext: str) -> str:
    stem, ext = os.path.splitext(path)
    return (stem if ext else path) + new_ext


def _fmt(value: float, places: int, override) -> str:
    return f"{value:.{override if override is not None else places}f}"


def _stats_to_dict(stats: codec.StreamStats) -> dict:
    return {
        "count": stats.count,
        "signal_power": analysis._json_number(stats.signal_power),
        "noise_power": analysis._json_number(stats.noise_power),
        "sqnr_db": analysis._json_number(stats.sqnr_db),
    }


def _render_sweep_figure(result: analysis.SweepResult, path: str) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    series = {analysis.Variant.FORMULA: ([], []), analysis.Variant.OPTIMIZED: ([], [])}
    baseline = None
    for row in result.rows:
        if row.variant in series:
            series[row.variant][0].append(row.L)
            series[row.variant][1].append(row.report.sqnr_db)
        elif row.variant == analysis.Variant.COMPANDER:
            baseline = row.report.sqnr_db
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    labels = {
        analysis.Variant.FORMULA: "formula threshold",
        analysis.Variant.OPTIMIZED: "optimized threshold",
    }
    markers = {analysis.Variant.FORMULA: "o", analysis.Variant.OPTIMIZED: "s"}
    for variant, (ls, ys) in series.items():
        if ls:
            ax.plot(ls, ys, marker=markers[variant], label=labels[variant])
    if baseline is not None:
        ax.axhline(baseline, color="k", linestyle="--", linewidth=1.0, label="optimal compander")
    ax.set_xlabel("segments per side L")
    ax.set_ylabel("SQNR [dB]")
    ax.legend(loc="lower right")
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def _render_curve_figure(xs, c_opt, c_pwl, L: int, path: str) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.plot(xs, c_opt, label="optimal compressor")
    ax.plot(xs, c_pwl, linestyle="--", label=f"piecewise linear, {2 * L} segments")
    ax.set_xlabel("x")
    ax.set_ylabel("c(x)")
    ax.legend(loc="upper left")
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def _cmd_design(args) -> int:
    if args.xmax is not None:
        x_max = args.xmax
    elif args.xmax_formula:
        x_max = analysis.support_threshold_formula(args.levels)
    else:
        x_max, _ = analysis.optimize_threshold(args.levels, args.segments)
    codebook = design.build_codebook(
        design.QuantizerConfig(N=args.levels, L=args.segments, x_max=x_max)
    )
    design.save_codebook(codebook, args.out)
    counts = ",".join(str(c) for c in codebook.layout.cells_per_segment)
    print(
        f"N={args.levels} L={args.segments} "
        f"x_max={_fmt(x_max, _THRESHOLD_DECIMALS, args.precision)} "
        f"cells={counts} -> {args.out}"
    )
    return 0


def _cmd_eval(args) -> int:
    codebook = design.load_codebook(args.codebook)
    if args.method == "exact":
        report = analysis.exact_distortion(codebook)
    else:
        report = analysis.high_rate_report(codebook)
    cfg = codebook.config
    print(
        f"N={cfg.N} L={cfg.L} x_max={_fmt(cfg.x_max, _THRESHOLD_DECIMALS, args.precision)} "
        f"SQNR={_fmt(report.sqnr_db, _DB_DECIMALS, args.precision)} dB ({report.method.value})"
    )
    print(json.dumps(analysis.report_to_dict(report), allow_nan=False))
    if args.mc is not None:
        stats = codec.monte_carlo_sqnr(codebook, args.seed, args.mc)
        print(
            f"monte carlo: {stats.count} samples, "
            f"SQNR={_fmt(stats.sqnr_db, _DB_DECIMALS, args.precision)} dB"
        )
        print(json.dumps(_stats_to_dict(stats), allow_nan=False))
    return 0


def _cmd_sweep(args) -> int:
    try:
        segments = [int(part) for part in args.segments_list.split(",") if part.strip()]
    except ValueError:
        raise ValueError(f"--segments-list must be comma-separated integers, got {args.segments_list!r}")
    if args.baseline_xmax == "inf":
        baseline = math.inf
    elif args.baseline_xmax == "formula":
        baseline = analysis.support_threshold_formula(args.levels)
    else:
        try:
            baseline = float(args.baseline_xmax)
        except ValueError:
            raise ValueError(
                f"--baseline-xmax must be 'inf', 'formula' or a number, got {args.baseline_xmax!r}"
            )
    result = analysis.run_sweep(args.levels, segments, baseline_x_max=baseline)
    _write_text_atomic(args.out, analysis.sweep_to_csv(result))
    print(f"wrote {args.out}")
    json_path = _sibling(args.out, ".json")
    _write_text_atomic(json_path, analysis.sweep_to_json(result))
    print(f"wrote {json_path}")
    if not args.no_figure:
        figure_path = _sibling(args.out, ".png")
        _render_sweep_figure(result, figure_path)
        print(f"wrote {figure_path}")
    for row in result.rows:
        label = "baseline" if row.variant == analysis.Variant.COMPANDER else f"L={row.L}"
        print(
            f"  {label:8s} {row.variant.value:18s} "
            f"x_max={_fmt(row.x_max, _THRESHOLD_DECIMALS, args.precision)} "
            f"SQNR={_fmt(row.report.sqnr_db, _DB_DECIMALS, args.precision)} dB"
        )
    return 0


def _cmd_compress_curve(args) -> int:
    if args.points < 2:
        raise ValueError(f"--points must be >= 2, got {args.points}")
    optimal = compressor.build_optimal(args.xmax)
    pwl = compressor.build_piecewise(args.segments, args.xmax)
    span = 2.0 * args.xmax
    xs = [-args.xmax + span * k / (args.points - 1) for k in range(args.points)]
    xs[0], xs[-1] = -args.xmax, args.xmax
    c_opt = [compressor.evaluate_optimal(optimal, x) for x in xs]
    c_pwl = [compressor.evaluate_piecewise(pwl, x) for x in xs]
    lines = ["x,c_optimal,c_piecewise"]
    lines += [f"{x!r},{o!r},{p!r}" for x, o, p in zip(xs, c_opt, c_pwl)]
    _write_text_atomic(args.out, "\n".join(lines) + "\n")
    print(f"wrote {args.out}")
    if not args.no_figure:
        figure_path = _sibling(args.out, ".png")
        _render_curve_figure(xs, c_opt, c_pwl, args.segments, figure_path)
        print(f"wrote {figure_path}")
    return 0


def _cmd_quantize(args) -> int:
    codebook = design.load_codebook(args.codebook)
    stats = codec.quantize_file(codebook, args.input, args.output, text=args.text)
    print(json.dumps(_stats_to_dict(stats), allow_nan=False))
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plscq",
        description="Design and evaluate piecewise linear companding quantizers "
        "for a unit-variance Gaussian source.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("design", help="construct a codebook and write it as JSON")
    p.add_argument("--levels", type=int, default=128, help="number of quantization levels N")
    p.add_argument("--segments", type=int, default=8, help="segments per side L")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--xmax", type=float, help="explicit support threshold")
    group.add_argument("--xmax-formula", action="store_true", help="closed-form support threshold")
    group.add_argument("--xmax-optimize", action="store_true", help="SQNR-optimal support threshold")
    p.add_argument("--out", required=True, help="output codebook path")
    p.add_argument("--precision", type=int, default=None, help="decimals in the printed summary")
    p.set_defaults(handler=_cmd_design)

    p = sub.add_parser("eval", help="evaluate a codebook analytically, optionally by Monte Carlo")
    p.add_argument("--codebook", required=True, help="codebook JSON path")
    p.add_argument("--method", choices=["highrate", "exact"], default="highrate")
    p.add_argument("--mc", type=int, default=None, metavar="SAMPLES", help="also run Monte Carlo")
    p.add_argument("--seed", type=int, default=0, help="Monte Carlo stream seed")
    p.add_argument("--precision", type=int, default=None, help="decimals in the printed summary")
    p.set_defaults(handler=_cmd_eval)

    p = sub.add_parser("sweep", help="SQNR versus segment count, plus the compander baseline")
    p.add_argument("--levels", type=int, default=128, help="number of quantization levels N")
    p.add_argument("--segments-list", default="1,2,4,8", help="comma-separated segment counts")
    p.add_argument(
        "--baseline-xmax",
        default="inf",
        help="baseline support: 'inf' (default), 'formula', or a number",
    )
    p.add_argument("--out", required=True, help="output CSV path (JSON and PNG written alongside)")
    p.add_argument("--no-figure", action="store_true", help="skip the rendered figure")
    p.add_argument("--precision", type=int, default=None, help="decimals in the printed summary")
    p.set_defaults(handler=_cmd_sweep)

    p = sub.add_parser("compress-curve", help="tabulate the optimal and piecewise compressors")
    p.add_argument("--segments", type=int, required=True, help="segments per side L")
    p.add_argument("--xmax", type=float, required=True, help="support threshold")
    p.add_argument("--points", type=int, default=1001, help="grid points across [-xmax, xmax]")
    p.add_argument("--out", required=True, help="output CSV path (PNG written alongside)")
    p.add_argument("--no-figure", action="store_true", help="skip the rendered figure")
    p.add_argument("--precision", type=int, default=None, help="unused; accepted for symmetry")
    p.set_defaults(handler=_cmd_compress_curve)

    p = sub.add_parser("quantize", help="quantize a sample file to uint16 level indices")
    p.add_argument("--codebook", required=True, help="codebook JSON path")
    p.add_argument("--input", required=True, help="sample file (little-endian float64)")
    p.add_argument("--output", required=True, help="index file to write")
    p.add_argument("--text", action="store_true", help="read text samples, one decimal per line")
    p.add_argument("--precision", type=int, default=None, help="unused; accepted for symmetry")
    p.set_defaults(handler=_cmd_quantize)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exit_request:  # argparse exits with 2 on usage errors
        code = exit_request.code
        return 0 if code in (0, None) else 1
    try:
        return args.handler(args)
    except design.CodebookFormatError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    except (OSError, json.JSONDecodeError) as err:  # JSONDecodeError before its ValueError base
        print(f"error: {err}", file=sys.stderr)
        return 2
    except ValueError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
