"""Command-line front end.

Exit codes: 0 success, 1 usage, 2 I/O, 3 invalid state, 4 aborted survey.
"""

from __future__ import annotations

import argparse
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__, measures
from .plotting import plot_script, render, script_name
from .qstate import FAMILY_DOMAINS, InvalidStateError, StateFileError, make_state, read_state_file
from .survey import (
    SurveyAborted,
    SurveyConfig,
    UpperCurve,
    bin_by_r,
    default_r_edges,
    family_curve,
    family_grid,
    fixed_r_ensembles,
    histogram,
    run_survey,
    werner_envelope,
)

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_STATE, EXIT_ABORT = 0, 1, 2, 3, 4

SAMPLE_HEADER = ("index", "R", "D", "discord", "cc", "qmi", "concurrence", "chsh", "ppt", "rank")
FAMILY_HEADER = ("parameter", "R", "D", "discord", "cc", "concurrence", "chsh")

# figures needing the discord optimiser run at desk scale by default
FIGURE_DEFAULT_N = {1: 10_000, 2: 1_000_000, 3: 100_000, 4: 1_000_000, 5: 10_000, 6: 10_000, 7: 100_000}
DISCORD_FIGURES = {1, 5, 6}

DEFAULTS = {
    "n": 100_000,
    "seed": 42,
    "workers": 1,
    "with_discord": False,
    "bins": 100,
    "r_band": 0.02,
    "grid": "64x128",
    "fixed_n": 2000,
}


class UsageError(Exception):
    pass


class OutputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# --- formatting -----------------------------------------------------------

def fmt(v):
    """Locale-independent, round-trip-exact CSV cell."""
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    v = float(v)
    if math.isnan(v):
        return ""
    return repr(v)


def csv_text(header, rows):
    lines = [",".join(header)]
    lines.extend(",".join(fmt(c) for c in row) for row in rows)
    return "\n".join(lines) + "\n"


def write_text(path, text):
    try:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc.strerror or exc}") from exc
    return path


def write_manifest(path, entries, outputs):
    lines = [f"artifact_version = {__version__}"]
    for key, value in entries.items():
        lines.append(f"{key} = {value}")
    lines.append(f"outputs = {','.join(str(p) for p in outputs)}")
    return write_text(path, "\n".join(lines) + "\n")


def records_rows(records):
    c = records.cols
    for i in range(len(records)):
        yield (
            int(records.index[i]), c["R"][i], c["D"][i], c["discord"][i], c["cc"][i], c["qmi"][i],
            c["concurrence"][i], c["chsh"][i], bool(c["ppt"][i]), int(c["corr_rank"][i]),
        )


def histogram_rows(h):
    for lo, hi, d, n in zip(h.edges[:-1], h.edges[1:], h.density, h.counts):
        yield lo, hi, 0.5 * (lo + hi), d, int(n)


HIST_HEADER = ("left", "right", "center", "density", "count")
BIN_HEADER = ("left", "right", "center", "count", "mean", "sem", "min", "max")


def binned_rows(b):
    for i in range(b.centers.size):
        yield (b.edges[i], b.edges[i + 1], b.centers[i], int(b.count[i]), b.mean[i],
               b.sem[i], b.min[i], b.max[i])


# --- config ---------------------------------------------------------------

def read_config(path):
    """Flat ``key = value`` file; ``#`` comments; keys use flag names."""
    out = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise OutputError(f"cannot read config {path}: {exc.strerror or exc}") from exc
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"config line {lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.lstrip("-").replace("-", "_")] = value
    return out


def _coerce(key, raw):
    if key == "with_discord":
        if isinstance(raw, bool):
            return raw
        return str(raw).lower() in ("1", "true", "yes", "on")
    if key in ("n", "seed", "workers", "bins", "fixed_n", "steps"):
        return int(raw)
    if key in ("r_band", "from_", "to"):
        return float(raw)
    return raw


def resolve(args, keys):
    cfg = read_config(args.config) if getattr(args, "config", None) else {}
    for key in keys:
        if getattr(args, key, None) is None:
            if key in cfg:
                try:
                    setattr(args, key, _coerce(key, cfg[key]))
                except ValueError:
                    raise UsageError(f"config value for {key!r} is invalid: {cfg[key]!r}") from None
            else:
                setattr(args, key, DEFAULTS.get(key))
    return args


def parse_grid(text):
    try:
        a, b = text.lower().split("x")
        grid = (int(a), int(b))
    except ValueError:
        raise UsageError(f"--grid expects NTHETAxNPHI, got {text!r}") from None
    if grid[0] < 3 or grid[1] < 1:
        raise UsageError("--grid needs at least 3 polar and 1 azimuthal points")
    return grid


def _check_positive(name, value, allow_zero=False):
    if value is None or value < (0 if allow_zero else 1):
        raise UsageError(f"--{name} must be a positive integer, got {value}")


# --- commands -------------------------------------------------------------

def cmd_sample(args):
    resolve(args, ("n", "seed", "workers", "with_discord", "grid"))
    _check_positive("n", args.n)
    _check_positive("workers", args.workers)
    grid = parse_grid(args.grid)
    out = Path(args.out or "sample.csv")
    cfg = SurveyConfig(n_samples=args.n, seed=args.seed, workers=args.workers,
                       with_discord=args.with_discord, grid=grid)
    t0 = time.perf_counter()
    manifest = out.with_name(out.name + ".manifest")
    entries = {"command": "sample", "seed": args.seed, "n_samples": args.n,
               "workers": args.workers, "with_discord": args.with_discord, "grid": args.grid}
    try:
        records = run_survey(cfg)
    except SurveyAborted as exc:
        entries.update(status="aborted", error=str(exc), completed_chunks=len(exc.completed_chunks))
        write_manifest(manifest, entries, [])
        print(str(exc), file=sys.stderr)
        return EXIT_ABORT
    write_text(out, csv_text(SAMPLE_HEADER, records_rows(records)))
    entries.update(status="ok", wall_time_s=f"{time.perf_counter() - t0:.3f}")
    write_manifest(manifest, entries, [out])
    print(f"wrote {out} ({len(records)} rows)")
    return EXIT_OK


def _family_rows(points):
    for p in points:
        yield p.parameter, p.R, p.D, p.discord, p.cc, p.concurrence, p.chsh


def _parse_spectra(specs):
    out = []
    for s in specs or []:
        try:
            vals = [float(v) for v in s.split(",")]
        except ValueError:
            raise UsageError(f"--spectrum expects 4 comma-separated weights, got {s!r}") from None
        if len(vals) != 4:
            raise UsageError(f"--spectrum expects 4 weights, got {len(vals)}")
        out.append(vals)
    if not out:
        raise UsageError("bell-diagonal needs at least one --spectrum p1,p2,p3,p4")
    return out


def cmd_families(args):
    resolve(args, ("with_discord", "grid"))
    grid_res = parse_grid(args.grid)
    name = args.family
    if name == "bell-diagonal":
        grid = _parse_spectra(args.spectrum)
    else:
        lo, hi = FAMILY_DOMAINS[name]
        start = lo if args.from_ is None else args.from_
        stop = hi if args.to is None else args.to
        steps = 101 if args.steps is None else args.steps
        if steps < 1:
            raise UsageError("--steps must be >= 1")
        if not (lo - 1e-15 <= start <= hi + 1e-15 and lo - 1e-15 <= stop <= hi + 1e-15):
            raise UsageError(f"{name} grid must lie within [{lo:g}, {hi:g}]")
        grid = family_grid(name, start, stop, steps)
    try:
        points = family_curve(name, grid, args.with_discord, grid_res)
    except InvalidStateError as exc:
        raise UsageError(str(exc)) from None
    out = Path(args.out or f"{name}.csv")
    t0 = time.perf_counter()
    write_text(out, csv_text(FAMILY_HEADER, _family_rows(points)))
    write_manifest(out.with_name(out.name + ".manifest"),
                   {"command": "families", "family": name, "points": len(points),
                    "with_discord": args.with_discord, "status": "ok",
                    "wall_time_s": f"{time.perf_counter() - t0:.3f}"}, [out])
    print(f"wrote {out} ({len(points)} rows)")
    return EXIT_OK


def cmd_eval(args):
    resolve(args, ("grid",))
    grid = parse_grid(args.grid)
    try:
        entries = read_state_file(args.state_file)
    except StateFileError as exc:
        print(f"{args.state_file}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"cannot read {args.state_file}: {exc.strerror or exc}", file=sys.stderr)
        return EXIT_IO
    try:
        rho = make_state(entries)
    except InvalidStateError as exc:
        print(f"invalid state: {exc}", file=sys.stderr)
        return EXIT_STATE
    rec = measures.measure_record(rho, with_discord=True, grid=grid)
    d = rec.as_dict()
    if args.csv:
        header = SAMPLE_HEADER[1:]
        row = (d["R"], d["D"], d["discord"], d["cc"], d["qmi"], d["concurrence"], d["chsh"],
               d["ppt"], d["corr_rank"])
        sys.stdout.write(csv_text(header, [row]))
    else:
        for key, value in d.items():
            if isinstance(value, bool):
                text = "true" if value else "false"
            elif isinstance(value, int):
                text = str(value)
            else:
                text = f"{value:.12g}"
            print(f"{key} = {text}")
    return EXIT_OK


# --- figures --------------------------------------------------------------

def _overlay(outdir, name, family, steps, with_discord, grid_res, cols):
    grid = family_grid(family, steps=steps)
    pts = family_curve(family, grid, with_discord, grid_res)
    rows = [tuple(getattr(p, c) for c in cols) for p in pts]
    return write_text(outdir / name, csv_text(cols, rows))


def _figure(n, args, outdir, notes):
    grid_res = parse_grid(args.grid)
    bins = args.bins
    with_discord = n in DISCORD_FIGURES
    cfg = SurveyConfig(n_samples=args.n, seed=args.seed, workers=args.workers,
                       with_discord=with_discord, grid=grid_res, r_band=args.r_band, hist_bins=bins)
    records = run_survey(cfg)
    c = records.cols
    edges_r = default_r_edges()
    files = []
    if n == 1:
        files.append(write_text(outdir / "fig1_scatter.csv",
                                csv_text(("D", "discord"), zip(c["D"], c["discord"]))))
        for fam in ("werner", "mems"):
            files.append(_overlay(outdir, f"fig1_{fam}.csv", fam, 101, True, grid_res,
                                  ("parameter", "D", "discord")))
    elif n == 2:
        e = np.linspace(0, 0.5, bins + 1)
        files.append(write_text(outdir / "fig2_hist_all.csv",
                                csv_text(HIST_HEADER, histogram_rows(histogram(c["D"], e)))))
        files.append(write_text(outdir / "fig2_hist_ppt.csv", csv_text(
            HIST_HEADER, histogram_rows(histogram(c["D"][c["ppt"]], e)))))
        rows = []
        for target, (d, attempts) in fixed_r_ensembles(cfg, args.fixed_n).items():
            h = histogram(d, e)
            notes[f"fixed_R_{target:g}_attempts"] = attempts
            notes[f"fixed_R_{target:g}_max_D"] = fmt(float(np.max(d)))
            rows.extend((target, lo, hi, ctr, dens, cnt) for lo, hi, ctr, dens, cnt in histogram_rows(h))
        files.append(write_text(outdir / "fig2_inset.csv",
                                csv_text(("target_R", "left", "right", "center", "density", "count"), rows)))
        if args.pure_analytic:
            dd = np.linspace(0, 0.5, 501)
            files.append(write_text(outdir / "fig2_pure_analytic.csv", csv_text(
                ("D", "density"), zip(dd, 3 * np.sqrt(1 - 2 * dd)))))
    elif n == 3:
        files.append(write_text(outdir / "fig3_scatter.csv",
                                csv_text(("R", "D"), zip(c["R"], c["D"]))))
        files.append(_overlay(outdir, "fig3_werner.csv", "werner", 201, False, grid_res,
                              ("parameter", "R", "D")))
        files.append(_overlay(outdir, "fig3_mems.csv", "mems", 201, False, grid_res,
                              ("parameter", "R", "D")))
        b = bin_by_r(records, edges_r, "D")
        gap = werner_envelope(c["R"]) - c["D"]
        notes["max_D_minus_werner_bound"] = fmt(float(-gap.min()))
        files.append(write_text(outdir / "fig3_envelope.csv", csv_text(
            ("left", "right", "count", "max_D", "werner_bound_left"),
            ((b.edges[i], b.edges[i + 1], int(b.count[i]), b.max[i], werner_envelope(b.edges[i]))
             for i in range(b.centers.size)))))
    elif n == 4:
        files.append(write_text(outdir / "fig4_mean_all.csv",
                                csv_text(BIN_HEADER, binned_rows(bin_by_r(records, edges_r, "D")))))
        files.append(write_text(outdir / "fig4_mean_ppt.csv", csv_text(
            BIN_HEADER, binned_rows(bin_by_r(records.select(c["ppt"]), edges_r, "D")))))
    elif n == 5:
        e = np.linspace(0, 1, bins + 1)
        files.append(write_text(outdir / "fig5_hist_discord_all.csv",
                                csv_text(HIST_HEADER, histogram_rows(histogram(c["discord"], e)))))
        files.append(write_text(outdir / "fig5_hist_discord_ppt.csv", csv_text(
            HIST_HEADER, histogram_rows(histogram(c["discord"][c["ppt"]], e)))))
        files.append(write_text(outdir / "fig5_hist_cc_all.csv",
                                csv_text(HIST_HEADER, histogram_rows(histogram(c["cc"], e)))))
    elif n == 6:
        files.append(write_text(outdir / "fig6_scatter.csv",
                                csv_text(("R", "discord"), zip(c["R"], c["discord"]))))
        for fam in ("mems", "werner"):
            files.append(_overlay(outdir, f"fig6_{fam}.csv", fam, 101, True, grid_res,
                                  ("parameter", "R", "discord")))
        files.append(write_text(outdir / "fig6_mean.csv",
                                csv_text(BIN_HEADER, binned_rows(bin_by_r(records, edges_r, "discord")))))
        notes["pure_state_mean_discord_reference"] = fmt(1 / (3 * math.log(2)))
    elif n == 7:
        files.append(write_text(outdir / "fig7_scatter.csv",
                                csv_text(("D", "chsh"), zip(c["D"], c["chsh"]))))
        files.append(_overlay(outdir, "fig7_lower_werner.csv", "werner", 201, False, grid_res,
                              ("parameter", "D", "chsh")))
        upper = UpperCurve.from_mnms()
        pts = family_curve("mnms", family_grid("mnms", steps=201))
        files.append(write_text(outdir / "fig7_upper_mnms.csv", csv_text(
            ("parameter", "D", "chsh"), ((p.parameter, p.D, p.chsh) for p in pts))))
        for key, value in upper.printed_formula_report().items():
            notes[f"upper_curve.{key}"] = fmt(value)
        notes["upper_curve.note"] = ("printed 2sqrt(1-2GQd) contradicts the MNMS endpoints; "
                                     "tabulated MNMS curve follows 2sqrt(1+2GQd)")
        notes["band_violations_lower"] = int(np.sum(c["chsh"] < 4 * np.sqrt(c["D"]) - 1e-9))
        notes["band_violations_upper"] = int(np.sum(c["chsh"] > upper(c["D"]) + 1e-9))
    if with_discord and args.n < 10**6:
        notes["desk_scale_substitution"] = f"{args.n} samples instead of 1e6 (discord optimiser cost)"
    files.append(write_text(outdir / script_name(n), plot_script(n)))
    return files


def cmd_figure(args):
    if args.number not in range(1, 8):
        raise UsageError(f"figure number must be 1..7, got {args.number}")
    resolve(args, ("seed", "workers", "bins", "r_band", "grid", "fixed_n"))
    if args.n is None:
        args.n = FIGURE_DEFAULT_N[args.number]
    _check_positive("n", args.n)
    _check_positive("bins", args.bins)
    _check_positive("fixed-n", args.fixed_n)
    if args.r_band <= 0:
        raise UsageError("--r-band must be positive")
    outdir = Path(args.out or f"fig{args.number}")
    notes = {}
    t0 = time.perf_counter()
    entries = {"command": f"figure {args.number}", "seed": args.seed, "n_samples": args.n,
               "workers": args.workers, "bins": args.bins, "r_band": args.r_band, "grid": args.grid}
    manifest = outdir / f"fig{args.number}_manifest.txt"
    try:
        files = _figure(args.number, args, outdir, notes)
    except SurveyAborted as exc:
        entries.update(status="aborted", error=str(exc))
        write_manifest(manifest, entries, [])
        print(str(exc), file=sys.stderr)
        return EXIT_ABORT
    if args.render:
        files.append(render(args.number, outdir))
    entries.update(status="ok", wall_time_s=f"{time.perf_counter() - t0:.3f}")
    entries.update({f"note.{k}": v for k, v in notes.items()})
    write_manifest(manifest, entries, files)
    print(f"wrote {len(files)} files to {outdir}")
    return EXIT_OK


# --- entry point ----------------------------------------------------------

def build_parser():
    p = _Parser(prog="qdiscord", description="Two-qubit discord, GQd and CHSH survey tools.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, survey=True):
        sp.add_argument("--config", help="flat key = value file (flags override it)")
        sp.add_argument("--grid", help="optimiser grid NTHETAxNPHI (default 64x128)")
        if survey:
            sp.add_argument("--n", type=int, help="number of sampled states")
            sp.add_argument("--seed", type=int, help="campaign seed (default 42)")
            sp.add_argument("--workers", type=int, help="worker processes (default 1)")

    s = sub.add_parser("sample", help="sample random states and write their measures")
    common(s)
    s.add_argument("--with-discord", action="store_true", default=None)
    s.add_argument("--out", help="CSV path (default sample.csv)")
    s.set_defaults(func=cmd_sample)

    f = sub.add_parser("figure", help="write data, overlays and a plot script for one figure")
    f.add_argument("number", type=int)
    common(f)
    f.add_argument("--out", help="output directory (default figN)")
    f.add_argument("--bins", type=int, help="histogram bins (default 100)")
    f.add_argument("--r-band", type=float, help="fixed-R half width (default 0.02)")
    f.add_argument("--fixed-n", type=int, help="states per fixed-R ensemble (default 2000)")
    f.add_argument("--pure-analytic", action="store_true", help="figure 2: add 3 sqrt(1-2D)")
    f.add_argument("--render", action="store_true", help="also run the plot script to make a PNG")
    f.set_defaults(func=cmd_figure)

    e = sub.add_parser("eval", help="evaluate all measures for one state file")
    e.add_argument("state_file")
    common(e, survey=False)
    e.add_argument("--csv", action="store_true", help="print one CSV row instead")
    e.set_defaults(func=cmd_eval)

    fa = sub.add_parser("families", help="tabulate a named state family")
    fa.add_argument("family", choices=sorted(FAMILY_DOMAINS))
    common(fa, survey=False)
    fa.add_argument("--from", dest="from_", type=float)
    fa.add_argument("--to", type=float)
    fa.add_argument("--steps", type=int)
    fa.add_argument("--spectrum", action="append", help="bell-diagonal weights p1,p2,p3,p4")
    fa.add_argument("--with-discord", action="store_true", default=None)
    fa.add_argument("--out", help="CSV path (default FAMILY.csv)")
    fa.set_defaults(func=cmd_families)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"qdiscord: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OutputError as exc:
        print(f"qdiscord: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
