"""Command-line entry point: ``carpet-perc {gen,sweep,table,fit,render}``.

Exit codes: 0 success, 1 domain error, 2 I/O error.  The default worker
count comes from ``CARPET_PERC_WORKERS`` (1 if unset).
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import reference_data
from .analysis import connectivity, dimensionality, fit_exponent, fit_quadratic
from .errors import CarpetError
from .estimator import SweepGrid, estimate_pc, run_sweep
from .lattice import (
    CarpetSpec,
    Family,
    build_carpet_recursive,
    build_carpet_tdm,
    write_mask,
    write_pgm,
)
from .percolation import Connectivity, label_clusters_scan, occupy, write_cluster_ppm
from .reports import (
    CsvFormatError,
    TableReport,
    d_discrepancy,
    estimate_csv,
    estimate_row,
    fill_predictions,
    format_fit,
    format_table_report,
    read_points,
    sweep_csv,
)

log = logging.getLogger("carpet_percolation")

EXIT_OK, EXIT_DOMAIN, EXIT_IO = 0, 1, 2


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get("CARPET_PERC_WORKERS", "1")))
    except ValueError:
        return 1


def _spec_from_args(args) -> CarpetSpec:
    return CarpetSpec(args.b, args.l, Family(args.family), args.stages)


def _grid_from_args(args) -> SweepGrid:
    return SweepGrid(args.p_min, args.p_max, args.dp, args.runs, args.seed)


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_gen(args) -> int:
    spec = _spec_from_args(args)
    lattice = build_carpet_tdm(spec)
    out = _out_dir(args)
    stem = f"carpet_{spec.label()}"
    write_mask(lattice.present, spec, out / f"{stem}.txt")
    write_pgm(lattice.present, out / f"{stem}.pgm")
    print(f"{spec.label()}: {lattice.side_sites}x{lattice.side_sites} sites, {lattice.n_present} present")

    if args.snapshot is not None:
        config = occupy(lattice, args.snapshot, args.seed)
        labels = label_clusters_scan(config, args.conn)
        snap = f"config_{spec.label()}_p{args.snapshot:g}_s{args.seed}"
        write_mask(config.occupied, spec, out / f"{snap}.txt")
        write_cluster_ppm(labels, out / f"{snap}.ppm", lattice.present)
        print(f"snapshot p={args.snapshot:g}: {config.n_occupied} occupied, {labels.n_clusters} clusters ({args.conn})")

    if args.verify:
        ok = build_carpet_recursive(spec) == lattice
        print("verify TDM vs recursive:", "PASS" if ok else "FAIL")
        if not ok:
            return EXIT_DOMAIN
    return EXIT_OK


def cmd_sweep(args) -> int:
    spec = _spec_from_args(args)
    grid = _grid_from_args(args)
    lattice = build_carpet_tdm(spec)
    sweep = run_sweep(lattice, args.conn, grid, workers=args.workers)
    est = estimate_pc(sweep)
    out = _out_dir(args)
    stem = f"{spec.label()}_{args.conn}"
    (out / f"sweep_{stem}.csv").write_text(sweep_csv(sweep))
    (out / f"estimate_{stem}.csv").write_text(estimate_csv([estimate_row(est, grid.dp)]))
    print(
        f"{spec.label()} {args.conn}: P_c = {est.pc_mean:.4f} +/- {est.pc_stderr:.4f}"
        f" over {est.runs} runs (from averaged M: {est.pc_from_mean_m:.4f})"
    )
    return EXIT_OK


def _parse_row_filter(values) -> list[tuple[int, int]] | None:
    if not values:
        return None
    wanted = []
    for value in values:
        for item in value.split(";"):
            if not item.strip():
                continue
            fields = dict(part.split("=", 1) for part in item.split(","))
            try:
                wanted.append((int(fields["b"]), int(fields["l"])))
            except (KeyError, ValueError):
                raise CarpetError(f"bad row filter {item!r}; expected b=<int>,l=<int>") from None
    return wanted


def build_table(family: str, rows_filter=None, reference: bool = False, grid: SweepGrid | None = None,
                conn: str = "nnn8", workers: int = 1, stages: int | None = None):
    """Run (or load) every selected row and refit the relations. Returns (report, failures)."""
    table = reference_data.TABLES[family]
    if rows_filter is not None:
        table = [r for r in table if (r.b, r.l) in set(rows_filter)]
        missing = set(rows_filter) - {(r.b, r.l) for r in table}
        if missing:
            raise CarpetError(f"rows not in the {family} table: {sorted(missing)}")
    grid = grid or SweepGrid()
    rows, failures = [], []
    for ref in table:
        spec_n = stages or ref.N
        base = {
            "b": ref.b, "l": ref.l, "family": family, "N": spec_n, "conn": conn,
            "D": dimensionality(ref.b, ref.l), "Q": connectivity(ref.b, ref.l),
            "ref_pc": ref.pc, "ref_sigma": ref.sigma, "ref_D": d_discrepancy(ref),
        }
        if reference:
            row = {**base, "pc_mean": ref.pc, "pc_stderr": ref.sigma}
        else:
            try:
                spec = CarpetSpec(ref.b, ref.l, Family(family), spec_n)
                est = estimate_pc(run_sweep(build_carpet_tdm(spec), conn, grid, workers=workers))
            except (CarpetError, ValueError) as exc:
                failures.append(f"b={ref.b},l={ref.l}: {exc}")
                print(f"row b={ref.b} l={ref.l} failed: {exc}", file=sys.stderr)
                continue
            row = {**base, **estimate_row(est, grid.dp)}
            log.info("row b=%d l=%d: %.4f (reference %.3f)", ref.b, ref.l, est.pc_mean, ref.pc)
        row["delta"] = row["pc_mean"] - ref.pc
        rows.append(row)

    power = power_pc = quadratic = None
    if family == "central" and len(rows) >= 2:
        pts = [(r["D"], r["pc_mean"]) for r in rows]
        try:
            power = fit_exponent(pts, reference_data.PCS_NNN)
            power_pc = fit_exponent(pts, reference_data.PCS_NNN, space="pc")
        except ValueError as exc:
            failures.append(f"power-law fit: {exc}")
    if len({r["Q"] for r in rows}) >= 3:
        quadratic = fit_quadratic([(r["Q"], r["pc_mean"]) for r in rows])
    fill_predictions(rows, power, quadratic)
    return TableReport(family, rows, power, power_pc, quadratic), failures


def cmd_table(args) -> int:
    grid = _grid_from_args(args)
    report, failures = build_table(
        args.family, _parse_row_filter(args.rows), args.reference_data, grid, args.conn, args.workers, args.stages,
    )
    out = _out_dir(args)
    tag = f"{args.family}{'_reference' if args.reference_data else ''}"
    (out / f"table_{tag}.csv").write_text(report.csv())
    text = format_table_report(report)
    (out / f"table_{tag}.txt").write_text(text)
    print(text, end="")
    if failures:
        print(f"{len(failures)} row(s) failed", file=sys.stderr)
        return EXIT_DOMAIN
    return EXIT_OK


def cmd_fit(args) -> int:
    points = read_points(args.input)
    if args.family:
        points = [p for p in points if p.get("family") in ("", args.family)]
    if not points:
        raise CarpetError(f"{args.input}: no data rows")
    text = []
    if args.kind in ("exponent", "both"):
        pts = [(p["D"], p["pc"]) for p in points if "D" in p]
        if len(pts) < len(points):
            raise CsvFormatError(f"{args.input}: exponent fit needs D (or b,l) on every row")
        for space in ("log", "pc"):
            text.append(format_fit(fit_exponent(pts, args.pcs, space=space), "power law"))
    if args.kind in ("quadratic", "both"):
        pts = [(p["Q"], p["pc"]) for p in points if "Q" in p]
        if len(pts) < len(points):
            raise CsvFormatError(f"{args.input}: quadratic fit needs Q (or b,l) on every row")
        text.append(format_fit(fit_quadratic(pts), "quadratic"))
    report = "".join(text)
    if args.out:
        Path(args.out).write_text(report)
    print(report, end="")
    return EXIT_OK


def cmd_render(args) -> int:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    series: dict[str, list] = {}
    for path in args.inputs:
        points = read_points(path)
        if not points:
            raise CarpetError(f"{path}: no data rows")
        for p in points:
            series.setdefault(p.get("family") or "data", []).append(p)

    plt.rcParams["svg.hashsalt"] = "carpet-perc"
    markers = {"central": "s", "scattered": "^"}
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for axis in ("D", "Q"):
        fig, ax = plt.subplots(figsize=(5, 4))
        for name, pts in series.items():
            pts = [p for p in pts if axis in p]
            if not pts:
                continue
            x = np.array([p[axis] for p in pts])
            y = np.array([p["pc"] for p in pts])
            ax.plot(x, y, markers.get(name, "o"), mfc="none", label=name)
            xs = np.linspace(x.min(), x.max(), 200)
            try:
                if axis == "D" and name == "central" and np.ptp(x) > 0:
                    fit = fit_exponent(np.c_[x, y], args.pcs)
                    ax.plot(xs, fit.predict(xs), "-", lw=1, label=f"central: exponent {fit.exponent:.2f}")
                elif axis == "Q" and len(np.unique(x)) >= 3:
                    fit = fit_quadratic(np.c_[x, y])
                    ax.plot(xs, np.polyval(fit.coefficients, xs), "--", lw=1, label=f"{name}: quadratic")
            except ValueError as exc:
                log.warning("no fitted curve for %s vs %s: %s", name, axis, exc)
        ax.set_xlabel(axis)
        ax.set_ylabel("P_c")
        ax.legend(fontsize="small")
        fig.tight_layout()
        target = out / f"pc_vs_{axis}.{args.format}"
        fig.savefig(target, metadata={"Date": None} if args.format == "svg" else None)
        plt.close(fig)
        written.append(str(target))
    print("\n".join(written))
    return EXIT_OK


def _add_spec_args(p, required=True):
    p.add_argument("--b", type=int, required=required)
    p.add_argument("--l", type=int, required=required)
    p.add_argument("--family", choices=[f.value for f in Family], default="central")
    p.add_argument("--stages", type=int, default=1)


def _add_grid_args(p):
    p.add_argument("--p-min", type=float, default=0.30)
    p.add_argument("--p-max", type=float, default=0.95)
    p.add_argument("--dp", type=float, default=0.01)
    p.add_argument("--runs", type=int, default=10)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--conn", choices=[c.value for c in Connectivity], default="nnn8")
    p.add_argument("--workers", type=int, default=default_workers())
    p.add_argument("--out", default=".")


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="carpet-perc", description="Site percolation on Sierpinski carpets")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="build a carpet lattice and write mask + graymap")
    _add_spec_args(p)
    p.add_argument("--verify", action="store_true", help="check TDM against the recursive builder")
    p.add_argument("--snapshot", type=float, help="also occupy at this P and render clusters")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--conn", choices=[c.value for c in Connectivity], default="nnn8")
    p.add_argument("--out", default=".")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("sweep", help="sweep P on one lattice and estimate P_c")
    _add_spec_args(p)
    _add_grid_args(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("table", help="reproduce a reference table")
    p.add_argument("--family", choices=[f.value for f in Family], required=True)
    p.add_argument("--rows", action="append", help="row filter, e.g. b=13,l=1 (repeatable or ';'-separated)")
    p.add_argument("--reference-data", action="store_true", help="fit the published P_c values, no simulation")
    p.add_argument("--stages", type=int, help="override the per-row stage count")
    _add_grid_args(p)
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("fit", help="fit the power-law and quadratic relations to a CSV")
    p.add_argument("input")
    p.add_argument("--kind", choices=["exponent", "quadratic", "both"], default="both")
    p.add_argument("--pcs", type=float, default=reference_data.PCS_NNN)
    p.add_argument("--family", choices=[f.value for f in Family])
    p.add_argument("--out")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("render", help="plot P_c against D and Q")
    p.add_argument("inputs", nargs="+")
    p.add_argument("--out", default=".")
    p.add_argument("--format", choices=["svg", "png", "pdf"], default="svg")
    p.add_argument("--pcs", type=float, default=reference_data.PCS_NNN)
    p.set_defaults(func=cmd_render)
    return parser


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except (CarpetError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
