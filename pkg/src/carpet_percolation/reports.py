"""CSV schemas, table reports and fit-input ingestion.

All numbers are written with 6 significant digits so repeated runs give
byte-identical files.
"""

from __future__ import annotations

import csv
import io
import math
from collections import OrderedDict
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import reference_data
from .analysis import FitResult, connectivity, dimensionality
from .estimator import PcEstimate, SweepGrid, SweepResult, estimate_pc
from .lattice import CarpetSpec
from .percolation import Connectivity

SWEEP_COLUMNS = ["b", "l", "family", "N", "conn", "p", "run", "m"]
ESTIMATE_COLUMNS = ["b", "l", "family", "N", "conn", "D", "Q", "pc_mean", "pc_stderr", "runs", "dp"]
TABLE_COLUMNS = ESTIMATE_COLUMNS + [
    "ref_pc", "ref_sigma", "delta",
    "pred_power", "sigma_e_power", "pred_quadratic", "sigma_e_quadratic",
    "ref_D",
]


def fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    if isinstance(x, str):
        return x
    x = float(x)
    if math.isnan(x):
        return "nan"
    out = f"{x:.6g}"
    return "0" if out == "-0" else out


def _render(columns, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([fmt(row.get(c)) for c in columns])
    return buf.getvalue()


def _spec_fields(spec: CarpetSpec, conn: Connectivity) -> dict:
    return {"b": spec.b, "l": spec.l, "family": spec.family.value, "N": spec.N, "conn": Connectivity(conn).value}


def sweep_rows(sweep: SweepResult):
    base = _spec_fields(sweep.spec, sweep.conn)
    for r in range(sweep.m_per_run.shape[0]):
        for i, p in enumerate(sweep.p_grid):
            yield {**base, "p": float(p), "run": r, "m": float(sweep.m_per_run[r, i])}


def estimate_row(est: PcEstimate, dp: float) -> dict:
    spec = est.spec
    return {
        **_spec_fields(spec, est.conn),
        "D": dimensionality(spec.b, spec.l),
        "Q": connectivity(spec.b, spec.l),
        "pc_mean": est.pc_mean,
        "pc_stderr": est.pc_stderr,
        "runs": est.runs,
        "dp": dp,
    }


def sweep_csv(sweep: SweepResult) -> str:
    return _render(SWEEP_COLUMNS, sweep_rows(sweep))


def estimate_csv(rows) -> str:
    return _render(ESTIMATE_COLUMNS, rows)


def table_csv(rows) -> str:
    return _render(TABLE_COLUMNS, rows)


# -- table reports ----------------------------------------------------------


@dataclass
class TableReport:
    family: str
    rows: list
    power: FitResult | None
    power_pc_space: FitResult | None
    quadratic: FitResult | None

    def csv(self) -> str:
        return table_csv(self.rows)


def d_discrepancy(row) -> float | None:
    """Printed D when it disagrees with the formula at the printed precision, else None."""
    d = dimensionality(row.b, row.l)
    return row.D if abs(round(d, 3) - row.D) > 0.0015 else None


def fill_predictions(rows: list, power: FitResult | None, quadratic: FitResult | None) -> None:
    for row in rows:
        if power is not None:
            pred = power.predict(row["D"])
            row["pred_power"] = pred
            row["sigma_e_power"] = pred - row["pc_mean"]
        if quadratic is not None:
            pred = quadratic.predict(row["Q"])
            row["pred_quadratic"] = pred
            row["sigma_e_quadratic"] = pred - row["pc_mean"]


def format_fit(fit: FitResult, title: str) -> str:
    if fit.kind == "quadratic":
        a, b, c = fit.coefficients
        head = f"{title}: P_c = {a:.4f} Q^2 {b:+.4f} Q {c:+.4f}"
    else:
        head = (
            f"{title}: (1 - P_c)/(1 - {fit.pcs_baseline:g}) = (D - 1)^{fit.exponent:.4f}"
            f"  [{fit.space}-space fit]"
        )
    return f"{head}\n  remainder error e_r = {fit.remainder_error:.4f} (k = {len(fit.residuals)})\n"


def format_table_report(report: TableReport) -> str:
    out = [f"family: {report.family}\n"]
    published = {
        "central": (reference_data.QUADRATIC_CENTRAL, reference_data.REFERENCE_REMAINDER["central_quadratic"]),
        "scattered": (reference_data.QUADRATIC_SCATTERED, reference_data.REFERENCE_REMAINDER["scattered_quadratic"]),
    }.get(report.family)
    if report.power is not None:
        out.append(format_fit(report.power, "power law"))
        out.append(f"  reference: exponent {reference_data.EXPONENT_NNN:.2f}, e_r {reference_data.REFERENCE_REMAINDER['central_power']}\n")
    if report.power_pc_space is not None:
        out.append(format_fit(report.power_pc_space, "power law"))
    if report.quadratic is not None:
        out.append(format_fit(report.quadratic, "quadratic"))
        if published:
            a, b, c = published[0]
            out.append(f"  reference: {a:.2f} Q^2 {b:+.2f} Q {c:+.2f}, e_r {published[1]}\n")
    header = f"{'b':>3} {'l':>3} {'N':>2} {'D':>6} {'Q':>6} {'P_c':>7} {'sigma':>7} {'ref':>6} {'delta':>7}"
    header += f" {'pow':>7} {'s_e':>7} {'quad':>7} {'s_e':>7}"
    out.append("\n" + header + "\n")
    for r in report.rows:
        def g(key, spec=".3f"):
            v = r.get(key)
            return format(v, spec) if isinstance(v, (float, int)) and not isinstance(v, bool) else "-"
        line = (
            f"{r['b']:>3} {r['l']:>3} {r['N']:>2} {g('D'):>6} {g('Q'):>6} {g('pc_mean'):>7} {g('pc_stderr'):>7}"
            f" {g('ref_pc'):>6} {g('delta', '+.3f'):>7} {g('pred_power'):>7} {g('sigma_e_power', '+.3f'):>7}"
            f" {g('pred_quadratic'):>7} {g('sigma_e_quadratic', '+.3f'):>7}"
        )
        if r.get("ref_D") is not None:
            line += f"   printed D {r['ref_D']:.3f} disagrees with formula"
        out.append(line + "\n")
    return "".join(out)


# -- ingestion ----------------------------------------------------------------


class CsvFormatError(ValueError):
    pass


def _num(value, column, lineno, path):
    try:
        return float(value)
    except (TypeError, ValueError):
        raise CsvFormatError(f"{path}: line {lineno}: bad value {value!r} in column {column!r}") from None


def read_points(path: str | Path) -> list[dict]:
    """Read rows usable for fitting: dicts with ``D``, ``Q``, ``pc`` and optional ``family``.

    Accepted layouts: estimate/table CSVs (``pc_mean``), plain ``b,l,pc`` or
    ``D,Q,pc`` (either descriptor may be missing), and sweep CSVs
    (``p,run,m``), which are reduced to one estimate per lattice and
    connectivity.
    """
    path = Path(path)
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise CsvFormatError(f"{path}: line 1: empty file")
        cols = [c.strip() for c in reader.fieldnames]
        reader.fieldnames = cols
        raw = list(enumerate(reader, start=2))

    if {"p", "run", "m"} <= set(cols):
        return _points_from_sweep(raw, path)

    pc_col = "pc_mean" if "pc_mean" in cols else "pc" if "pc" in cols else None
    if pc_col is None:
        raise CsvFormatError(f"{path}: line 1: no 'pc' or 'pc_mean' column")
    has_bl = {"b", "l"} <= set(cols)
    if not has_bl and "D" not in cols and "Q" not in cols:
        raise CsvFormatError(f"{path}: line 1: need columns b,l or D and/or Q")

    points = []
    for lineno, rec in raw:
        if None in rec or any(v is None for v in rec.values()):
            raise CsvFormatError(f"{path}: line {lineno}: wrong number of fields")
        pt = {"pc": _num(rec[pc_col], pc_col, lineno, path), "family": (rec.get("family") or "").strip()}
        if has_bl:
            b = int(_num(rec["b"], "b", lineno, path))
            l = int(_num(rec["l"], "l", lineno, path))
            try:
                pt["D"], pt["Q"] = dimensionality(b, l), connectivity(b, l)
            except ValueError as exc:
                raise CsvFormatError(f"{path}: line {lineno}: {exc}") from None
            pt["b"], pt["l"] = b, l
        for col in ("D", "Q"):
            if col in cols and rec[col].strip() != "":
                pt[col] = _num(rec[col], col, lineno, path)
        points.append(pt)
    return points


def _points_from_sweep(raw, path) -> list[dict]:
    groups: OrderedDict = OrderedDict()
    for lineno, rec in raw:
        try:
            spec = CarpetSpec(int(rec["b"]), int(rec["l"]), rec["family"], int(rec["N"]))
            conn = Connectivity(rec["conn"])
        except (KeyError, TypeError, ValueError) as exc:
            raise CsvFormatError(f"{path}: line {lineno}: {exc}") from None
        p = _num(rec["p"], "p", lineno, path)
        run = int(_num(rec["run"], "run", lineno, path))
        m = _num(rec["m"], "m", lineno, path)
        groups.setdefault((spec, conn), {}).setdefault(run, {})[p] = m

    points = []
    for (spec, conn), runs in groups.items():
        p_grid = np.array(sorted({p for r in runs.values() for p in r}))
        m = np.array([[runs[r].get(p, np.nan) for p in p_grid] for r in sorted(runs)])
        dp = float(np.min(np.diff(p_grid))) if len(p_grid) > 1 else 0.01
        grid = SweepGrid(float(p_grid[0]), float(max(p_grid[-1], p_grid[0] + dp)), dp, len(runs))
        est = estimate_pc(SweepResult(spec, conn, grid, p_grid, m))
        points.append({
            "pc": est.pc_mean, "family": spec.family.value, "b": spec.b, "l": spec.l,
            "D": dimensionality(spec.b, spec.l), "Q": connectivity(spec.b, spec.l),
        })
    return points
