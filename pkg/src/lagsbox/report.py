"""Text, JSON and CSV renderings of criteria reports."""
from __future__ import annotations

import csv
import io
import json
from pathlib import Path

import numpy as np

from .criteria import CriteriaReport

SUMMARY_KEYS = (
    "n",
    "bijective",
    "nl_min",
    "nl_max",
    "nl_avg",
    "sac_min",
    "sac_max",
    "sac_avg",
    "bic_nl_mean",
    "bic_sac_mean",
    "bic_dd_max",
    "ddt_max",
    "dp",
    "lat_sq_max",
    "lat_sq_mean_nonzero",
)

# report attribute, column title
COMPARISON_COLUMNS = (
    ("bijective", "Bijective"),
    ("nl_min", "NL min"),
    ("nl_max", "NL max"),
    ("nl_avg", "NL avg"),
    ("sac_min", "SAC min"),
    ("sac_max", "SAC max"),
    ("sac_avg", "SAC avg"),
    ("bic_sac_mean", "BIC-SAC"),
    ("bic_nl_mean", "BIC-NL"),
    ("dp", "DP"),
    ("lat_sq_max", "MELP"),
)


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if value.is_integer() and abs(value) >= 1:
            return f"{value:g}"
        return f"{value:.4f}" if abs(value) >= 1e-3 else f"{value:.6f}"
    return str(value)


def _matrix_text(matrix) -> list[str]:
    m = np.asarray(matrix)
    cells = [[_fmt(v.item()) for v in row] for row in m]
    width = max(len(c) for row in cells for c in row)
    return [" ".join(c.rjust(width) for c in row) for row in cells]


def format_text(report: CriteriaReport) -> str:
    """``key value`` summary lines followed by the component and pair matrices."""
    d = report.to_dict()
    lines = [f"{key} {_fmt(d[key])}" for key in SUMMARY_KEYS]
    lines.append("nonlinearities " + " ".join(str(v) for v in report.nonlinearities))
    for title, key in (
        ("sac_matrix (rows: output bit, columns: flipped input bit)", "sac_matrix"),
        ("bic_nl_matrix", "bic_nl_matrix"),
        ("bic_sac_matrix", "bic_sac_matrix"),
        ("bic_dd_matrix", "bic_dd_matrix"),
    ):
        lines.append("")
        lines.append(title)
        lines.extend(_matrix_text(d[key]))
    return "\n".join(lines) + "\n"


def format_json(report: CriteriaReport, indent: int | None = None) -> str:
    return report.to_json(indent=indent) + "\n"


def ddt_row_max_grid(report: CriteriaReport) -> list[list[str]]:
    """Per-difference maxima of the DDT, halved, in a square grid; the last cell is ``-``."""
    table = np.asarray(report.ddt)
    cells = [str(int(v)) for v in table[1:].max(axis=1) // 2] + ["-"]
    side = int(round(len(cells) ** 0.5))
    if side * side != len(cells):
        return [cells]
    return [cells[r * side:(r + 1) * side] for r in range(side)]


def _write_csv(path: Path, rows) -> None:
    with path.open("w", newline="") as fh:
        csv.writer(fh, lineterminator="\n").writerows(rows)


def write_csv_dir(report: CriteriaReport, directory) -> list[Path]:
    """One CSV per table; returns the files written."""
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    written = []

    def emit(name, rows):
        path = out / name
        _write_csv(path, rows)
        written.append(path)

    emit("summary.csv", [("key", "value")] + [(k, _fmt(getattr(report, k))) for k in SUMMARY_KEYS])
    emit("nonlinearity.csv", [("component", "nonlinearity")] + [(i + 1, v) for i, v in enumerate(report.nonlinearities)])
    emit("sac.csv", report.sac_matrix)
    emit("bic_nl.csv", report.bic_nl_matrix)
    emit("bic_sac.csv", report.bic_sac_matrix)
    emit("bic_dd.csv", report.bic_dd_matrix)
    emit("ddt.csv", report.ddt)
    emit("ddt_row_max_half.csv", ddt_row_max_grid(report))
    emit("bijectivity_weights.csv", [("mask", "weight")] + [(b + 1, w) for b, w in enumerate(report.bijective_weights)])
    return written


def comparison_row(name: str, report: CriteriaReport) -> dict:
    row = {"name": name}
    for key, _ in COMPARISON_COLUMNS:
        row[key] = getattr(report, key)
    return row


def format_comparison(rows: list[dict], fmt: str = "text") -> str:
    if fmt == "json":
        return json.dumps(rows, indent=2) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["name"] + [key for key, _ in COMPARISON_COLUMNS])
        for row in rows:
            writer.writerow([row["name"]] + [_fmt(row[key]) for key, _ in COMPARISON_COLUMNS])
        return buf.getvalue()
    if fmt != "text":
        raise ValueError(f"unknown comparison format {fmt!r}")
    header = ["S-box"] + [title for _, title in COMPARISON_COLUMNS]
    body = [[row["name"]] + [_fmt(row[key]) for key, _ in COMPARISON_COLUMNS] for row in rows]
    widths = [max(len(r[c]) for r in [header] + body) for c in range(len(header))]
    lines = []
    for r in [header] + body:
        lines.append("  ".join([r[0].ljust(widths[0])] + [r[c].rjust(widths[c]) for c in range(1, len(r))]))
    lines.insert(1, "-" * len(lines[0]))
    return "\n".join(lines) + "\n"


def load_report_json(text: str) -> CriteriaReport:
    return CriteriaReport.from_dict(json.loads(text))
