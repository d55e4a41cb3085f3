"""Writing sweep reports as CSV or as per-curve plot data."""

from __future__ import annotations

import math
import os

from .errors import UsageError
from .sweep import COLUMNS, FIT_COLUMNS, SweepReport

SCHEMA = "# gammadev-sweep v1"
FORMATS = ("csv", "plotdata")


def fmt_value(v) -> str:
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        if math.isnan(v):
            return "nan"
        return format(v, ".12g")
    return str(v)


def header_lines(report: SweepReport):
    lines = [SCHEMA]
    lines += [f"# {k} = {fmt_value(v)}" for k, v in report.header.items()]
    lines.append(f"# complete = {fmt_value(report.complete)}")
    for name in FIT_COLUMNS:
        if name in report.fits:
            lines.append(f"# fit.{name} = {fmt_value(report.fits[name])}")
    return lines


def render_csv(report: SweepReport) -> str:
    lines = header_lines(report)
    lines.append(",".join(COLUMNS))
    for row in report.rows:
        lines.append(",".join(fmt_value(row[c]) for c in COLUMNS))
    return "\n".join(lines) + "\n"


def emit(report: SweepReport, out_dir, fmt: str = "csv", force: bool = False):
    """Write the report and return the list of files created.

    An incomplete report is only written with ``force``.
    """
    if fmt not in FORMATS:
        raise UsageError(f"unknown format {fmt!r}; choose from {', '.join(FORMATS)}")
    if not report.complete and not force:
        raise UsageError("report is incomplete; pass force to write it anyway")
    os.makedirs(out_dir, exist_ok=True)
    written = []
    if fmt == "csv":
        path = os.path.join(out_dir, "sweep.csv")
        with open(path, "w", newline="\n") as fh:
            fh.write(render_csv(report))
        written.append(path)
        return written
    head = header_lines(report)
    for col in COLUMNS[1:]:
        path = os.path.join(out_dir, f"{col}.dat")
        with open(path, "w", newline="\n") as fh:
            fh.write("\n".join(head) + "\n")
            fh.write(f"# eps {col}\n")
            for row in report.rows:
                fh.write(f"{fmt_value(row['eps'])} {fmt_value(row[col])}\n")
        written.append(path)
    return written


def write_table(path, columns, names, header=()):
    """Plain whitespace table with a commented header."""
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", newline="\n") as fh:
        for line in header:
            fh.write(f"# {line}\n")
        fh.write("# " + " ".join(names) + "\n")
        for vals in zip(*columns):
            fh.write(" ".join(fmt_value(float(v)) for v in vals) + "\n")
    return path
