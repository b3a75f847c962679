"""CSV rendering shared by every exporter: 9 significant digits, '.' decimal point."""

from __future__ import annotations

import csv
import io
import math


def fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, str):
        return x
    x = float(x)
    if math.isnan(x):
        return "nan"
    # format() ignores the locale; +0.0 folds -0.0 into 0
    return format(x + 0.0, ".9g")


def to_csv(header, rows, trailer=()) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(x) for x in row])
    for line in trailer:
        buf.write(line + "\n")
    return buf.getvalue()


def read_csv(text: str):
    """Parse CSV text back into (header, rows); lines starting with '#' are skipped."""
    lines = [ln for ln in text.splitlines() if ln and not ln.startswith("#")]
    reader = csv.reader(lines)
    header = next(reader)
    return header, [row for row in reader]
