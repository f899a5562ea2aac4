"""Result rows and their CSV / plot-data persistence."""

from __future__ import annotations

import csv
import io
from dataclasses import astuple, dataclass, fields
from pathlib import Path

HEADER = (
    "trial",
    "selector",
    "attacker",
    "step",
    "error",
    "f_value",
    "bound_apriori",
    "bound_aposteriori",
    "bound_prefailure",
    "oracle_calls",
)


@dataclass(frozen=True)
class ResultRow:
    trial: int
    selector: str
    attacker: str
    step: int
    error: float
    f_value: float
    bound_apriori: float | None
    bound_aposteriori: float | None
    bound_prefailure: float | None
    oracle_calls: int


assert tuple(f.name for f in fields(ResultRow)) == HEADER


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _opt_float(s: str) -> float | None:
    return None if s == "" else float(s)


def format_csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(HEADER)
    for row in rows:
        writer.writerow([_cell(v) for v in astuple(row)])
    return buf.getvalue()


def parse_csv(text: str) -> list[ResultRow]:
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if tuple(header or ()) != HEADER:
        raise ValueError(f"unexpected CSV header {header}")
    out = []
    for r in reader:
        out.append(
            ResultRow(
                int(r[0]), r[1], r[2], int(r[3]), float(r[4]), float(r[5]),
                _opt_float(r[6]), _opt_float(r[7]), _opt_float(r[8]), int(r[9]),
            )
        )
    return out


def plot_series(rows) -> dict[tuple[str, str], list[tuple[int, float, int]]]:
    """Per ``(selector, attacker)``: ``(step, mean error, count)`` sorted by step."""
    acc: dict[tuple[str, str, int], list[float]] = {}
    for row in rows:
        acc.setdefault((row.selector, row.attacker, row.step), []).append(row.error)
    series: dict[tuple[str, str], list] = {}
    for (sel, att, step), errs in sorted(acc.items()):
        series.setdefault((sel, att), []).append((step, sum(errs) / len(errs), len(errs)))
    return series


def emit_results(rows, path, format: str = "csv", plot_data: bool = False) -> list[Path]:
    """Write the rows as CSV; with ``plot_data`` also write one whitespace
    separated ``step mean_error count`` file per (selector, attacker) next to it.

    Returns the written paths.  Filesystem errors propagate unchanged.
    """
    if format != "csv":
        raise ValueError(f"unsupported format {format!r}; only 'csv' is available")
    path = Path(path)
    with open(path, "w", newline="") as fh:
        fh.write(format_csv(rows))
    written = [path]
    if plot_data:
        for (sel, att), points in plot_series(rows).items():
            target = path.with_name(f"{path.stem}_{sel}_{att}.dat")
            with open(target, "w") as fh:
                fh.write("# step mean_error count\n")
                for step, mean, n in points:
                    fh.write(f"{step} {mean!r} {n}\n")
            written.append(target)
    return written


def read_results(path) -> list[ResultRow]:
    with open(path, newline="") as fh:
        return parse_csv(fh.read())
