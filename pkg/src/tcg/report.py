"""File output for completed searches: JSON summary, CSV table, DOT and profile files.

Everything written here is a pure function of the reports, so identical runs
produce identical bytes.  Wall-clock times are never written.
"""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path
from typing import Iterable, Sequence

from .cost import format_fraction
from .metrics import quality_report
from .tree import dumps, to_dot

CSV_COLUMNS = ("n", "trees_scanned", "count", "best_sc", "worst_sc", "pos_ratio", "poa_ratio", "fr_min", "fr_max")
FORMATS = ("json", "csv", "dot")


def csv_rows(reports) -> list[dict]:
    rows = []
    for r in reports:
        row = {c: "" for c in CSV_COLUMNS}
        row.update(n=r.n, trees_scanned=r.trees_scanned, count=r.count)
        if r.count:
            q = quality_report(r)
            row.update(
                best_sc=q.best_sc,
                worst_sc=q.worst_sc,
                pos_ratio=format_fraction(q.pos_ratio),
                poa_ratio=format_fraction(q.poa_ratio),
                fr_min=format_fraction(min(r.fr_values)),
                fr_max=format_fraction(max(r.fr_values)),
            )
        rows.append(row)
    return rows


def render_csv(reports) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(csv_rows(reports))
    return buf.getvalue()


def render_json(reports) -> str:
    payload = []
    for r in reports:
        entry = r.to_dict()
        entry["quality"] = quality_report(r).to_dict()
        payload.append(entry)
    return json.dumps({"reports": payload}, indent=2, sort_keys=True) + "\n"


def _write(path: Path, text: str) -> Path:
    try:
        path.write_text(text, encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror}") from exc
    return path


def emit_report(reports: Sequence, out_dir, formats: Iterable[str] = FORMATS) -> list[Path]:
    """Write the requested formats under ``out_dir``; returns the written paths in order.

    ``dot`` also writes each equilibrium as a profile file that ``verify`` reads back.
    """
    formats = list(formats)
    for f in formats:
        if f not in FORMATS:
            raise ValueError(f"unknown format {f!r}")
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create {out}: {exc.strerror}") from exc
    written = []
    if "json" in formats:
        written.append(_write(out / "equilibria.json", render_json(reports)))
    if "csv" in formats:
        written.append(_write(out / "summary.csv", render_csv(reports)))
    if "dot" in formats:
        for r in reports:
            for k, (code, profile) in enumerate(r.equilibria):
                stem = f"n{r.n:02d}_eq{k}"
                written.append(_write(out / f"{stem}.dot", to_dot(profile, name=f"n{r.n}_eq{k}")))
                written.append(_write(out / f"{stem}.json", dumps(profile) + "\n"))
    return written
