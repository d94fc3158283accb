"""Deterministic CSV/JSON emission: fixed column order, 17-significant-digit
floats, and a config fingerprint embedded in every summary."""

from __future__ import annotations

import hashlib
import json
import math
import os

__all__ = ["fmt_float", "canonical_json", "fingerprint", "write_csv", "write_sweep_outputs"]


def fmt_float(x) -> str:
    if isinstance(x, float):
        if math.isnan(x):
            return "nan"
        return format(x, ".17g")
    return str(x)


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=True)


def fingerprint(config: dict) -> str:
    return hashlib.sha256(canonical_json(config).encode("utf-8")).hexdigest()


def write_csv(path: str, columns, rows) -> None:
    """rows: iterable of dicts; column order fixed by `columns`."""
    lines = [",".join(columns)]
    for row in rows:
        lines.append(",".join(fmt_float(row.get(c)) for c in columns))
    with open(path, "w", newline="") as fh:
        fh.write("\n".join(lines) + "\n")


def write_sweep_outputs(report, out_dir: str, name: str | None = None) -> tuple[str, str]:
    """Write <name>.csv and <name>.summary.json for a SweepReport."""
    os.makedirs(out_dir, exist_ok=True)
    name = name or report.name
    csv_path = os.path.join(out_dir, f"{name}.csv")
    json_path = os.path.join(out_dir, f"{name}.summary.json")
    write_csv(csv_path, report.columns, report.rows)
    summary = {
        "name": report.name,
        "config": report.config,
        "config_fingerprint": fingerprint(report.config),
        "monotone_verdicts": report.verdicts(),
        "final_fractions": {c: report.final_fraction(c) for c in report.monotone_columns},
        "notes": report.notes,
    }
    with open(json_path, "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return csv_path, json_path
