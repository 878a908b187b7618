"""CSV result tables and JSON run metadata."""

from __future__ import annotations

import csv
import io
import json
import platform
from dataclasses import asdict, fields
from pathlib import Path

import numpy as np

from .. import __version__
from ..objective import SAMPLED_VARIANT
from .config import to_jsonable
from .experiments import ResultRow

COLUMNS = [f.name for f in fields(ResultRow)]
_FLOAT_COLS = {"sweep_value", "r_sec", "r", "r_e", "r_sec_weighted_sum", "r_sec_stderr", "objective"}
_INT_COLS = {"user", "iterations", "n_trials"}
_BOOL_COLS = {"converged", "zero_at_init"}


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def rows_to_csv(rows: list) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(COLUMNS)
    for row in rows:
        d = asdict(row)
        writer.writerow([_fmt(d[c]) for c in COLUMNS])
    return buf.getvalue()


def parse_csv(text: str) -> list:
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames != COLUMNS:
        raise ValueError(f"unexpected CSV header {reader.fieldnames}")
    rows = []
    for rec in reader:
        kw = {}
        for c in COLUMNS:
            v = rec[c]
            if c in _FLOAT_COLS:
                kw[c] = float(v)
            elif c in _INT_COLS:
                kw[c] = int(v)
            elif c in _BOOL_COLS:
                kw[c] = v == "true"
            else:
                kw[c] = v
        rows.append(ResultRow(**kw))
    return rows


def read_results(path: str | Path) -> list:
    return parse_csv(Path(path).read_text())


def run_metadata(spec, sweep=None, extra: dict | None = None) -> dict:
    meta = {
        "software": {
            "package": "irssec",
            "version": __version__,
            "numpy": np.__version__,
            "python": platform.python_version(),
        },
        "kind": spec.kind,
        "grid": list(spec.grid),
        "master_seed": spec.master_seed,
        "seed_layout": {
            "placement": [0],
            "channels": "[1, point_index]",
            "benchmark_phases": "[2, point_index]",
        },
        "alignment_variant": SAMPLED_VARIANT,
        "config": spec.raw,
    }
    if sweep is not None:
        p = sweep.placement
        meta["placement"] = {
            "terminals": [asdict(t) for t in p.terminals],
            "irs_arrival": asdict(p.irs_arrival),
            "irs_departure": asdict(p.irs_departure),
        }
        meta["zero_objective_at_init"] = sorted(
            {r.sweep_value for r in sweep.rows if r.scheme == "proposed" and r.zero_at_init}
        )
        meta["failed_points"] = sorted({r.sweep_value for r in sweep.rows if r.status != "ok"})
    if extra:
        meta.update(extra)
    return to_jsonable(meta)


def emit_results(rows: list, out_dir: str | Path, meta: dict | None = None) -> tuple[Path, Path]:
    """Write ``results.csv`` and ``meta.json`` into ``out_dir``."""
    out = Path(out_dir)
    csv_path, meta_path = out / "results.csv", out / "meta.json"
    try:
        out.mkdir(parents=True, exist_ok=True)
        csv_path.write_text(rows_to_csv(rows))
        meta_path.write_text(json.dumps(meta or {}, indent=2, sort_keys=True) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write results to {out}: {exc}") from exc
    return csv_path, meta_path
