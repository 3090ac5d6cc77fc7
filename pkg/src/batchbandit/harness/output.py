"""Trace CSV and summary JSON writers.

Floats are written with ``repr`` so identical runs produce identical bytes.
"""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path

from batchbandit.harness.runner import ExperimentResult, experiment_summary

TRACE_HEADER = ("trial", "t", "instantaneous", "cumulative", "arm", "forced")


def trace_csv(result: ExperimentResult) -> str:
    buf = io.StringIO()
    buf.write(",".join(TRACE_HEADER) + "\n")
    for r in result.ok:
        tr = r.trace
        pricing = tr.actions.dtype.kind == "f"
        for i in range(tr.T):
            act = repr(float(tr.actions[i])) if pricing else str(int(tr.actions[i]))
            buf.write(f"{r.trial},{i + 1},{float(tr.instantaneous[i])!r},{float(tr.cumulative[i])!r},"
                      f"{act},{int(bool(tr.forced[i]))}\n")
    return buf.getvalue()


def write_outputs(result: ExperimentResult, out_dir) -> dict:
    """Write trace.csv and summary.json (plus errors.json on failures) under out_dir."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {"trace": out / "trace.csv", "summary": out / "summary.json"}
    with open(paths["trace"], "w", encoding="utf-8", newline="\n") as fh:
        fh.write(trace_csv(result))
    summary = experiment_summary(result)
    with open(paths["summary"], "w", encoding="utf-8", newline="\n") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    if result.errors:
        paths["errors"] = out / "errors.json"
        with open(paths["errors"], "w", encoding="utf-8", newline="\n") as fh:
            json.dump(result.errors, fh, indent=2)
            fh.write("\n")
    return paths


def read_trace(path) -> dict:
    """Parse a trace.csv back into {trial: list of cumulative regrets}."""
    out: dict[int, list[float]] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        missing = [c for c in ("trial", "t", "cumulative") if c not in (reader.fieldnames or [])]
        if missing:
            raise ValueError(f"trace file lacks columns: {', '.join(missing)}")
        for row in reader:
            out.setdefault(int(row["trial"]), []).append(float(row["cumulative"]))
    return out
