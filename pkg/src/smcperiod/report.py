"""Tabular report of an analysis, serializable as CSV or JSON.

One row per (coding position, state, cycle) carrying the cycle
probability, its log, the cycle ratio and the region color.  Coding
positions are 1-indexed in reports; NaN ratios and missing colors are
left empty (CSV) or null (JSON).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import NamedTuple

from .periodicity import SequenceAnalysis

__all__ = ["ReportRow", "AnalysisReport", "build_report", "write_csv", "write_json"]

SCHEMA_VERSION = 1

CSV_HEADER = "state,k,cycle,p,logp,R,color"


class ReportRow(NamedTuple):
    state: str
    k: int              # 1-indexed coding position
    cycle: int
    p: float
    logp: float
    r: float            # NaN where undefined
    color: str | None


@dataclass(frozen=True)
class AnalysisReport:
    metadata: dict = field(default_factory=dict)
    rows: tuple = ()


def build_report(analysis: SequenceAnalysis, metadata: dict | None = None) -> AnalysisReport:
    """Flatten a SequenceAnalysis into rows ordered by (k, state, cycle)."""
    meta = {"d": analysis.d, "variant": analysis.variant,
            "schema_version": SCHEMA_VERSION}
    if metadata:
        meta.update(metadata)
    rows = []
    for k in sorted(analysis.profiles):
        profile = analysis.profiles[k]
        for si, sym in enumerate(profile.states.symbols):
            ann = analysis.annotations[(k, sym)]
            for n in range(1, profile.n_cycles + 1):
                logp = float(profile.logp[n - 1, si])
                rows.append(ReportRow(
                    state=sym,
                    k=k + 1,
                    cycle=n,
                    p=math.exp(logp) if logp > -math.inf else 0.0,
                    logp=logp,
                    r=float(profile.ratios[n - 1, si]),
                    color=ann.colors[n - 1],
                ))
    return AnalysisReport(metadata=meta, rows=tuple(rows))


def _fmt(x: float) -> str:
    if math.isnan(x):
        return ""
    return "%.12g" % x


def write_csv(report: AnalysisReport, handle) -> None:
    """CSV with '# key=value' comment lines ahead of the header."""
    for key in sorted(report.metadata):
        handle.write("# %s=%s\n" % (key, report.metadata[key]))
    handle.write(CSV_HEADER + "\n")
    for row in report.rows:
        handle.write("%s,%d,%d,%s,%s,%s,%s\n" % (
            row.state, row.k, row.cycle,
            _fmt(row.p), _fmt(row.logp), _fmt(row.r),
            row.color if row.color is not None else ""))


def _json_num(x: float):
    # strict JSON has no NaN/Infinity
    return x if math.isfinite(x) else None


def write_json(report: AnalysisReport, handle) -> None:
    """JSON mirror of the CSV: metadata object plus a rows array."""
    doc = {
        "schema_version": SCHEMA_VERSION,
        "metadata": {k: v for k, v in report.metadata.items() if k != "schema_version"},
        "rows": [
            {"state": r.state, "k": r.k, "cycle": r.cycle,
             "p": _json_num(r.p), "logp": _json_num(r.logp),
             "R": _json_num(r.r), "color": r.color}
            for r in report.rows
        ],
    }
    json.dump(doc, handle, indent=None, separators=(",", ":"), allow_nan=False)
    handle.write("\n")
