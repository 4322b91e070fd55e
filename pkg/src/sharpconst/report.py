"""Experiment reports with deterministic JSON and fixed-column CSV output."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

SCHEMA_VERSION = 1
CSV_COLUMNS = ("epsilon", "raw_value", "extrapolated", "target", "rel_error", "converged")


def _clean(x):
    """JSON-safe value: non-finite floats become strings, tuples become lists."""
    if isinstance(x, float):
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if hasattr(x, "__float__") and not isinstance(x, (bool, int)):
        return _clean(float(x))
    return x


@dataclass
class ExperimentRow:
    epsilon: float
    raw_value: float
    extrapolated: float | None
    target: float | None
    rel_error: float | None
    converged: bool

    def as_dict(self) -> dict:
        return {c: getattr(self, c) for c in CSV_COLUMNS}


@dataclass
class ExperimentReport:
    kind: str
    params: dict
    rows: list = field(default_factory=list)
    summary: dict = field(default_factory=dict)
    passed: bool | None = None
    diagnostics: list = field(default_factory=list)

    @property
    def converged(self) -> bool:
        return all(r.converged for r in self.rows)

    def to_dict(self) -> dict:
        return _clean({
            "schema": SCHEMA_VERSION,
            "kind": self.kind,
            "params": self.params,
            "rows": [r.as_dict() for r in self.rows],
            "summary": self.summary,
            "passed": self.passed,
            "converged": self.converged,
            "diagnostics": self.diagnostics,
        })

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in self.rows:
            w.writerow(["" if v is None else (repr(v) if isinstance(v, float) else v) for v in r.as_dict().values()])
        return buf.getvalue()

    def to_pretty(self) -> str:
        lines = [f"{self.kind}  " + "  ".join(f"{k}={v}" for k, v in sorted(self.params.items()))]
        lines.append("  ".join(f"{c:>14}" for c in CSV_COLUMNS))
        for r in self.rows:
            cells = []
            for v in r.as_dict().values():
                if isinstance(v, float):
                    cells.append(f"{v:>14.8g}")
                else:
                    cells.append(f"{str(v):>14}")
            lines.append("  ".join(cells))
        for k, v in sorted(self.summary.items()):
            lines.append(f"{k}: {v}")
        if self.passed is not None:
            lines.append("PASS" if self.passed else "FAIL")
        return "\n".join(lines) + "\n"
