# apps/ghm/services/report.py
"""
GramReport serialization. Output is deterministic: keys keep a fixed order,
rationals are "p/q" strings, BigFloats carry ceil(prec log10 2) digits and
the eigenvalue enclosure endpoints are rounded outward.
"""
from __future__ import annotations

import csv
import io
import json
from typing import Any, Dict, List, Optional

from apps.ghm.services.errors import ParameterError
from apps.ghm.services.exact_arith import ROUND_CEILING, ROUND_FLOOR, BigFloat, format_complex
from apps.ghm.services.gram_engine import GramReport, LowerBound
from apps.ghm.services.matrix_core import EigenvalueEnclosure, ExactMatrix

FORMATS = ("json", "csv")
BOUND_KEYS = ("b1", "b2", "closed", "corollary", "cd")


def _matrix(M: Optional[ExactMatrix]) -> Optional[List[List[str]]]:
    return None if M is None else M.to_strings()


def _scalar(x) -> Optional[str]:
    return None if x is None else format_complex(x)


def _bound(b: Optional[LowerBound]) -> Optional[str]:
    return None if b is None else str(b.value)


def _enclosure(e: Optional[EigenvalueEnclosure]) -> Dict[str, Optional[str]]:
    if e is None:
        return {"lo": None, "hi": None, "value": None}
    return {
        "lo": str(BigFloat.from_rational(e.lo, e.prec, ROUND_FLOOR)),
        "hi": str(BigFloat.from_rational(e.hi, e.prec, ROUND_CEILING)),
        "value": str(e.value),
    }


def report_dict(report: GramReport) -> Dict[str, Any]:
    bounds: Dict[str, Any] = {key: _bound(report.bounds.get(key)) for key in BOUND_KEYS}
    bounds["certified"] = report.bounds_certified
    bounds["exact"] = {
        key: (None if report.bounds.get(key) is None else format_complex(report.bounds[key].exact))
        for key in BOUND_KEYS
    }
    if report.bound_notes:
        bounds["notes"] = dict(sorted(report.bound_notes.items()))
    return {
        "family": report.family,
        "command": report.command,
        "n": report.n,
        "prec": report.prec,
        "z0": _scalar(report.z0),
        "entries": _matrix(report.entries),
        "det": {
            "closed": _scalar(report.det_closed),
            "oracle": _scalar(report.det_oracle),
            "match": report.det_match,
        },
        "inverse": {
            "closed": _matrix(report.inverse_closed),
            "oracle": _matrix(report.inverse_oracle),
            "match": report.inverse_match,
        },
        "bounds": bounds,
        "lambda_s": _enclosure(report.enclosure),
        "checks": dict(report.checks),
        "errata": [
            {
                "name": e.name,
                "printed": e.printed,
                "corrected": e.corrected,
                "match": e.matches,
                "note": e.note,
            }
            for e in report.errata
        ],
        "errors": list(report.errors),
    }


def _flatten(prefix: str, value: Any, out: List[List[str]]) -> None:
    if isinstance(value, dict):
        for key, item in value.items():
            _flatten(f"{prefix}.{key}" if prefix else str(key), item, out)
    elif isinstance(value, list):
        for i, item in enumerate(value):
            _flatten(f"{prefix}.{i}", item, out)
    elif value is None:
        out.append([prefix, ""])
    elif isinstance(value, bool):
        out.append([prefix, "true" if value else "false"])
    else:
        out.append([prefix, str(value)])


def emit_report(report: GramReport, fmt: str = "json") -> str:
    """JSON document, or a two-column key,value CSV with dotted keys (matrices row-major)."""
    data = report_dict(report)
    if fmt == "json":
        return json.dumps(data, indent=2, ensure_ascii=False) + "\n"
    if fmt == "csv":
        rows: List[List[str]] = []
        _flatten("", data, rows)
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["key", "value"])
        writer.writerows(rows)
        return buf.getvalue()
    raise ParameterError(f"unknown report format {fmt!r}; expected one of {FORMATS}")
