"""Run reports and their JSON / CSV / text renderings.

JSON output is deterministic: keys are sorted, separators are compact and
every float is written with 17 significant digits, so equal reports give
equal bytes.  Non-finite floats use the ``Infinity``/``NaN`` tokens that
Python's json module reads back.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Tuple

from .certificates import Certificate
from .norms import Enclosure

SCHEMA_VERSION = "1"
FORMATS = ("json", "csv", "text")

CSV_COLUMNS = ("inequality_id", "verdict", "constant", "lhs_lo", "lhs_hi", "rhs_lo", "rhs_hi",
               "margin", "ratio", "certified")


@dataclass(frozen=True)
class Report:
    config: Dict[str, Any] = field(default_factory=dict)
    certificates: Tuple[Certificate, ...] = ()
    enclosures: Tuple[Tuple[str, Enclosure], ...] = ()
    diagnostics: Tuple[Dict[str, Any], ...] = ()
    version: str = SCHEMA_VERSION
    wall_time_ms: int = 0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "config": self.config,
            "certificates": [c.to_dict() for c in self.certificates],
            "enclosures": [{"name": name, **enc.to_dict()} for name, enc in self.enclosures],
            "diagnostics": list(self.diagnostics),
            "version": self.version,
            "wall_time_ms": int(self.wall_time_ms),
        }

    @classmethod
    def from_dict(cls, d: Dict[str, Any]) -> "Report":
        encs = []
        for e in d.get("enclosures", []):
            e = dict(e)
            name = e.pop("name")
            encs.append((name, Enclosure.from_dict(e)))
        return cls(
            config=d.get("config", {}),
            certificates=tuple(Certificate.from_dict(c) for c in d.get("certificates", [])),
            enclosures=tuple(encs),
            diagnostics=tuple(d.get("diagnostics", [])),
            version=d.get("version", SCHEMA_VERSION),
            wall_time_ms=int(d.get("wall_time_ms", 0)),
        )


def _float(v: float) -> str:
    if math.isnan(v):
        return "NaN"
    if math.isinf(v):
        return "Infinity" if v > 0 else "-Infinity"
    s = "%.17g" % v
    if not any(ch in s for ch in ".en"):
        s += ".0"
    return s


def _encode(obj: Any, out: List[str]) -> None:
    if obj is None or isinstance(obj, bool):
        out.append(json.dumps(obj))
    elif isinstance(obj, int):
        out.append(str(obj))
    elif isinstance(obj, float):
        out.append(_float(obj))
    elif isinstance(obj, str):
        out.append(json.dumps(obj, ensure_ascii=False))
    elif isinstance(obj, dict):
        out.append("{")
        for i, key in enumerate(sorted(obj, key=str)):
            if i:
                out.append(",")
            out.append(json.dumps(str(key), ensure_ascii=False))
            out.append(":")
            _encode(obj[key], out)
        out.append("}")
    elif isinstance(obj, (list, tuple)):
        out.append("[")
        for i, item in enumerate(obj):
            if i:
                out.append(",")
            _encode(item, out)
        out.append("]")
    elif hasattr(obj, "item"):  # numpy scalar
        _encode(obj.item(), out)
    elif hasattr(obj, "value"):  # enum
        _encode(obj.value, out)
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj: Any) -> str:
    out: List[str] = []
    _encode(obj, out)
    return "".join(out)


def _csv(report: Report) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for c in report.certificates:
        w.writerow([c.inequality_id.value, c.verdict.value, _float(c.constant),
                    _float(c.lhs.lo), _float(c.lhs.hi), _float(c.rhs_norm.lo), _float(c.rhs_norm.hi),
                    _float(c.margin), _float(c.ratio), c.lhs.certified and c.rhs_norm.certified])
    return buf.getvalue()


def _text(report: Report) -> str:
    lines = [f"report version {report.version}"]
    if report.config:
        lines.append("config: " + ", ".join(f"{k}={report.config[k]}" for k in sorted(report.config)))
    for c in report.certificates:
        lines.append(f"{c.inequality_id.value}: {c.verdict.value}  lhs=[{c.lhs.lo:.12g}, {c.lhs.hi:.12g}]"
                     f"  constant={c.constant:.12g}  rhs=[{c.rhs_norm.lo:.12g}, {c.rhs_norm.hi:.12g}]"
                     f"  margin={c.margin:.6g}")
    for name, e in report.enclosures:
        flag = "certified" if e.certified else "observed"
        lines.append(f"{name}: [{e.lo:.15g}, {e.hi:.15g}] ({flag})")
    for d in report.diagnostics:
        if "criterion" in d:
            mark = "PASS" if d.get("passed") else "FAIL"
            lines.append(f"[{mark}] criterion {d['criterion']}: {d.get('title', '')}")
        else:
            lines.append(dumps(d))
    if report.wall_time_ms:
        lines.append(f"wall time {report.wall_time_ms} ms")
    return "\n".join(lines) + "\n"


def emit(report: Report, fmt: str = "json") -> bytes:
    """Render ``report`` as bytes in one of :data:`FORMATS`."""
    if fmt == "json":
        return (dumps(report.to_dict()) + "\n").encode("utf-8")
    if fmt == "csv":
        return _csv(report).encode("utf-8")
    if fmt == "text":
        return _text(report).encode("utf-8")
    raise ValueError(f"unknown format {fmt!r}")


def load_report(data) -> Report:
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    return Report.from_dict(json.loads(data))
