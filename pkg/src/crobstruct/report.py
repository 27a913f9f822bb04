"""Report assembly, text rendering and the certificate JSON schema."""
from __future__ import annotations

import hashlib
import json
from typing import Any, Sequence

from .exactnum import format_gq
from .series import Series

CERTIFICATE_SCHEMA: dict = {
    "type": "object",
    "required": ["kind", "k", "l", "i0", "caps", "order", "exact", "targets", "generators", "P", "R",
                 "residual_order"],
    "properties": {
        "kind": {"enum": ["Found", "NoneUpToCaps"]},
        "k": {"type": ["integer", "null"]},
        "l": {"type": ["integer", "null"]},
        "i0": {"type": ["integer", "null"], "minimum": 1},
        "caps": {
            "type": "object",
            "required": ["wt_P", "wt_R", "rhw_P", "rhw_R"],
            "additionalProperties": {"type": "integer", "minimum": 0},
        },
        "order": {"type": ["integer", "null"]},
        "exact": {"type": "boolean"},
        "targets": {"type": "array", "items": {"type": "string"}},
        "generators": {"type": "array", "items": {"type": "string"}},
        "P": {"type": "array", "items": {"type": "object", "additionalProperties": {"type": "string"}}},
        "R": {"type": "object", "additionalProperties": {"type": "string"}},
        "residual_order": {"type": ["integer", "null"]},
        "pruned": {"type": "array", "items": {"type": "string"}},
        "generator_hash": {"type": "string"},
        "note": {"type": "string"},
    },
}

REPORT_SCHEMA: dict = {
    "type": "object",
    "required": ["command", "args", "input_sha256", "result", "timing"],
    "properties": {
        "command": {"type": "string"},
        "args": {"type": "object"},
        "input_sha256": {"type": ["string", "null"]},
        "result": {"type": "object"},
        "timing": {"type": ["number", "null"]},
    },
    "definitions": {"certificate": CERTIFICATE_SCHEMA},
}


def variable_names(n: int, stem: str = "chi") -> list[str]:
    return [stem] if n == 1 else [f"{stem}{j + 1}" for j in range(n)]


def format_series(s: Series, names: Sequence[str] | None = None) -> str:
    """``3*chi^2 - 1/2i*chi + O(5)`` style rendering, lowest degree first."""
    names = list(names) if names is not None else variable_names(s.nvars, "x")
    parts = []
    for e, c in sorted(s.items(), key=lambda t: (sum(t[0]), tuple(-x for x in t[0]))):
        mono = "*".join(nm if k == 1 else f"{nm}^{k}" for nm, k in zip(names, e) if k)
        coef = format_gq(c)
        if not mono:
            parts.append(coef)
        elif coef == "1":
            parts.append(mono)
        elif coef == "-1":
            parts.append("-" + mono)
        else:
            parts.append(f"{coef}*{mono}")
    body = " + ".join(parts) if parts else "0"
    if s.order is not None:
        body += f" + O({s.order + 1})"
    return body


def input_hash(data: bytes | None) -> str | None:
    return None if data is None else hashlib.sha256(data).hexdigest()


def make_report(command: str, args: dict, data: bytes | None, result: dict,
                timing: float | None = None) -> dict:
    return {
        "command": command,
        "args": {k: args[k] for k in sorted(args)},
        "input_sha256": input_hash(data),
        "result": result,
        "timing": timing,
    }


def to_json(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=False)


def to_text(obj: Any, indent: int = 0) -> str:
    pad = "  " * indent
    lines = []
    if isinstance(obj, dict):
        for k, v in obj.items():
            if isinstance(v, (dict, list)) and v:
                lines.append(f"{pad}{k}:")
                lines.append(to_text(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {_scalar(v)}")
    elif isinstance(obj, list):
        for v in obj:
            if isinstance(v, (dict, list)) and v:
                lines.append(f"{pad}-")
                lines.append(to_text(v, indent + 1))
            else:
                lines.append(f"{pad}- {_scalar(v)}")
    else:
        lines.append(f"{pad}{_scalar(obj)}")
    return "\n".join(lines)


def _scalar(v) -> str:
    if v is None:
        return "null"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (dict, list)):
        return "{}" if isinstance(v, dict) else "[]"
    return str(v)
