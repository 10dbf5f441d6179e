"""Deterministic text output: JSON and CSV with 17 significant digits."""

from __future__ import annotations

import math
from numbers import Integral, Real

import numpy as np


def fmt(x) -> str:
    """A float with 17 significant digits ('nan'/'inf' spelled out for CSV)."""
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return "%.17g" % x


def _encode(obj, indent, level):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (Integral, np.integer)):
        return str(int(obj))
    if isinstance(obj, (Real, np.floating)):
        x = float(obj)
        return "null" if not math.isfinite(x) else "%.17g" % x
    if isinstance(obj, (complex, np.complexfloating)):
        return _encode([obj.real, obj.imag], indent, level)
    if isinstance(obj, str):
        return _quote(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{_quote(str(k))}: {_encode(obj[k], indent, level + 1)}"
                 for k in sorted(obj, key=str)]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(isinstance(v, (Real, np.floating, Integral)) and not isinstance(v, bool) for v in obj):
            return "[" + ", ".join(_encode(v, indent, level + 1) for v in obj) + "]"
        items = [pad + _encode(v, indent, level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot encode {type(obj).__name__}")


def _quote(s: str) -> str:
    out = ['"']
    for ch in s:
        if ch in '"\\':
            out.append("\\" + ch)
        elif ch == "\n":
            out.append("\\n")
        elif ord(ch) < 0x20:
            out.append("\\u%04x" % ord(ch))
        else:
            out.append(ch)
    out.append('"')
    return "".join(out)


def dumps(obj, indent: int = 2) -> str:
    """JSON text with sorted keys and 17-significant-digit floats."""
    return _encode(obj, indent, 0) + "\n"


def write_json(obj, path) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(dumps(obj))


def write_rows(path, header, rows) -> None:
    """CSV writer; floats are written with ``fmt``, everything else with str()."""
    def cell(v):
        if v is None:
            return ""
        if isinstance(v, (bool, np.bool_)):
            return "1" if v else "0"
        if isinstance(v, (Integral, np.integer)):
            return str(int(v))
        if isinstance(v, (Real, np.floating)):
            return fmt(v)
        s = str(v)
        return '"' + s.replace('"', '""') + '"' if ("," in s or '"' in s) else s

    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for r in rows:
            fh.write(",".join(cell(r.get(h)) for h in header) + "\n")
