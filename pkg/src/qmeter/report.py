"""Plain-text tables and JSON encoding for command reports."""

from __future__ import annotations

import json
import os
import sys
from typing import Any, Sequence

import numpy as np

_ANSI = {"bold": "\033[1m", "green": "\033[32m", "red": "\033[31m", "reset": "\033[0m"}


def use_color(stream=None) -> bool:
    stream = sys.stdout if stream is None else stream
    if os.environ.get("QMETER_NO_COLOR"):
        return False
    return hasattr(stream, "isatty") and stream.isatty()


def style(text: str, *names: str, color: bool = False) -> str:
    if not color:
        return text
    return "".join(_ANSI[n] for n in names) + text + _ANSI["reset"]


def fmt(x: Any) -> str:
    """Human-readable number with 6 significant digits."""
    if x is None:
        return "undefined"
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x))
    if isinstance(x, (complex, np.complexfloating)):
        z = complex(x)
        sign = "-" if z.imag < 0 else "+"
        return f"{_g(z.real)}{sign}{_g(abs(z.imag))}i"
    if isinstance(x, (float, np.floating)):
        return _g(float(x))
    return str(x)


def _g(v: float) -> str:
    s = f"{v:.6g}"
    return "0" if s == "-0" else s


def table(headers: Sequence[str], rows: Sequence[Sequence[Any]], color: bool = False) -> str:
    cells = [[fmt(c) for c in row] for row in rows]
    widths = [max([len(h)] + [len(r[i]) for r in cells]) for i, h in enumerate(headers)]
    head = "  ".join(h.ljust(w) for h, w in zip(headers, widths))
    lines = [style(head.rstrip(), "bold", color=color), "  ".join("-" * w for w in widths)]
    lines += ["  ".join(c.rjust(w) for c, w in zip(r, widths)).rstrip() for r in cells]
    return "\n".join(lines)


def jsonable(x: Any) -> Any:
    """Turn numpy scalars/arrays and complex numbers into JSON-ready values.

    Complex values become ``[re, im]``; floats keep full precision because
    ``json`` writes the shortest string that round-trips.
    """
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return jsonable(x.tolist())
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (complex, np.complexfloating)):
        return [float(x.real), float(x.imag)]
    if isinstance(x, (float, np.floating)):
        return float(x)
    return x


def dumps(report: dict) -> str:
    return json.dumps(jsonable(report), indent=2, allow_nan=False) + "\n"
