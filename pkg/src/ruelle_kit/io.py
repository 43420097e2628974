"""Map files, deterministic JSON and CSV output."""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path

import numpy as np

from .config import DEFAULT_CONFIG, RunConfig
from .errors import MalformedMapError
from .maps import RationalMap


def _coeffs(rows, key: str) -> list[complex]:
    if not isinstance(rows, list) or not rows:
        raise MalformedMapError(f"'{key}' must be a non-empty list of [re, im] pairs")
    out = []
    for r in rows:
        if isinstance(r, (int, float)):
            out.append(complex(r))
        elif isinstance(r, list) and len(r) == 2:
            out.append(complex(float(r[0]), float(r[1])))
        else:
            raise MalformedMapError(f"bad coefficient {r!r} in '{key}'")
    return out


def map_from_dict(data: dict, config: RunConfig = DEFAULT_CONFIG) -> RationalMap:
    if not isinstance(data, dict) or "numerator" not in data:
        raise MalformedMapError("map file needs a 'numerator' entry")
    num = _coeffs(data["numerator"], "numerator")
    den = _coeffs(data.get("denominator", [[1.0, 0.0]]), "denominator")
    return RationalMap(num, den, config)


def load_map(path, config: RunConfig = DEFAULT_CONFIG) -> RationalMap:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as err:
        raise MalformedMapError(f"map file is not valid JSON: {err}") from None
    return map_from_dict(data, config)


def map_to_dict(rmap: RationalMap) -> dict:
    return {
        "numerator": [[c.real, c.imag] for c in rmap.numerator.coefficients],
        "denominator": [[c.real, c.imag] for c in rmap.denominator.coefficients],
    }


def fmt(x: float) -> str:
    """17 significant digits; non-finite values become quoted strings in JSON."""
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if x == 0:
        return "0"  # folds -0.0 so signs of zero never differ between runs
    return f"{x:.17g}"


def plain(obj):
    """Convert numpy scalars, arrays and complex numbers into JSON-ready values."""
    if isinstance(obj, dict):
        return {str(k): plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [plain(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    return obj


def _encode(obj, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if obj is None:
        return "null"
    if obj is True:
        return "true"
    if obj is False:
        return "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        s = fmt(obj)
        return s if math.isfinite(obj) else json.dumps(s)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, list):
        if not obj:
            return "[]"
        if all(not isinstance(v, (list, dict)) for v in obj):
            return "[" + ", ".join(_encode(v, indent, level + 1) for v in obj) + "]"
        return "[\n" + ",\n".join(pad + _encode(v, indent, level + 1) for v in obj) + "\n" + end + "]"
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [pad + json.dumps(k) + ": " + _encode(v, indent, level + 1) for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    raise TypeError(f"cannot encode {type(obj).__name__}")


def dumps(obj, indent: int = 2) -> str:
    return _encode(plain(obj), indent, 0) + "\n"


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt(v) if isinstance(v, (float, np.floating)) else v for v in r])
    return buf.getvalue()
