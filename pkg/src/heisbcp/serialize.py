"""JSON/CSV emission with reproducible bytes.

Floats are written with Python's shortest round-trip representation, so a
family read back from disk has bit-identical binary64 values.  Non-finite
floats (for example the exclusion margin of a one-ball family) are written as
the strings ``"inf"``, ``"-inf"`` and ``"nan"``.
"""

from __future__ import annotations

import json
import math
from typing import Iterable

import numpy as np

from .chain import ChainFamily
from .covering import BesicovitchFamily


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if math.isfinite(v):
            return v
        return "nan" if math.isnan(v) else ("inf" if v > 0 else "-inf")
    return obj


def dumps(obj) -> str:
    return json.dumps(_clean(obj), indent=2, allow_nan=False) + "\n"


def family_to_json(f) -> dict:
    return f.to_json()


def family_from_json(obj: dict):
    if not isinstance(obj, dict) or "balls" not in obj or "model" not in obj:
        raise ValueError('family JSON needs "model" and "balls"')
    if obj["model"] == "chain":
        return ChainFamily.from_json(obj)
    return BesicovitchFamily.from_json(obj)


def csv_rows(header: Iterable[str], rows: Iterable[Iterable]) -> str:
    def cell(v):
        if v is None:
            return ""
        if isinstance(v, (float, np.floating)):
            return repr(float(v))
        return str(v)

    lines = [",".join(header)]
    lines += [",".join(cell(v) for v in row) for row in rows]
    return "\n".join(lines) + "\n"
