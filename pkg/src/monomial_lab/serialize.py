"""JSON encoding of report records.

Exact rationals are written as strings ("p/q" or "p") so they survive the
round trip bit-exactly; floats stay JSON numbers, with non-finite values
spelled "inf", "-inf", "nan". Dataclass records carry a "type" tag.
"""
from __future__ import annotations

import dataclasses
import json
import math
from fractions import Fraction

from . import difference, equation, gp, stability

_RECORDS = {cls.__name__: cls for cls in (
    difference.ChainReport, difference.StageResult, difference.DifferenceSpec,
    equation.ResidualStats, equation.EquationFamily,
    gp.GPModel, stability.StabilityBranch, stability.StabilityReport,
    stability.Certification,
)}

_SPECIAL = {"inf": math.inf, "-inf": -math.inf, "nan": math.nan}


def num_out(v):
    if isinstance(v, bool) or v is None:
        return v
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, float) and not math.isfinite(v):
        return "nan" if math.isnan(v) else ("inf" if v > 0 else "-inf")
    return v


def num_in(v):
    if isinstance(v, str):
        if v in _SPECIAL:
            return _SPECIAL[v]
        try:
            return Fraction(v)
        except ValueError:
            return v
    return v


def to_jsonable(obj):
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        out = {"type": type(obj).__name__}
        for f in dataclasses.fields(obj):
            if f.compare:
                out[f.name] = to_jsonable(getattr(obj, f.name))
        return out
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, dict):
        return {k: to_jsonable(v) for k, v in obj.items()}
    return num_out(obj)


def from_jsonable(data):
    if isinstance(data, dict):
        if "type" in data and data["type"] in _RECORDS:
            cls = _RECORDS[data["type"]]
            kwargs = {k: from_jsonable(v) for k, v in data.items() if k != "type"}
            return cls(**kwargs)
        return {k: from_jsonable(v) for k, v in data.items()}
    if isinstance(data, list):
        return tuple(from_jsonable(v) for v in data)
    return num_in(data)


def dumps(obj) -> str:
    return json.dumps(to_jsonable(obj), sort_keys=True, indent=2)


def loads(text: str):
    return from_jsonable(json.loads(text))


def classification_to_json(cls_result) -> dict:
    """Flat form used by the classify command."""
    out = {"class": cls_result.name}
    if isinstance(cls_result, equation.Degree):
        out.update(degree=cls_result.k, **{"lambda": num_out(cls_result.ratio)})
    elif isinstance(cls_result, equation.NonIntegerDegree):
        out.update(value=num_out(cls_result.value), only_trivial=True)
    else:
        out["lambda"] = num_out(cls_result.ratio)
        if isinstance(cls_result, equation.UndefinedBase):
            out["fallback"] = cls_result.fallback
    return out


def classification_from_json(data: dict):
    kind = data["class"]
    if kind == "Degree":
        return equation.Degree(data["degree"], num_in(data["lambda"]))
    if kind == "NonIntegerDegree":
        return equation.NonIntegerDegree(num_in(data["value"]))
    if kind == "DegenerateRatio":
        return equation.DegenerateRatio(num_in(data["lambda"]))
    if kind == "UndefinedBase":
        return equation.UndefinedBase(num_in(data["lambda"]))
    raise ValueError(f"unknown classification {kind!r}")
