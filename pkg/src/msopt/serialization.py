"""JSON instance files (schema version "1").

Two kinds share the envelope ``{"schema_version": "1", "kind": ...}``:

* ``multiscale``: ``first_stage`` with ``c``, sparse ``rows`` and optional
  ``x_upper``; ``subperiods`` each with ``weight``, ``q`` and rows carrying
  separate ``x_coeffs`` / ``y_coeffs`` maps.
* ``capacity``: dimensions ``J, I, S`` and the arrays ``a, c, d, f, g``.

Floats are written with ``repr`` precision, so a write/read cycle reproduces
every number bit for bit. Infinite bounds are written as ``null``.
"""
from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Union

import numpy as np

from .lp import SENSES
from .model import CapacityInstance, FirstStage, MultiScaleInstance, Subperiod

SCHEMA_VERSION = "1"


class ParseError(ValueError):
    pass


class SchemaVersionMismatch(ParseError):
    pass


def _num(v):
    v = float(v)
    return v if math.isfinite(v) else None


def _sparse(vec):
    return {str(j): float(v) for j, v in enumerate(vec) if v != 0.0}


def _bounds_out(arr, default):
    arr = np.asarray(arr, dtype=float)
    if np.array_equal(arr, np.full(arr.shape, default)):
        return None
    return [_num(v) for v in arr]


def instance_to_dict(inst) -> dict:
    if isinstance(inst, CapacityInstance):
        out = {
            "schema_version": SCHEMA_VERSION,
            "kind": "capacity",
            "name": inst.name,
            "J": inst.J,
            "I": inst.I,
            "S": inst.S,
            "a": inst.a.tolist(),
            "c": inst.c.tolist(),
            "d": inst.d.tolist(),
            "f": inst.f.tolist(),
            "g": inst.g.tolist(),
        }
        if inst.x_upper is not None:
            out["x_upper"] = [_num(v) for v in inst.x_upper]
        return out

    fs = inst.first_stage
    first = {
        "c": fs.c.tolist(),
        "rows": [{"coeffs": _sparse(fs.A[i]), "sense": fs.senses[i], "rhs": float(fs.b[i])}
                 for i in range(len(fs.senses))],
    }
    for key, arr, default in (("x_lower", fs.lower, 0.0), ("x_upper", fs.upper, math.inf)):
        v = _bounds_out(arr, default)
        if v is not None:
            first[key] = v
    subs = []
    for sub in inst.subperiods:
        d = {
            "weight": sub.weight,
            "q": sub.q.tolist(),
            "rows": [{"x_coeffs": _sparse(sub.T[i]), "y_coeffs": _sparse(sub.W[i]),
                      "sense": sub.senses[i], "rhs": float(sub.h[i])}
                     for i in range(sub.n_rows)],
        }
        for key, arr, default in (("y_lower", sub.lower, 0.0), ("y_upper", sub.upper, math.inf)):
            v = _bounds_out(arr, default)
            if v is not None:
                d[key] = v
        subs.append(d)
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "multiscale",
        "metadata": {"name": inst.name, "description": inst.description},
        "first_stage": first,
        "subperiods": subs,
    }


def dumps_instance(inst) -> str:
    return json.dumps(instance_to_dict(inst), indent=2) + "\n"


def write_instance(inst, path: Union[str, Path]) -> None:
    Path(path).write_text(dumps_instance(inst))


class _Reader:
    def __init__(self, source):
        self.source = source

    def fail(self, where, msg):
        raise ParseError(f"{self.source}: {where}: {msg}")

    def get(self, obj, key, where):
        if not isinstance(obj, dict):
            self.fail(where, "expected an object")
        if key not in obj:
            self.fail(where, f'missing field "{key}"')
        return obj[key]

    def vec(self, v, where, allow_null=False, null_value=math.inf):
        if not isinstance(v, list):
            self.fail(where, "expected a list of numbers")
        out = []
        for k, t in enumerate(v):
            if t is None and allow_null:
                out.append(null_value)
            elif isinstance(t, (int, float)) and not isinstance(t, bool):
                out.append(float(t))
            else:
                self.fail(f"{where}[{k}]", f"expected a number, got {t!r}")
        return np.array(out, dtype=float)

    def sparse(self, obj, n, where):
        if not isinstance(obj, dict):
            self.fail(where, "expected an object mapping index to value")
        out = np.zeros(n)
        for key, v in obj.items():
            try:
                j = int(key)
            except ValueError:
                self.fail(where, f"bad index {key!r}")
            if not 0 <= j < n:
                self.fail(where, f"index {j} out of range 0..{n - 1}")
            if not isinstance(v, (int, float)) or isinstance(v, bool):
                self.fail(f"{where}.{key}", f"expected a number, got {v!r}")
            out[j] = float(v)
        return out

    def sense(self, v, where):
        if v not in SENSES:
            self.fail(where, f"sense must be one of {SENSES}, got {v!r}")
        return v

    def rhs(self, v, where):
        if not isinstance(v, (int, float)) or isinstance(v, bool):
            self.fail(where, f"expected a number, got {v!r}")
        return float(v)


def instance_from_dict(data, source="<dict>"):
    rd = _Reader(source)
    if not isinstance(data, dict):
        rd.fail("top level", "expected an object")
    version = rd.get(data, "schema_version", "top level")
    if str(version) != SCHEMA_VERSION:
        raise SchemaVersionMismatch(f"{source}: schema_version {version!r}, expected {SCHEMA_VERSION!r}")
    kind = rd.get(data, "kind", "top level")

    if kind == "capacity":
        J, I, S = (rd.get(data, k, "top level") for k in ("J", "I", "S"))
        try:
            a = np.array(rd.get(data, "a", "top level"), dtype=float)
            arrays = {k: np.array(rd.get(data, k, "top level"), dtype=float) for k in ("c", "d", "f", "g")}
        except (TypeError, ValueError) as exc:
            rd.fail("capacity arrays", str(exc))
        expected = {"a": (S, I, J), "c": (J,), "d": (S, I), "f": (I, J), "g": (S,)}
        for k, shape in expected.items():
            got = a.shape if k == "a" else arrays[k].shape
            if got != tuple(shape):
                rd.fail(k, f"shape {got} does not match J={J}, I={I}, S={S}")
        x_upper = data.get("x_upper")
        if x_upper is not None:
            x_upper = rd.vec(x_upper, "x_upper", allow_null=True)
        try:
            return CapacityInstance(a, arrays["c"], arrays["d"], arrays["f"], arrays["g"],
                                    x_upper=x_upper, name=data.get("name", ""))
        except ValueError as exc:
            rd.fail("capacity", str(exc))

    if kind != "multiscale":
        rd.fail("kind", f'expected "multiscale" or "capacity", got {kind!r}')

    first = rd.get(data, "first_stage", "top level")
    c = rd.vec(rd.get(first, "c", "first_stage"), "first_stage.c")
    n_x = c.size
    rows = rd.get(first, "rows", "first_stage")
    if not isinstance(rows, list):
        rd.fail("first_stage.rows", "expected a list")
    A = np.zeros((len(rows), n_x))
    senses, b = [], []
    for i, row in enumerate(rows):
        w = f"first_stage.rows[{i}]"
        A[i] = rd.sparse(rd.get(row, "coeffs", w), n_x, w + ".coeffs")
        senses.append(rd.sense(rd.get(row, "sense", w), w + ".sense"))
        b.append(rd.rhs(rd.get(row, "rhs", w), w + ".rhs"))
    lower = rd.vec(first["x_lower"], "first_stage.x_lower", True, -math.inf) if "x_lower" in first else None
    upper = rd.vec(first["x_upper"], "first_stage.x_upper", True, math.inf) if "x_upper" in first else None
    try:
        fs = FirstStage(c, A, senses, b, lower, upper)
    except ValueError as exc:
        rd.fail("first_stage", str(exc))

    subs_raw = rd.get(data, "subperiods", "top level")
    if not isinstance(subs_raw, list) or not subs_raw:
        rd.fail("subperiods", "expected a non-empty list")
    subs = []
    for s, sd in enumerate(subs_raw):
        w = f"subperiods[{s}]"
        q = rd.vec(rd.get(sd, "q", w), w + ".q")
        weight = sd.get("weight", 1.0) if isinstance(sd, dict) else 1.0
        rows = rd.get(sd, "rows", w)
        if not isinstance(rows, list):
            rd.fail(w + ".rows", "expected a list")
        T = np.zeros((len(rows), n_x))
        W = np.zeros((len(rows), q.size))
        senses, h = [], []
        for i, row in enumerate(rows):
            wr = f"{w}.rows[{i}]"
            T[i] = rd.sparse(rd.get(row, "x_coeffs", wr), n_x, wr + ".x_coeffs")
            W[i] = rd.sparse(rd.get(row, "y_coeffs", wr), q.size, wr + ".y_coeffs")
            senses.append(rd.sense(rd.get(row, "sense", wr), wr + ".sense"))
            h.append(rd.rhs(rd.get(row, "rhs", wr), wr + ".rhs"))
        lo = rd.vec(sd["y_lower"], w + ".y_lower", True, -math.inf) if "y_lower" in sd else None
        hi = rd.vec(sd["y_upper"], w + ".y_upper", True, math.inf) if "y_upper" in sd else None
        try:
            subs.append(Subperiod(q, T, W, senses, h, weight=rd.rhs(weight, w + ".weight"), lower=lo, upper=hi))
        except ValueError as exc:
            rd.fail(w, str(exc))
    meta = data.get("metadata") or {}
    return MultiScaleInstance(fs, subs, name=meta.get("name", ""), description=meta.get("description", ""))


def read_instance(path: Union[str, Path]):
    """Load a multiscale or capacity instance; raises :class:`ParseError`."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ParseError(f"{path}: {exc.strerror}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    return instance_from_dict(data, source=str(path))
