"""Serialization of results and value tables with deterministic output.

Scalars are rendered as ``{"re": float, "im": float}`` (floats with 17
significant digits, which round-trips every double) or
``{"num": "int", "den": "int"}`` for exact rationals, with the integers as
decimal strings so no precision is lost in any JSON reader.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import struct
from fractions import Fraction
from typing import Any

import jsonschema
import numpy as np

from .divisor import ValueTable
from .errors import DomainError

MAGIC = b"DIVCORR\x01"

# --------------------------------------------------------------------------
# scalars


def render_scalar(v) -> dict:
    if isinstance(v, (bool, np.bool_)):
        raise TypeError("booleans are not scalars")
    if isinstance(v, (int, np.integer, Fraction)):
        v = Fraction(int(v)) if not isinstance(v, Fraction) else v
        return {"num": str(v.numerator), "den": str(v.denominator)}
    c = complex(v)
    return {"re": c.real, "im": c.imag}


def parse_scalar(d: dict):
    if "num" in d:
        v = Fraction(int(d["num"]), int(d["den"]))
        return v.numerator if v.denominator == 1 else v
    return complex(d["re"], d["im"])


# --------------------------------------------------------------------------
# JSON


def _fmt_float(x: float) -> str:
    if not math.isfinite(x):
        raise DomainError(f"non-finite value {x} cannot be serialized")
    if x == 0:
        return "0.0" if math.copysign(1, x) > 0 else "-0.0"
    s = format(x, ".17g")
    if "." not in s and "e" not in s and "inf" not in s:
        s += ".0"
    return s


def _encode(obj: Any, out: list[str]) -> None:
    if obj is None:
        out.append("null")
    elif obj is True:
        out.append("true")
    elif obj is False:
        out.append("false")
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        out.append(_fmt_float(float(obj)))
    elif isinstance(obj, str):
        out.append(json.dumps(obj, ensure_ascii=False))
    elif isinstance(obj, dict):
        out.append("{")
        for i, (k, v) in enumerate(obj.items()):
            if i:
                out.append(", ")
            out.append(json.dumps(str(k)))
            out.append(": ")
            _encode(v, out)
        out.append("}")
    elif isinstance(obj, (list, tuple)):
        out.append("[")
        for i, v in enumerate(obj):
            if i:
                out.append(", ")
            _encode(v, out)
        out.append("]")
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(doc: Any) -> str:
    """Deterministic JSON text with 17-significant-digit floats and a trailing newline."""
    out: list[str] = []
    _encode(doc, out)
    out.append("\n")
    return "".join(out)


# --------------------------------------------------------------------------
# schemas

SCALAR_SCHEMA = {
    "oneOf": [
        {
            "type": "object",
            "properties": {"re": {"type": "number"}, "im": {"type": "number"}},
            "required": ["re", "im"],
            "additionalProperties": False,
        },
        {
            "type": "object",
            "properties": {
                "num": {"type": "string", "pattern": "^-?[0-9]+$"},
                "den": {"type": "string", "pattern": "^[1-9][0-9]*$"},
            },
            "required": ["num", "den"],
            "additionalProperties": False,
        },
    ]
}

_SCALAR = {"$ref": "#/$defs/scalar"}
_OPT_SCALAR = {"oneOf": [{"$ref": "#/$defs/scalar"}, {"type": "null"}]}

_RESULTS = {
    "sieve": {
        "type": "object",
        "required": ["limit", "mode", "label", "digest", "values"],
        "properties": {
            "limit": {"type": "integer"},
            "mode": {"enum": ["float", "exact"]},
            "label": {"type": "string"},
            "digest": {"type": "string"},
            "values": {"type": "array", "items": _SCALAR},
        },
    },
    "identity": {
        "type": "object",
        "required": ["x", "mode", "max_abs_deviation", "worst_n", "terms_evaluated"],
        "properties": {
            "x": {"type": "integer"},
            "mode": {"enum": ["float", "exact"]},
            "max_abs_deviation": _SCALAR,
            "worst_n": {"type": ["integer", "null"]},
            "terms_evaluated": {"type": "integer"},
            "coefficients": {"type": "array", "items": _SCALAR},
        },
    },
    "friable": {
        "type": "object",
        "required": ["sum_total", "sum_I", "sum_triv", "residual", "split_mass", "split_count"],
        "properties": {
            "sum_total": _SCALAR,
            "sum_I": _SCALAR,
            "sum_triv": _SCALAR,
            "residual": _SCALAR,
            "split_mass": _SCALAR,
            "split_count": {"type": "integer"},
            "classification": {"type": ["string", "null"]},
            "split": {"type": ["array", "null"], "items": {"type": "integer"}},
        },
    },
    "correlation": {
        "type": "object",
        "required": ["d_value", "m_value", "sigma_value", "normalized_gap"],
        "properties": {
            "d_value": _SCALAR,
            "m_value": _SCALAR,
            "sigma_value": _OPT_SCALAR,
            "normalized_gap": {"type": "number", "minimum": 0},
            "partials": {"type": "object", "additionalProperties": _SCALAR},
        },
    },
    "main_term": {
        "type": "object",
        "required": ["m_value", "partials"],
        "properties": {
            "m_value": _SCALAR,
            "partials": {"type": "object", "additionalProperties": _SCALAR},
        },
    },
    "rows": {
        "type": "object",
        "required": ["rows"],
        "properties": {"rows": {"type": "array", "items": {"type": "object"}}},
    },
    "constant": {
        "type": "object",
        "required": ["name", "value", "prime_cutoff", "tail_bound", "error_bound"],
        "properties": {
            "name": {"type": "string"},
            "value": _SCALAR,
            "prime_cutoff": {"type": "integer"},
            "tail_bound": {"type": "number", "minimum": 0},
            "error_bound": {"type": "number", "minimum": 0},
        },
    },
}

COMMAND_RESULT = {
    "sieve": "sieve",
    "identity-hb": "identity",
    "identity-linnik": "identity",
    "friable": "friable",
    "correlate": "correlation",
    "main-term": "main_term",
    "sigma-scan": "rows",
    "omega-correlate": "rows",
    "constants": "constant",
}


def schema_for(command: str) -> dict:
    """JSON schema of the document emitted by ``command``."""
    if command not in COMMAND_RESULT:
        raise DomainError(f"unknown command {command!r}")
    return {
        "$schema": "https://json-schema.org/draft/2020-12/schema",
        "$defs": {"scalar": SCALAR_SCHEMA},
        "type": "object",
        "required": ["command", "params", "result"],
        "properties": {
            "command": {"const": command},
            "params": {"type": "object"},
            "result": _RESULTS[COMMAND_RESULT[command]],
        },
        "additionalProperties": False,
    }


def validate(doc: dict) -> None:
    jsonschema.validate(doc, schema_for(doc["command"]))


# --------------------------------------------------------------------------
# CSV


def _flatten(prefix: str, v, out: dict) -> None:
    if isinstance(v, dict):
        if set(v) in ({"re", "im"}, {"num", "den"}):
            for k, sub in v.items():
                out[f"{prefix}.{k}" if prefix else k] = sub
            return
        for k, sub in v.items():
            _flatten(f"{prefix}.{k}" if prefix else str(k), sub, out)
    elif isinstance(v, (list, tuple)) and v and all(not isinstance(t, (dict, list)) for t in v):
        out[prefix] = " ".join(str(t) for t in v)
    elif isinstance(v, (list, tuple)):
        for i, sub in enumerate(v):
            _flatten(f"{prefix}.{i}", sub, out)
    else:
        out[prefix] = v


def _csv_cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return _fmt_float(v)
    return str(v)


def to_csv(doc: dict) -> str:
    """CSV rendering: one row per entry of ``result.rows`` (or a single row).

    Parameters are repeated on every row with a ``param.`` prefix. Sieve
    documents render as ``n,re,im`` or ``n,num,den``.
    """
    result = doc["result"]
    if doc["command"] == "sieve":
        vals = result["values"]
        exact = result["mode"] == "exact"
        header = ["n", "num", "den"] if exact else ["n", "re", "im"]
        rows = []
        for n, s in enumerate(vals):
            if n == 0:
                continue
            a, b = (s["num"], s["den"]) if exact else (s["re"], s["im"])
            rows.append([str(n), _csv_cell(a), _csv_cell(b)])
        return _write_csv(header, rows)
    params = {}
    _flatten("param", doc["params"], params)
    if "rows" in result:
        flat_rows = []
        for r in result["rows"]:
            f = {}
            _flatten("", r, f)
            flat_rows.append({**params, **f})
    else:
        f = {}
        _flatten("", result, f)
        flat_rows = [{**params, **f}]
    header: list[str] = []
    for r in flat_rows:
        for k in r:
            if k not in header:
                header.append(k)
    return _write_csv(header, [[_csv_cell(r.get(k)) for k in header] for r in flat_rows])


def _write_csv(header: list[str], rows: list[list[str]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


# --------------------------------------------------------------------------
# value tables


def table_document(t: ValueTable) -> dict:
    return {
        "limit": t.limit,
        "mode": t.mode,
        "label": t.label,
        "digest": table_digest(t),
        "values": [render_scalar(v) for v in t.values],
    }


def table_digest(t: ValueTable) -> str:
    """SHA-256 of the rendered values, keyed by label and mode."""
    h = hashlib.sha256()
    h.update(t.label.encode())
    h.update(t.mode.encode())
    h.update(_payload(t))
    return h.hexdigest()


def _payload(t: ValueTable) -> bytes:
    if t.mode == "float":
        return np.ascontiguousarray(t.values, dtype="<c16").tobytes()
    parts = []
    for v in t.values:
        f = Fraction(v)
        parts.append(f"{f.numerator}/{f.denominator}")
    return "\n".join(parts).encode()


def save_table(t: ValueTable, path: str) -> None:
    """Write a table as ``MAGIC | u32 header length | JSON header | payload``.

    The JSON header holds the table metadata and the payload SHA-256.
    Float payloads are little-endian complex128; exact payloads are
    newline-separated ``num/den`` strings.
    """
    payload = _payload(t)
    header = {
        "limit": t.limit,
        "mode": t.mode,
        "label": t.label,
        "spec_digest": t.spec.digest().hex() if t.spec is not None else None,
        "sha256": hashlib.sha256(payload).hexdigest(),
    }
    hb = json.dumps(header, sort_keys=True).encode()
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<I", len(hb)))
        fh.write(hb)
        fh.write(payload)


def load_table(path: str) -> ValueTable:
    with open(path, "rb") as fh:
        data = fh.read()
    if not data.startswith(MAGIC):
        raise DomainError(f"{path} is not a value-table file")
    off = len(MAGIC)
    (n,) = struct.unpack_from("<I", data, off)
    off += 4
    header = json.loads(data[off : off + n])
    payload = data[off + n :]
    if hashlib.sha256(payload).hexdigest() != header["sha256"]:
        raise DomainError(f"{path}: payload checksum mismatch")
    limit, mode = header["limit"], header["mode"]
    if mode == "float":
        vals = np.frombuffer(payload, dtype="<c16").astype(np.complex128)
    else:
        vals = np.empty(limit + 1, dtype=object)
        for i, s in enumerate(payload.decode().split("\n")):
            f = Fraction(s)
            vals[i] = f.numerator if f.denominator == 1 else f
    if vals.shape[0] != limit + 1:
        raise DomainError(f"{path}: expected {limit + 1} values, found {vals.shape[0]}")
    return ValueTable(limit, vals, mode, None, header["label"])


def table_csv(t: ValueTable) -> str:
    """``n,re,im`` (float) or ``n,num,den`` (exact) rows for ``n = 1..limit``."""
    exact = t.mode == "exact"
    rows = []
    for n in range(1, t.limit + 1):
        v = t.values[n]
        if exact:
            f = Fraction(v)
            rows.append([str(n), str(f.numerator), str(f.denominator)])
        else:
            c = complex(v)
            rows.append([str(n), _fmt_float(c.real), _fmt_float(c.imag)])
    return _write_csv(["n", "num", "den"] if exact else ["n", "re", "im"], rows)
