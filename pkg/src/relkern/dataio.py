"""
CSV ingestion and JSON model files.

CSV inputs carry a header row. Column groups are named by prefix and
numbered from 1:

* points          ``x_1..x_d``
* point values    ``x_1..x_d, v_1..v_m``
* differences     ``x_1..x_d, y_1..y_d, d_1..d_m``

Value columns accept plain reals or complex strings such as ``1.5-2i``.
Complex numbers in JSON are written as plain floats when real and as
``[re, im]`` pairs otherwise.
"""

import csv
import json
import re

import numpy as np

from .core import complex_to_json, parse_complex
from .kernels import KernelSpec, build_kernel
from .relative import RelativeElement
from .rkhs import RkhsElement, SolveInfo

_COLUMN = re.compile(r"^([a-z]+)_(\d+)$")


class InputError(ValueError):
    """Malformed or missing input data."""


def _read_table(path):
    try:
        with open(path, newline="") as fh:
            rows = [r for r in csv.reader(fh) if any(cell.strip() for cell in r)]
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror or exc}") from exc
    if not rows:
        raise InputError(f"{path}: empty file (a header row is required)")
    header = [h.strip() for h in rows[0]]
    body = rows[1:]
    if not body:
        raise InputError(f"{path}: no data rows")
    for i, row in enumerate(body, start=2):
        if len(row) != len(header):
            raise InputError(f"{path}:{i}: expected {len(header)} fields, got {len(row)}")
    return header, body


def _groups(path, header, prefixes):
    found = {p: {} for p in prefixes}
    for col, name in enumerate(header):
        match = _COLUMN.match(name)
        if not match or match.group(1) not in found:
            raise InputError(f"{path}: unexpected column {name!r}")
        found[match.group(1)][int(match.group(2))] = col
    out = {}
    for prefix, cols in found.items():
        if not cols or sorted(cols) != list(range(1, len(cols) + 1)):
            raise InputError(f"{path}: columns {prefix}_1..{prefix}_k missing or not contiguous")
        out[prefix] = [cols[i] for i in range(1, len(cols) + 1)]
    return out


def _block(path, body, cols, kind):
    try:
        values = [[parse_complex(row[c]) for c in cols] for row in body]
    except ValueError as exc:
        raise InputError(f"{path}: bad numeric field ({exc})") from exc
    arr = np.array(values, dtype=complex)
    if not np.all(np.isfinite(arr)):
        raise InputError(f"{path}: non-finite values")
    if kind == "real":
        if np.any(arr.imag != 0):
            raise InputError(f"{path}: point coordinates must be real")
        return arr.real.copy()
    return arr


def read_points_csv(path):
    header, body = _read_table(path)
    g = _groups(path, header, ("x",))
    return _block(path, body, g["x"], "real")


def read_values_csv(path):
    header, body = _read_table(path)
    g = _groups(path, header, ("x", "v"))
    return _block(path, body, g["x"], "real"), _block(path, body, g["v"], "complex")


def read_differences_csv(path):
    header, body = _read_table(path)
    g = _groups(path, header, ("x", "y", "d"))
    if len(g["x"]) != len(g["y"]):
        raise InputError(f"{path}: x and y columns differ in number")
    return (
        _block(path, body, g["x"], "real"),
        _block(path, body, g["y"], "real"),
        _block(path, body, g["d"], "complex"),
    )


def read_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror or exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc})") from exc


def read_kernel_spec(path):
    try:
        return KernelSpec.from_dict(read_json(path))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, InputError):
            raise
        raise InputError(f"{path}: invalid kernel spec ({exc})") from exc


def dumps(obj):
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def vectors_to_json(arr):
    return [[complex_to_json(v) for v in row] for row in np.atleast_2d(arr)]


def _info_dict(info):
    if info is None:
        return None
    return {
        "method": info.method,
        "condition": info.condition if np.isfinite(info.condition) else None,
        "smallest_singular_value": info.smallest_singular_value,
        "residual": info.residual,
        "system_residual": info.system_residual,
    }


def value_model(f, ridge):
    return {
        "kind": "values",
        "kernel_spec": f.kernel.spec.to_dict(),
        "centers": f.centers.tolist(),
        "coefficients": vectors_to_json(f.coefficients),
        "ridge": ridge,
        "residual": f.info.residual if f.info else 0.0,
        "solve": _info_dict(f.info),
    }


def difference_model(g, ridge):
    return {
        "kind": "differences",
        "kernel_spec": g.kernel.spec.to_dict(),
        "pairs": [[x, y] for x, y in zip(g.xs.tolist(), g.ys.tolist())],
        "coefficients": vectors_to_json(g.coefficients),
        "offset": [complex_to_json(v) for v in g.offset],
        "gauge": g.gauge,
        "ridge": ridge,
        "residual": g.info.residual if g.info else 0.0,
        "solve": _info_dict(g.info),
    }


def _parse_vectors(rows):
    return np.array([[parse_complex(v) for v in row] for row in rows], dtype=complex)


def load_model(data):
    """Rebuild an :class:`RkhsElement` or :class:`RelativeElement` from model JSON."""
    try:
        K = build_kernel(KernelSpec.from_dict(data["kernel_spec"]))
        C = _parse_vectors(data["coefficients"]).reshape(-1, K.m)
        info = None
        if data.get("solve"):
            s = data["solve"]
            cond = s["condition"] if s["condition"] is not None else float("inf")
            info = SolveInfo(
                s["method"], cond, s["smallest_singular_value"], s["residual"], s["system_residual"]
            )
        if data["kind"] == "values":
            return RkhsElement(K, np.array(data["centers"], dtype=float), C, info)
        if data["kind"] == "differences":
            pairs = np.array(data["pairs"], dtype=float)
            offset = [parse_complex(v) for v in data.get("offset", [0.0] * K.m)]
            return RelativeElement(K, pairs[:, 0], pairs[:, 1], C, offset=offset, info=info)
        raise InputError(f"unknown model kind {data['kind']!r}")
    except (KeyError, TypeError, IndexError, ValueError) as exc:
        if isinstance(exc, InputError):
            raise
        raise InputError(f"invalid model file ({exc})") from exc
