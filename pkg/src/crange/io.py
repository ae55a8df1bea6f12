"""File formats: Matrix JSON and cloud CSV.

Matrix JSON is ``{"n": N, "entries": [[[re, im], ...], ...]}``; floats are
written with 17 significant digits so files round-trip exactly.
"""
from __future__ import annotations

import json

import numpy as np

from .linalg import DimensionError, as_matrix

__all__ = [
    "matrix_to_json",
    "matrix_from_json",
    "dumps_matrix",
    "load_matrix",
    "save_matrix",
    "write_cloud_csv",
    "read_cloud_csv",
    "dumps_json",
]


def _g17(x: float) -> str:
    return format(float(x), ".17g")


def matrix_to_json(a) -> dict:
    a = as_matrix(a)
    return {"n": a.shape[0], "entries": [[[float(z.real), float(z.imag)] for z in row] for row in a]}


def matrix_from_json(obj) -> np.ndarray:
    try:
        n = int(obj["n"])
        ent = np.asarray(obj["entries"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed matrix JSON: {exc}") from exc
    if ent.shape != (n, n, 2):
        raise DimensionError(f"entries have shape {ent.shape}, expected ({n}, {n}, 2)")
    return ent[..., 0] + 1j * ent[..., 1]


def _encode(o, indent, sort_keys, level=0) -> str:
    if isinstance(o, (bool, np.bool_)):
        return "true" if o else "false"
    if o is None:
        return "null"
    if isinstance(o, (int, np.integer)):
        return str(int(o))
    if isinstance(o, (float, np.floating)):
        x = float(o)
        if np.isnan(x) or np.isinf(x):
            return json.dumps(x)
        return _g17(x)
    if isinstance(o, complex):
        return _encode([o.real, o.imag], indent, sort_keys, level)
    if isinstance(o, str):
        return json.dumps(o)
    if isinstance(o, np.ndarray):
        return _encode(o.tolist(), indent, sort_keys, level)
    if isinstance(o, dict):
        keys = sorted(o) if sort_keys else list(o)
        items = [f"{json.dumps(str(k))}: {_encode(o[k], indent, sort_keys, level + 1)}" for k in keys]
        return _join("{", "}", items, indent, level)
    if isinstance(o, (list, tuple)):
        return _join("[", "]", [_encode(x, indent, sort_keys, level + 1) for x in o], indent, level)
    raise TypeError(f"cannot encode {type(o).__name__}")


def _join(lo, hi, items, indent, level) -> str:
    if not items:
        return lo + hi
    if indent is None or all(not s.startswith(("{", "[")) for s in items):
        return lo + ", ".join(items) + hi
    pad = " " * (indent * (level + 1))
    return lo + "\n" + ",\n".join(pad + s for s in items) + "\n" + " " * (indent * level) + hi


def dumps_json(obj, indent: int | None = 2) -> str:
    return _encode(obj, indent, False)


def dumps_matrix(a) -> str:
    return dumps_json(matrix_to_json(a), indent=None)


def load_matrix(path) -> np.ndarray:
    with open(path) as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}: {exc}") from exc
    return matrix_from_json(obj)


def save_matrix(path, a) -> None:
    with open(path, "w") as fh:
        fh.write(dumps_matrix(a) + "\n")


def write_cloud_csv(path, points) -> None:
    pts = np.asarray(getattr(points, "points", points), dtype=complex).ravel()
    with open(path, "w") as fh:
        fh.write("re,im\n")
        fh.writelines(f"{_g17(z.real)},{_g17(z.imag)}\n" for z in pts)


def read_cloud_csv(path) -> np.ndarray:
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return data[:, 0] + 1j * data[:, 1]
