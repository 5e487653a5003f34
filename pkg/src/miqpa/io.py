"""JSON instance and solution files.

Rationals are written as ``"p/q"`` strings in lowest terms (``"p"`` when
integral).  On input, integers and unreduced fractions are accepted while
floats are rejected.
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import Any

from .instance import MiqpInstance, Solution
from .rational import Matrix, fmt, rat


class InstanceFormatError(ValueError):
    pass


def _rat(value: Any, where: str):
    try:
        return rat(value)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise InstanceFormatError(f"{where}: {exc}") from None


def _vector(data: Any, length: int, where: str) -> tuple:
    if not isinstance(data, list) or len(data) != length:
        raise InstanceFormatError(f"{where}: expected a list of {length} rationals")
    return tuple(_rat(v, f"{where}[{i}]") for i, v in enumerate(data))


def _matrix(data: Any, ncols: int, where: str, nrows: int | None = None) -> list[tuple]:
    if not isinstance(data, list) or (nrows is not None and len(data) != nrows):
        raise InstanceFormatError(f"{where}: expected {nrows if nrows is not None else 'a list of'} rows")
    return [_vector(row, ncols, f"{where}[{i}]") for i, row in enumerate(data)]


def instance_from_dict(data: dict) -> tuple[MiqpInstance, int | None]:
    """Instance and optional ``psi`` from a decoded JSON object."""
    if not isinstance(data, dict):
        raise InstanceFormatError("instance must be a JSON object")
    for key in ("n", "H", "h", "W", "w"):
        if key not in data:
            raise InstanceFormatError(f"missing field {key!r}")
    n, p = data["n"], data.get("p", 0)
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise InstanceFormatError("n must be a positive integer")
    if not isinstance(p, int) or isinstance(p, bool) or not 0 <= p <= n:
        raise InstanceFormatError("p must be an integer in [0, n]")
    H = _matrix(data["H"], n, "H", n)
    if any(H[i][j] != H[j][i] for i in range(n) for j in range(i)):
        raise InstanceFormatError("H must be symmetric")
    h = _vector(data["h"], n, "h")
    W = _matrix(data["W"], n, "W")
    w = _vector(data["w"], len(W), "w")
    bounds = None
    if data.get("bounds") is not None:
        raw = data["bounds"]
        if not isinstance(raw, list) or len(raw) != n:
            raise InstanceFormatError(f"bounds: expected {n} pairs")
        bounds = tuple(_vector(pair, 2, f"bounds[{i}]") for i, pair in enumerate(raw))
        if any(lo > hi for lo, hi in bounds):
            raise InstanceFormatError("bounds: lower bound exceeds upper bound")
    psi = data.get("psi")
    if psi is not None and (not isinstance(psi, int) or isinstance(psi, bool) or psi < 0):
        raise InstanceFormatError("psi must be a nonnegative integer")
    Wm = Matrix(W, ncols=n) if W else Matrix.zero(0, n)
    return MiqpInstance(Matrix(H, ncols=n), h, Wm, w, p, bounds), psi


def instance_to_dict(inst: MiqpInstance, psi: int | None = None) -> dict:
    out = {
        "n": inst.n,
        "p": inst.p,
        "H": [[fmt(v) for v in row] for row in inst.H.rows],
        "h": [fmt(v) for v in inst.h],
        "W": [[fmt(v) for v in row] for row in inst.W.rows],
        "w": [fmt(v) for v in inst.w],
    }
    if inst.bounds is not None:
        out["bounds"] = [[fmt(lo), fmt(hi)] for lo, hi in inst.bounds]
    if psi is not None:
        out["psi"] = psi
    return out


def load_instance(path: str | Path) -> tuple[MiqpInstance, int | None]:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise InstanceFormatError(f"cannot read instance {path}: {exc}") from None
    return instance_from_dict(data)


def save_instance(inst: MiqpInstance, path: str | Path, psi: int | None = None) -> None:
    Path(path).write_text(json.dumps(instance_to_dict(inst, psi), indent=2) + "\n", encoding="utf-8")


def solution_to_dict(sol: Solution) -> dict:
    return {
        "x": [fmt(v) for v in sol.x],
        "value": fmt(sol.value),
        "provenance": list(sol.provenance),
        "certificates": list(sol.certificates),
    }


def solution_from_dict(data: dict) -> Solution:
    if not isinstance(data, dict) or "x" not in data:
        raise InstanceFormatError("solution must be an object with field 'x'")
    if not isinstance(data["x"], list):
        raise InstanceFormatError("x: expected a list of rationals")
    x = tuple(_rat(v, f"x[{i}]") for i, v in enumerate(data["x"]))
    value = _rat(data["value"], "value") if "value" in data else None
    return Solution(x, value, tuple(data.get("provenance", ())), tuple(data.get("certificates", ())))


def load_solution(path: str | Path) -> Solution:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise InstanceFormatError(f"cannot read solution {path}: {exc}") from None
    return solution_from_dict(data)


def save_solution(sol: Solution, path: str | Path) -> None:
    Path(path).write_text(json.dumps(solution_to_dict(sol), indent=2) + "\n", encoding="utf-8")
