"""JSON input files and report serialisation."""

from __future__ import annotations

import hashlib
import json
import math
import os
from pathlib import Path

import numpy as np

from .annealing import Landscape, make_landscape
from .errors import ValidationError
from .graph_core import Graph, Potential, build_graph, make_potential

REPORT_FORMAT = "gt-report/1"
DIGITS_ENV = "GT_REPORT_DIGITS"


def read_input(path) -> tuple[dict, str]:
    """Parse a JSON input file; returns the object and the sha256 of its bytes."""
    raw = Path(path).read_bytes()
    try:
        obj = json.loads(raw.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ValidationError(f"cannot parse {path}: {exc}") from None
    if not isinstance(obj, dict):
        raise ValidationError(f"{path}: top-level JSON value must be an object")
    return obj, hashlib.sha256(raw).hexdigest()


def _lists(obj: dict, path) -> tuple[list, list]:
    try:
        verts, edges = obj["vertices"], obj["edges"]
    except KeyError as exc:
        raise ValidationError(f"{path}: missing key {exc.args[0]!r}") from None
    if not isinstance(verts, list) or not isinstance(edges, list):
        raise ValidationError(f"{path}: 'vertices' and 'edges' must be lists")
    if not all(isinstance(v, str) for v in verts):
        raise ValidationError(f"{path}: vertex labels must be strings")
    return verts, edges


def graph_from_dict(obj: dict, path="<graph>") -> tuple[Graph, Potential]:
    verts, edges = _lists(obj, path)
    g = build_graph(verts, edges)
    pot = obj.get("potential")
    if not isinstance(pot, dict):
        raise ValidationError(f"{path}: 'potential' must be an object mapping vertex -> number")
    for x, val in pot.items():
        if isinstance(val, bool) or not isinstance(val, (int, float)):
            raise ValidationError(f"{path}: potential of {x!r} is not a number")
    return g, make_potential(g, pot)


def landscape_from_dict(obj: dict, path="<landscape>") -> Landscape:
    verts, edges = _lists(obj, path)
    energy = obj.get("energy")
    if not isinstance(energy, dict):
        raise ValidationError(f"{path}: 'energy' must be an object mapping vertex -> integer")
    return make_landscape(verts, edges, energy)


def to_jsonable(x, digits: int | None = None):
    """Convert numpy values and non-finite floats (-> ``None``) for JSON output."""
    if isinstance(x, dict):
        return {str(k): to_jsonable(v, digits) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [to_jsonable(v, digits) for v in x]
    if isinstance(x, np.ndarray):
        return to_jsonable(x.tolist(), digits)
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if not math.isfinite(x):
            return None
        if digits is not None and x != 0.0:
            x = float(f"{x:.{digits}g}")
        return x
    return x


def report_digits() -> int | None:
    val = os.environ.get(DIGITS_ENV)
    if not val:
        return None
    try:
        d = int(val)
    except ValueError:
        raise ValidationError(f"{DIGITS_ENV} must be an integer, got {val!r}") from None
    if not 1 <= d <= 17:
        raise ValidationError(f"{DIGITS_ENV} must be in 1..17")
    return d


def dump_report(report: dict) -> str:
    return json.dumps(to_jsonable(report, report_digits()), indent=2, allow_nan=False) + "\n"
