"""Deterministic JSON and CSV writers.

Reports are written with sorted keys and no timestamps, so the same config
and seed give byte-identical files.  Every JSON report carries the config
hash and the library version.
"""
from __future__ import annotations

import csv
import json
import math
from fractions import Fraction
from pathlib import Path

import numpy as np

from .bounds import Bounds

__all__ = ["to_jsonable", "dump_json", "write_json", "write_csv"]


def to_jsonable(v):
    if hasattr(v, "to_json"):
        return to_jsonable(v.to_json())
    if isinstance(v, Bounds):
        return {"lo": to_jsonable(v.lo), "hi": to_jsonable(v.hi)}
    if isinstance(v, dict):
        return {str(k): to_jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [to_jsonable(x) for x in v]
    if isinstance(v, Fraction):
        return str(v) if v.denominator != 1 else v.numerator
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isinf(v) or math.isnan(v):
            return str(v)
        return v
    if isinstance(v, (int, str, bool)) or v is None:
        return v
    return str(v)


def dump_json(payload: dict, config_hash: str, version: str) -> str:
    body = dict(to_jsonable(payload))
    body["config_hash"] = config_hash
    body["version"] = version
    return json.dumps(body, sort_keys=True, indent=2) + "\n"


def write_json(path, payload: dict, config_hash: str, version: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dump_json(payload, config_hash, version))
    return path


def write_csv(path, rows) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        for row in rows:
            w.writerow(row)
    return path
