"""YAML experiment configs.

A config has exactly one ``system`` block, an optional ``weights`` block, a
``command`` block and an optional ``output`` block.  Numbers may be written
as exact rational strings (``"1/3"``), integers, or floats (taken as their
exact binary value).  See README for the schema.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Optional

import yaml

from .bounds import to_exact
from .gallery import GALLERY_IDS, gallery_by_id
from .measures import AtomicMeasure, ConstantWeights, IfsMeasure, LinearWeights, SoftmaxWeights
from .sponge import SpongeMeasure, SpongeSpec, parse_digit, reference_carpet
from .systems import (IfsSpec, SeparationCertificate, cantor_system, check_ssc, declare_osc,
                      moebius_system, similarity_system)

__all__ = ["ConfigError", "ExperimentConfig", "load_config", "parse_config", "COMMANDS"]

COMMANDS = ("formula", "estimate", "scan", "ruelle", "sponge", "gallery")
SYSTEM_KINDS = ("cantor", "similarity", "moebius", "sponge", "reference_carpet", "gallery", "atomic")


class ConfigError(ValueError):
    """Schema violation; maps to exit code 2."""


@dataclass
class ExperimentConfig:
    raw: dict
    system_kind: str
    measure: Any
    ifs: Optional[IfsSpec]
    sponge: Optional[SpongeSpec]
    weights: Any
    command: str
    params: dict
    output: dict = field(default_factory=dict)

    @property
    def hash(self) -> str:
        blob = json.dumps(self.raw, sort_keys=True, separators=(",", ":"), default=str)
        return hashlib.sha256(blob.encode()).hexdigest()


def _num(v, where):
    try:
        out = to_exact(v)
    except (TypeError, ValueError, ZeroDivisionError):
        raise ConfigError(f"{where}: not a number: {v!r}") from None
    if not isinstance(out, (Fraction, float)):
        raise ConfigError(f"{where}: not a number: {v!r}")
    return Fraction(out) if isinstance(out, float) else out


def _nums(v, where, length=None):
    if not isinstance(v, (list, tuple)):
        raise ConfigError(f"{where}: expected a list")
    out = [_num(x, f"{where}[{i}]") for i, x in enumerate(v)]
    if length is not None and len(out) != length:
        raise ConfigError(f"{where}: expected {length} entries, got {len(out)}")
    return out


def _block(raw, key, required=True) -> dict:
    b = raw.get(key)
    if b is None:
        if required:
            raise ConfigError(f"missing '{key}' block")
        return {}
    if not isinstance(b, dict):
        raise ConfigError(f"'{key}' must be a mapping")
    return b


def _separation(ifs: IfsSpec, mode: str) -> IfsSpec:
    if mode == "osc":
        return declare_osc(ifs)
    if mode == "none":
        return ifs.with_separation(None)
    if mode not in ("auto", "ssc"):
        raise ConfigError(f"system.separation: unknown mode {mode!r}")
    # an uncertified system is kept; formula ops refuse without a certificate
    cert = check_ssc(ifs)
    return ifs.with_separation(cert) if isinstance(cert, SeparationCertificate) else ifs


def _build_ifs(sys_: dict) -> IfsSpec:
    kind = sys_["kind"]
    sep = str(sys_.get("separation", "auto")).lower()
    try:
        if kind == "cantor":
            ifs = cantor_system()
            return ifs if sep in ("auto", "ssc") else _separation(ifs, sep)
        hull = tuple(_nums(sys_.get("hull", [0, 1]), "system.hull", 2))
        if kind == "similarity":
            ratios = _nums(sys_.get("ratios"), "system.ratios")
            trans = _nums(sys_.get("translations"), "system.translations", len(ratios))
            signs = sys_.get("signs")
            if signs is not None and (len(signs) != len(ratios) or any(s not in (1, -1) for s in signs)):
                raise ConfigError("system.signs: one of +1/-1 per map")
            ifs = similarity_system(ratios, trans, signs, hull, certify=False)
        else:
            maps = sys_.get("maps")
            if not isinstance(maps, list) or not maps:
                raise ConfigError("system.maps: list of [a, b, c, d]")
            coeffs = [_nums(m, f"system.maps[{i}]", 4) for i, m in enumerate(maps)]
            ifs = moebius_system(coeffs, hull, certify=False)
    except ConfigError:
        raise
    except (ValueError, TypeError) as e:
        raise ConfigError(f"system: {e}") from None
    return _separation(ifs, sep)


def _build_weights(w: dict, n: int):
    if not w:
        return ConstantWeights(tuple(Fraction(1, n) for _ in range(n)))
    kind = w.get("kind", "constant")
    try:
        if kind == "constant":
            return ConstantWeights(tuple(_nums(w.get("p"), "weights.p", n)))
        if kind == "linear":
            return LinearWeights(tuple(_nums(w.get("a"), "weights.a", n)),
                                 tuple(_nums(w.get("b"), "weights.b", n)))
        if kind == "softmax":
            return SoftmaxWeights(tuple(float(v) for v in _nums(w.get("c"), "weights.c", n)),
                                  tuple(float(v) for v in _nums(w.get("d"), "weights.d", n)))
    except ConfigError:
        raise
    except (ValueError, TypeError) as e:
        raise ConfigError(f"weights: {e}") from None
    raise ConfigError(f"weights.kind: unknown {kind!r}")


def _build_sponge(sys_: dict) -> SpongeSpec:
    if sys_["kind"] == "reference_carpet":
        return reference_carpet()
    try:
        digits = [parse_digit(d) if isinstance(d, str) else tuple(d) for d in sys_.get("digits", [])]
        probs = _nums(sys_.get("probs"), "system.probs", len(digits))
        return SpongeSpec(tuple(sys_.get("bases", ())), tuple(digits), tuple(probs))
    except ConfigError:
        raise
    except (ValueError, TypeError) as e:
        raise ConfigError(f"system: {e}") from None


def parse_config(raw: dict, base_dir: Path = Path(".")) -> ExperimentConfig:
    if not isinstance(raw, dict):
        raise ConfigError("config must be a mapping")
    extra = set(raw) - {"system", "weights", "command", "output"}
    if extra:
        raise ConfigError(f"unknown top-level keys: {sorted(extra)}")
    sys_ = _block(raw, "system")
    kind = sys_.get("kind")
    if kind not in SYSTEM_KINDS:
        raise ConfigError(f"system.kind must be one of {SYSTEM_KINDS}")
    cmd = _block(raw, "command")
    name = cmd.get("name")
    if name not in COMMANDS:
        raise ConfigError(f"command.name must be one of {COMMANDS}")
    params = {k: v for k, v in cmd.items() if k != "name"}
    wblock = _block(raw, "weights", required=False)
    ifs = sponge = weights = None
    if kind in ("cantor", "similarity", "moebius"):
        ifs = _build_ifs(sys_)
        weights = _build_weights(wblock, ifs.size)
        try:
            measure = IfsMeasure(ifs, weights, name=sys_.get("name", kind))
        except ValueError as e:
            raise ConfigError(f"weights: {e}") from None
    elif kind in ("sponge", "reference_carpet"):
        sponge = _build_sponge(sys_)
        measure = SpongeMeasure(sponge)
    elif kind == "gallery":
        gid = sys_.get("id")
        if gid not in GALLERY_IDS:
            raise ConfigError(f"system.id must be one of {sorted(GALLERY_IDS)}")
        gp = sys_.get("params", {}) or {}
        if not isinstance(gp, dict) or any(not isinstance(v, int) for v in gp.values()):
            raise ConfigError("system.params: integer keyword parameters")
        try:
            measure = gallery_by_id(gid, **gp)
        except TypeError as e:
            raise ConfigError(f"system.params: {e}") from None
    else:
        try:
            if "csv" in sys_:
                measure = AtomicMeasure.from_csv(base_dir / sys_["csv"])
            else:
                measure = AtomicMeasure([tuple(a) for a in sys_.get("atoms", [])])
        except (ValueError, TypeError, IndexError, OSError) as e:
            raise ConfigError(f"system: {e}") from None
    if wblock and ifs is None:
        raise ConfigError("weights apply only to 1-d IFS systems")
    _check_params(name, kind, params)
    return ExperimentConfig(raw, kind, measure, ifs, sponge, weights, name, params,
                            _block(raw, "output", required=False))


_INT_RANGES = {
    "depth": (1, 64), "min_gap": (1, 63), "max_period": (1, 16), "start": (0, 63),
    "window": (1, 32), "guard_depth": (4, 40), "guard_start": (0, 39), "samples": (1, 10_000),
    "levels": (0, 6), "centers": (0, 1000), "max_iter": (1, 1_000_000), "grid": (5, 1 << 20),
    "count": (1, 10 ** 8), "burn_in": (0, 10 ** 6), "cylinder_depth": (0, 12),
    "max_n": (1, 4096), "max_k": (1, 200), "sample_length": (8, 200),
}


def _check_params(name, kind, params):
    for k, v in params.items():
        if k in _INT_RANGES:
            lo, hi = _INT_RANGES[k]
            if not isinstance(v, int) or isinstance(v, bool) or not lo <= v <= hi:
                raise ConfigError(f"command.{k} must be an integer in [{lo}, {hi}]")
    for k in ("tol", "threshold", "tail"):
        if k in params:
            v = params[k]
            if not isinstance(v, (int, float)) or isinstance(v, bool) or v <= 0:
                raise ConfigError(f"command.{k} must be a positive number")
    if name == "estimate" and "points" not in params:
        if "samples" not in params:
            raise ConfigError("command.estimate needs 'points' or 'samples'")
        if "seed" not in params:
            raise ConfigError("a seed is mandatory when sampling points")
    if name == "ruelle" and params.get("chaos") and "seed" not in params:
        raise ConfigError("a seed is mandatory for chaos-game sampling")
    if "seed" in params and (not isinstance(params["seed"], int) or params["seed"] < 0):
        raise ConfigError("command.seed must be a nonnegative integer")
    if "scale_base" in params and params["scale_base"] != "natural":
        b = _num(params["scale_base"], "command.scale_base")
        if isinstance(b, float) or b <= 1:
            raise ConfigError("command.scale_base must be 'natural' or a rational > 1")
    if "points" in params:
        _nums(params["points"], "command.points")
    if name in ("formula",) and kind in ("gallery", "atomic"):
        raise ConfigError("formula needs an IFS or sponge system")
    if name in ("ruelle",) and kind not in ("cantor", "similarity", "moebius"):
        raise ConfigError("ruelle needs a 1-d IFS system")
    if name == "sponge" and kind not in ("sponge", "reference_carpet"):
        raise ConfigError("the sponge command needs a sponge system")
    if name == "gallery" and kind != "gallery":
        raise ConfigError("the gallery command needs a gallery system")


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise ConfigError(f"cannot read config: {e}") from None
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as e:
        raise ConfigError(f"invalid YAML: {e}") from None
    return parse_config(raw, path.parent)
