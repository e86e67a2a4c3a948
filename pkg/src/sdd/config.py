"""Run configuration: a single JSON document validated against a schema."""

from __future__ import annotations

import copy
import hashlib
import json

import jsonschema

_MEASURE = {
    "type": "object",
    "properties": {
        "family": {"enum": ["uniform", "truncated_gaussian", "beta"]},
        "support": {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2},
        "params": {"type": "object", "additionalProperties": {"type": "number"}},
    },
    "required": ["family", "support"],
    "additionalProperties": False,
}

_KNOTS = {
    "type": "object",
    "properties": {
        "p": {"type": "integer", "minimum": 0},
        "elements": {"type": "integer", "minimum": 1},
        "repeat_center": {"type": "boolean"},
        "knots": {"type": "array", "items": {"type": "number"}},
    },
    "required": ["p"],
    "additionalProperties": False,
}

_COORDINATE = {
    "type": "object",
    "properties": {"measure": _MEASURE, "knots": _KNOTS},
    "required": ["knots"],
    "additionalProperties": False,
}

SCHEMA = {
    "type": "object",
    "properties": {
        "benchmark": {
            "oneOf": [
                {"type": "string"},
                {
                    "type": "object",
                    "properties": {"name": {"type": "string"}, "params": {"type": "object"}},
                    "required": ["name"],
                    "additionalProperties": False,
                },
            ]
        },
        "samples": {
            "type": "object",
            "properties": {"path": {"type": "string"}},
            "required": ["path"],
            "additionalProperties": False,
        },
        "coordinates": {
            "oneOf": [_COORDINATE, {"type": "array", "items": _COORDINATE, "minItems": 1}]
        },
        "method": {"enum": ["sdd", "pdd", "pce"]},
        "S": {"type": "integer", "minimum": 1},
        "fitting": {
            "oneOf": [
                {
                    "type": "object",
                    "properties": {
                        "kind": {"const": "quadrature"},
                        "points_per_element": {"type": "integer", "minimum": 1},
                        "tol": {"type": ["number", "null"], "exclusiveMinimum": 0},
                    },
                    "required": ["kind"],
                    "additionalProperties": False,
                },
                {
                    "type": "object",
                    "properties": {
                        "kind": {"const": "regression"},
                        "samples": {"type": "integer", "minimum": 1},
                        "seed": {"type": "integer", "minimum": 0},
                        "ridge": {"type": "number", "minimum": 0},
                        "min_ratio": {"type": "number", "minimum": 1},
                    },
                    "required": ["kind"],
                    "additionalProperties": False,
                },
            ]
        },
        "outputs": {
            "type": "object",
            "properties": {
                k: {"type": "boolean"}
                for k in ("expansion", "coefficients", "statistics", "variance_decomposition", "cdf")
            },
            "additionalProperties": False,
        },
        "mcs": {
            "type": "object",
            "properties": {
                "count": {"type": "integer", "minimum": 1},
                "seed": {"type": "integer", "minimum": 0},
            },
            "additionalProperties": False,
        },
    },
    "required": ["coordinates", "fitting"],
    "additionalProperties": False,
}

DEFAULT_OUTPUTS = {
    "expansion": True,
    "coefficients": True,
    "statistics": True,
    "variance_decomposition": True,
    "cdf": False,
}


class ConfigError(ValueError):
    pass


def validate(raw):
    """Schema check plus cross-field rules; returns a normalized deep copy."""
    try:
        jsonschema.validate(raw, SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"{where}: {exc.message}") from None
    cfg = copy.deepcopy(raw)
    if ("benchmark" in cfg) == ("samples" in cfg):
        raise ConfigError("give exactly one of 'benchmark' or 'samples'")
    if "samples" in cfg and cfg["fitting"]["kind"] != "regression":
        raise ConfigError("external samples can only be fitted by regression")
    if "samples" in cfg and {"samples", "seed"} & set(cfg["fitting"]):
        raise ConfigError("fitting.samples and fitting.seed do not apply to external samples")
    cfg.setdefault("method", "sdd")
    if cfg["method"] != "pce" and "S" not in cfg:
        raise ConfigError(f"method {cfg['method']} needs a truncation S")
    if cfg["method"] == "pce" and "S" in cfg:
        raise ConfigError("pce always uses S = N; remove S")
    cfg["outputs"] = {**DEFAULT_OUTPUTS, **cfg.get("outputs", {})}
    cfg.setdefault("mcs", {})
    cfg["mcs"].setdefault("count", 100_000)
    cfg["mcs"].setdefault("seed", 0)
    if cfg["fitting"]["kind"] == "regression" and "samples" not in cfg:
        cfg["fitting"].setdefault("seed", 0)
    return cfg


def digest(cfg):
    text = json.dumps(cfg, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode()).hexdigest()
