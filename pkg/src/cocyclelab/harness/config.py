"""Experiment configuration: loading, schema validation, overrides.

Configs are JSON files (the schema ships with the package); the CLI can
patch individual keys with ``--set dotted.path=value``.  The resolved
config, with every default filled in, is echoed into the run manifest.
"""

from __future__ import annotations

import json
import math
from importlib import resources
from pathlib import Path

import jsonschema

from ..cocycle import CocycleParams, TrigPotential
from ..errors import DomainError

__all__ = ["ConfigError", "load_config", "apply_overrides", "resolve",
           "build_params"]


class ConfigError(ValueError):
    """Invalid or unusable experiment configuration (CLI exit code 2)."""


_DEFAULTS = {
    "potential": {"coupling": 4.0, "coefficients": [[1, 0.5, 0.0]],
                  "width": 0.5},
    "omega": {"mode": "quadratic", "value": "sqrt2"},
    "params": {},
    "seed": 0,
    "workers": 1,
    "tolerances": {},
}


def _schema() -> dict:
    with resources.files("cocyclelab.harness").joinpath("schema.json").open() as fh:
        return json.load(fh)


def load_config(path: str | Path) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as err:
        raise ConfigError(f"cannot read config {path}: {err}") from err


def apply_overrides(cfg: dict, overrides: list[str]) -> dict:
    """Apply --set dotted.path=value pairs; values are parsed as JSON when
    possible, else taken as strings."""
    out = json.loads(json.dumps(cfg))  # deep copy
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"override {item!r} is not key=value")
        key, _, raw = item.partition("=")
        try:
            value = json.loads(raw)
        except json.JSONDecodeError:
            value = raw
        node = out
        parts = key.split(".")
        for p in parts[:-1]:
            node = node.setdefault(p, {})
            if not isinstance(node, dict):
                raise ConfigError(f"override path {key!r} hits a non-object")
        node[parts[-1]] = value
    return out


def resolve(cfg: dict) -> dict:
    """Validate against the schema and fill defaults."""
    merged = json.loads(json.dumps(_DEFAULTS))
    merged.update(cfg)
    for key in ("potential", "omega"):
        base = json.loads(json.dumps(_DEFAULTS[key]))
        base.update(cfg.get(key, {}))
        merged[key] = base
    try:
        jsonschema.validate(merged, _schema())
    except jsonschema.ValidationError as err:
        raise ConfigError(f"config schema violation: {err.message}") from err
    return merged


def _omega_value(spec: dict):
    mode, value = spec["mode"], spec["value"]
    if mode == "float":
        if not isinstance(value, (int, float)):
            raise ConfigError("float omega needs a numeric value")
        return float(value) % 1.0, None
    if mode == "rational":
        if not (isinstance(value, list) and len(value) == 2):
            raise ConfigError("rational omega needs [p, q]")
        p, q = int(value[0]), int(value[1])
        return (p % q) / q, (p, q)
    if mode == "quadratic":
        tags = {"sqrt2": math.sqrt(2.0) % 1.0,
                "golden": (math.sqrt(5.0) - 1.0) / 2.0}
        if value not in tags:
            raise ConfigError(f"unknown quadratic tag {value!r}")
        return tags[value], None
    raise ConfigError(f"unknown omega mode {mode!r}")


def build_params(resolved: dict, energy: complex = 0.0) -> CocycleParams:
    """Construct CocycleParams from the resolved config."""
    pspec = resolved["potential"]
    coeffs = {int(k): complex(re, im) for k, re, im in pspec["coefficients"]}
    degree = max((abs(k) for k in coeffs), default=1)
    try:
        pot = TrigPotential(coupling=float(pspec["coupling"]), coeffs=coeffs,
                            degree=degree, width=float(pspec["width"]))
    except DomainError as err:
        raise ConfigError(str(err)) from err
    omega, pq = _omega_value(resolved["omega"])
    if pq is not None:
        return CocycleParams.rational(pot, pq[0], pq[1], energy=energy)
    return CocycleParams(potential=pot, omega=omega, energy=energy)
