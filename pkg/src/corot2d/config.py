"""`key = value` run configuration.

The grammar is deliberately plain: UTF-8 lines, `#` starts a comment,
one `key = value` per line.  Unknown keys are rejected.  Only the grid
size and the regime have no defaults; `epsilon` is required whenever the
regime is regularized and must be absent (or 0) for `regime = none`.
"""

from __future__ import annotations

import math
from pathlib import Path

from .dynamics import Regularization
from .stepping import SimConfig


class ConfigError(ValueError):
    """Malformed, unknown or missing configuration entries."""


_BOOL = {"true": True, "on": True, "yes": True, "1": True,
         "false": False, "off": False, "no": False, "0": False}

_REGIMES = ("none", "timederiv", "diffusive")

DEFAULTS = {
    "l1": 2.0 * math.pi,
    "l2": 2.0 * math.pi,
    "dt": 1e-3,
    "t_final": 1.0,
    "cfl_safety": 1.0,
    "dealias": True,
    "diag_every": 1,
    "seed": 0,
    "forcing": False,
    "explicit_diffusion": False,
    "amp_v": 0.5,
    "amp_s": 0.5,
    "decay": 3.0,
    "trace_free": True,
    "snapshot_final": False,
    "freeze_velocity": False,
}

_INT_KEYS = {"n", "n2", "diag_every", "seed"}
_FLOAT_KEYS = {"l1", "l2", "dt", "t_final", "cfl_safety", "epsilon",
               "amp_v", "amp_s", "decay"}
_BOOL_KEYS = {"dealias", "forcing", "explicit_diffusion", "trace_free",
              "snapshot_final", "freeze_velocity"}
_ALL_KEYS = _INT_KEYS | _FLOAT_KEYS | _BOOL_KEYS | {"regime"}


def _convert(key: str, raw: str, lineno: int):
    try:
        if key in _INT_KEYS:
            return int(raw)
        if key in _FLOAT_KEYS:
            return float(raw)
        if key in _BOOL_KEYS:
            return _BOOL[raw.lower()]
    except (ValueError, KeyError):
        raise ConfigError(f"line {lineno}: bad value {raw!r} for key {key!r}") from None
    if key == "regime":
        if raw not in _REGIMES:
            raise ConfigError(f"line {lineno}: regime must be one of {', '.join(_REGIMES)}")
        return raw
    raise AssertionError(key)


def parse_config(text: str, overrides: dict | None = None) -> SimConfig:
    """Parse config text (optionally merging CLI overrides) to a SimConfig."""
    values: dict = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line.strip()!r}")
        key, _, raw = stripped.partition("=")
        key, raw = key.strip(), raw.strip()
        if key not in _ALL_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if not raw:
            raise ConfigError(f"line {lineno}: empty value for key {key!r}")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        values[key] = _convert(key, raw, lineno)

    for key, val in (overrides or {}).items():
        if val is None:
            continue
        if key not in _ALL_KEYS:
            raise ConfigError(f"unknown override {key!r}")
        values[key] = val

    for required in ("n", "regime"):
        if required not in values:
            raise ConfigError(f"missing required key {required!r}")

    regime = values["regime"]
    eps = values.get("epsilon")
    if regime == "none":
        if eps not in (None, 0.0):
            raise ConfigError("epsilon must be omitted (or 0) when regime = none")
        reg = Regularization.none()
    else:
        if eps is None:
            raise ConfigError(f"regime = {regime} requires epsilon")
        if not eps > 0:
            raise ConfigError("epsilon must be > 0")
        reg = (Regularization.time_derivative(eps) if regime == "timederiv"
               else Regularization.diffusive(eps))

    merged = dict(DEFAULTS)
    merged.update({k: v for k, v in values.items() if k not in ("n", "n2", "regime", "epsilon")})
    try:
        return SimConfig(n1=values["n"], n2=values.get("n2", values["n"]), reg=reg, **merged)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def load_config(path: str | Path, overrides: dict | None = None) -> SimConfig:
    return parse_config(Path(path).read_text(encoding="utf-8"), overrides)


def config_dict(config: SimConfig) -> dict:
    """Flat, JSON-friendly echo of a SimConfig (for manifests)."""
    out = {
        "n": config.n1, "n2": config.n2, "l1": config.l1, "l2": config.l2,
        "regime": config.reg.kind, "epsilon": config.reg.eps,
        "dt": config.dt, "t_final": config.t_final, "cfl_safety": config.cfl_safety,
        "dealias": config.dealias, "diag_every": config.diag_every, "seed": config.seed,
        "forcing": config.forcing, "explicit_diffusion": config.explicit_diffusion,
        "amp_v": config.amp_v, "amp_s": config.amp_s, "decay": config.decay,
        "trace_free": config.trace_free, "snapshot_final": config.snapshot_final,
    }
    return out
