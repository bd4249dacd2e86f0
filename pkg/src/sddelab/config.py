"""Layered run configuration for the command-line tools.

Four sources, lowest to highest precedence: built-in defaults,
environment variables with the ``SDDELAB_`` prefix, a flat ``key=value``
config file, and command-line flags.  Every key is declared per
subcommand; unknown keys in a config file are an error, and so are
``SDDELAB_``-prefixed variables that match no declared key anywhere.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Any, Mapping

from .presets import COEFFICIENT_PRESETS, ETA_PRESETS

ENV_PREFIX = "SDDELAB_"

SCHEMES = ("euler", "picard")
FBM_METHODS = ("exact-cholesky", "circulant")


class ConfigError(ValueError):
    """An unknown key or an inadmissible value in some config source."""


@dataclass(frozen=True)
class Option:
    """One declared key: its value kind, default, and one-line help."""

    kind: str  # "int" | "float" | "str" | "maybe_float"
    default: Any
    help: str = ""


_COMMON = {
    "outdir": Option("str", "sddelab-out", "directory all outputs are written under"),
    "seed": Option("int", 0, "master seed; every stream is derived from it"),
}

_DRIVER = {
    "hurst": Option("float", 0.75, "Hurst index of the driving path"),
    "horizon": Option("float", 1.0, "right endpoint T of the time interval"),
    "n_main": Option("int", 4096, "number of steps on [0, T]"),
    "method": Option("str", "circulant", "fBm sampler: exact-cholesky or circulant"),
}

SCHEMAS: dict[str, dict[str, Option]] = {
    "fbm": {
        **_COMMON,
        **_DRIVER,
        "r": Option("float", 0.0, "history length; the path is 0 on [-r, 0]"),
        "dim": Option("int", 1, "number of independent components"),
    },
    "norms": {
        **_COMMON,
        **_DRIVER,
        "alpha": Option("float", 0.3, "singularity exponent of the norm family"),
        "lam": Option("float", 1.0, "exponential weight of the discounted norm"),
        "delta": Option("float", 1.0, "power inside the increment functional"),
        "r": Option("float", 0.0, "history length of the simulated path"),
        "input": Option("str", "", "path CSV to measure; empty simulates fBm"),
    },
    "integrate": {
        **_COMMON,
        **_DRIVER,
        "alpha": Option("float", 0.3, "exponent used for the bound certificate"),
        "f_input": Option("str", "", "integrand CSV; empty integrates the driver against itself"),
        "g_input": Option("str", "", "driver CSV; empty simulates fBm"),
    },
    "solve": {
        **_COMMON,
        **_DRIVER,
        "alpha": Option("float", 0.3, "exponent the solver contracts in"),
        "r": Option("float", 0.25, "delay of the diffusion argument"),
        "preset": Option("str", "sine", "coefficient preset name"),
        "eta": Option("str", "constant", "initial-segment preset name"),
        "scheme": Option("str", "picard", "euler or picard"),
        "lam": Option("maybe_float", None, "weight of the stopping norm; empty picks one"),
        "picard_tol": Option("float", 1e-8, "stopping tolerance on the weighted residual"),
        "picard_max_iter": Option("int", 50, "iteration cap before giving up"),
    },
    "converge": {
        **_COMMON,
        **_DRIVER,
        "alpha": Option("float", 0.3, "exponent of the distance norm"),
        "preset": Option("str", "sine", "coefficient preset name (pointwise drift only)"),
        "eta": Option("str", "constant", "initial-segment preset name"),
        "n_seeds": Option("int", 100, "independent driver paths in the study"),
        "k_min": Option("int", 2, "largest delay is T * 2^-k_min"),
        "k_max": Option("int", 8, "smallest delay is T * 2^-k_max"),
    },
}

_ALL_KEYS = frozenset(k for schema in SCHEMAS.values() for k in schema)


def _coerce(name: str, opt: Option, raw: Any) -> Any:
    if not isinstance(raw, str):
        return raw
    s = raw.strip()
    try:
        if opt.kind == "int":
            return int(s)
        if opt.kind == "float":
            return float(s)
        if opt.kind == "maybe_float":
            return None if s.lower() in ("", "none") else float(s)
    except ValueError:
        raise ConfigError(f"key {name!r} expects a {opt.kind}, got {raw!r}") from None
    return s


def parse_config_file(path: str) -> dict[str, str]:
    """Read ``key = value`` lines; ``#`` comments and blank lines are skipped."""
    pairs: dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.split("#", 1)[0].strip()
            if not text:
                continue
            if "=" not in text:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {line.strip()!r}")
            key, value = text.split("=", 1)
            key = key.strip()
            if key in pairs:
                raise ConfigError(f"{path}:{lineno}: duplicate key {key!r}")
            pairs[key] = value.strip()
    return pairs


def resolve_config(
    subcommand: str,
    config_file: str | None = None,
    flags: Mapping[str, Any] | None = None,
    environ: Mapping[str, str] | None = None,
) -> dict[str, Any]:
    """Merge the four sources for one subcommand and validate the result."""
    if subcommand not in SCHEMAS:
        raise ConfigError(f"unknown subcommand {subcommand!r}")
    schema = SCHEMAS[subcommand]
    resolved = {name: opt.default for name, opt in schema.items()}

    env = os.environ if environ is None else environ
    for var, raw in env.items():
        if not var.startswith(ENV_PREFIX):
            continue
        name = var[len(ENV_PREFIX):].lower()
        if name in schema:
            resolved[name] = _coerce(name, schema[name], raw)
        elif name not in _ALL_KEYS:
            raise ConfigError(f"environment variable {var} matches no known key")

    if config_file is not None:
        for name, raw in parse_config_file(config_file).items():
            if name not in schema:
                raise ConfigError(
                    f"unknown key {name!r} in {config_file} for subcommand {subcommand!r}"
                )
            resolved[name] = _coerce(name, schema[name], raw)

    for name, raw in (flags or {}).items():
        if raw is None:
            continue
        if name not in schema:
            raise ConfigError(f"unknown flag {name!r} for subcommand {subcommand!r}")
        resolved[name] = _coerce(name, schema[name], raw)

    validate_config(subcommand, resolved)
    return resolved


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise ConfigError(message)


def validate_config(subcommand: str, cfg: Mapping[str, Any]) -> None:
    """Reject inadmissible values; messages state the violated condition."""
    _require(cfg["seed"] >= 0, f"seed must be >= 0, got {cfg['seed']}")
    _require(cfg["horizon"] > 0.0, f"horizon must be > 0, got {cfg['horizon']}")
    _require(cfg["n_main"] >= 2, f"n_main must be >= 2, got {cfg['n_main']}")
    _require(
        0.0 < cfg["hurst"] < 1.0, f"hurst must lie in (0, 1), got {cfg['hurst']}"
    )
    _require(
        cfg["method"] in FBM_METHODS,
        f"method must be one of {FBM_METHODS}, got {cfg['method']!r}",
    )
    if "r" in cfg:
        _require(cfg["r"] >= 0.0, f"r must be >= 0, got {cfg['r']}")
    if "alpha" in cfg:
        alpha, hurst = cfg["alpha"], cfg["hurst"]
        _require(0.0 < alpha < 0.5, f"alpha must lie in (0, 1/2), got {alpha}")
        if not 1.0 - hurst < alpha < 0.5:
            raise ConfigError(
                f"alpha = {alpha:g} is not admissible for hurst = {hurst:g}: "
                f"alpha must lie in the open interval (1 - hurst, 1/2) = "
                f"({1.0 - hurst:g}, 0.5)"
            )
    if "dim" in cfg:
        _require(cfg["dim"] >= 1, f"dim must be >= 1, got {cfg['dim']}")
    if "lam" in cfg and cfg["lam"] is not None:
        _require(cfg["lam"] >= 1.0, f"lam must be >= 1 when given, got {cfg['lam']}")
    if "delta" in cfg:
        _require(
            0.0 < cfg["delta"] <= 1.0, f"delta must lie in (0, 1], got {cfg['delta']}"
        )
    if "picard_tol" in cfg:
        _require(cfg["picard_tol"] > 0.0, f"picard_tol must be > 0, got {cfg['picard_tol']}")
    if "picard_max_iter" in cfg:
        _require(
            cfg["picard_max_iter"] >= 1,
            f"picard_max_iter must be >= 1, got {cfg['picard_max_iter']}",
        )
    if "scheme" in cfg:
        _require(
            cfg["scheme"] in SCHEMES,
            f"scheme must be one of {SCHEMES}, got {cfg['scheme']!r}",
        )
    if "preset" in cfg:
        _require(
            cfg["preset"] in COEFFICIENT_PRESETS,
            f"preset must be one of {tuple(COEFFICIENT_PRESETS)}, got {cfg['preset']!r}",
        )
    if "eta" in cfg:
        _require(
            cfg["eta"] in ETA_PRESETS,
            f"eta must be one of {tuple(ETA_PRESETS)}, got {cfg['eta']!r}",
        )
    if subcommand == "converge":
        _require(cfg["n_seeds"] >= 30, f"n_seeds must be >= 30, got {cfg['n_seeds']}")
        _require(
            1 <= cfg["k_min"] <= cfg["k_max"],
            f"need 1 <= k_min <= k_max, got k_min={cfg['k_min']}, k_max={cfg['k_max']}",
        )
        _require(
            cfg["n_main"] % (1 << cfg["k_max"]) == 0,
            f"n_main = {cfg['n_main']} must be divisible by 2^k_max = {1 << cfg['k_max']} "
            "so every delay is a whole number of steps",
        )
        if COEFFICIENT_PRESETS[cfg["preset"]]().drift_kind != "pointwise":
            raise ConfigError(
                f"preset {cfg['preset']!r} has a path-functional drift; "
                "the delay study only covers pointwise drifts"
            )
