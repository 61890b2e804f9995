"""Experiment configuration files.

A config is a flat TOML document; every key sits at top level::

    schema = 1
    n_sites = 6
    j_z = 1.5
    beta_bar = 3.0
    subspace = ["010101", "010110", "010100", "010111", "100101"]
    m_values = [2, 3, 4]

``subspace`` may instead name a phase (``"antiferromagnetic"``, ...) to use
the stock list below.  Errors carry the offending line when it can be
located.
"""

from __future__ import annotations

import math
import re
import sys
from dataclasses import dataclass, field
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .ansatz import ComputationalSubspace
from .errors import ConfigError, ContractViolation
from .xxz import XXZConfig

CONFIG_SCHEMA = 1

# Ordered subspace lists per phase of the six-site chain.
PHASE_SUBSPACES = {
    "ferromagnetic": ("000000", "111111", "000001", "111110", "011111", "100000", "001111"),
    "paramagnetic": ("010101", "010111", "010100", "100001", "010110", "011110"),
    "antiferromagnetic": ("010101", "010110", "010100", "010111", "100101"),
}

DEFAULT_BETA_MIN_GRID = tuple(round(0.1 * k, 1) for k in range(1, 201))

# Fields required by each subcommand on top of the common ones.
COMMON_FIELDS = ("schema",)
_MODEL_FIELDS = ("n_sites", "j_z", "beta_bar", "subspace")
COMMAND_FIELDS = {
    "run": _MODEL_FIELDS,
    "m-scan": _MODEL_FIELDS + ("m_values",),
    "beta-extrapolate": _MODEL_FIELDS + ("beta_grid",),
    "tolerance-scan": _MODEL_FIELDS + ("epsilon_values",),
    "scaling-study": ("fidelity_thresholds",),
    "random-restart": _MODEL_FIELDS,
}

_TYPES = {
    "schema": int,
    "n_sites": int,
    "j_z": float,
    "beta_bar": float,
    "subspace": (list, str),
    "m_values": list,
    "epsilon": float,
    "epsilon_values": list,
    "beta_grid": list,
    "fidelity_thresholds": list,
    "seed": int,
    "output_dir": str,
    "max_operators": int,
    "run_initial_mu_opt": bool,
    "restarts": int,
    "restart_scale": float,
    "scaling_n_min": int,
    "scaling_n_max": int,
    "scaling_beta": float,
    "scaling_m": int,
    "scaling_j_z": list,
    "beta_min_grid": list,
}


@dataclass(frozen=True)
class ExperimentConfig:
    model: XXZConfig | None = None
    beta_bar: float | None = None
    subspace: ComputationalSubspace | None = None
    m_values: tuple[int, ...] = ()
    epsilon: float = 1e-6
    epsilon_values: tuple[float, ...] = ()
    beta_grid: tuple[float, ...] = ()
    fidelity_thresholds: tuple[float, ...] = (0.99, 0.999, 0.9999)
    seed: int = 0
    output_dir: str = "results"
    max_operators: int = 200
    run_initial_mu_opt: bool = True
    restarts: int = 2500
    restart_scale: float = math.pi
    scaling_n_min: int = 2
    scaling_n_max: int = 12
    scaling_beta: float = 3.0
    scaling_m: int = 4
    scaling_j_z: tuple[float, ...] = (-1.5, 0.0, 1.5)
    beta_min_grid: tuple[float, ...] = DEFAULT_BETA_MIN_GRID
    source: str = field(default="", compare=False)

    def subspace_for(self, m: int) -> ComputationalSubspace:
        if self.subspace is None:
            raise ConfigError("config has no subspace", field="subspace")
        return self.subspace.head(m)

    @property
    def m_list(self) -> tuple[int, ...]:
        if self.m_values:
            return self.m_values
        return (self.subspace.m,) if self.subspace is not None else ()


def _line_of(text: str, key: str) -> int | None:
    pat = re.compile(rf"^\s*{re.escape(key)}\s*=")
    for lineno, line in enumerate(text.splitlines(), 1):
        if pat.match(line):
            return lineno
    return None


def _check_type(key, value, text):
    expected = _TYPES[key]
    ok = isinstance(value, expected)
    if expected is float and isinstance(value, int) and not isinstance(value, bool):
        ok = True
    if expected is int and isinstance(value, bool):
        ok = False
    if not ok:
        names = expected.__name__ if isinstance(expected, type) else "/".join(t.__name__ for t in expected)
        raise ConfigError(f"field '{key}' must be of type {names}", _line_of(text, key), key)


def _numbers(key, values, text, conv=float) -> tuple:
    try:
        out = tuple(conv(v) for v in values)
    except (TypeError, ValueError):
        raise ConfigError(f"field '{key}' must list numbers", _line_of(text, key), key) from None
    if conv is int and any(isinstance(v, float) for v in values):
        raise ConfigError(f"field '{key}' must list integers", _line_of(text, key), key)
    return out


def parse_config(text: str, command: str | None = None, source: str = "") -> ExperimentConfig:
    """Parse and validate a config document for ``command`` (None: common fields only)."""
    try:
        raw = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        m = re.search(r"line (\d+)", str(exc))
        if m:
            line = int(m.group(1))
        elif "end of document" in str(exc):
            line = max(len(text.splitlines()), 1)
        else:
            line = None
        raise ConfigError(f"malformed config: {exc}", line) from None
    required = COMMON_FIELDS + COMMAND_FIELDS.get(command, ())
    for key in required:
        if key not in raw:
            raise ConfigError(f"missing required field '{key}'", field=key)
    for key, value in raw.items():
        if key not in _TYPES:
            raise ConfigError(f"unknown field '{key}'", _line_of(text, key), key)
        _check_type(key, value, text)
    if raw["schema"] != CONFIG_SCHEMA:
        raise ConfigError(f"unsupported schema {raw['schema']}", _line_of(text, "schema"), "schema")

    def err(key, message):
        return ConfigError(message, _line_of(text, key), key)

    kw: dict = {"source": source}
    if "n_sites" in raw or "j_z" in raw:
        for key in ("n_sites", "j_z"):
            if key not in raw:
                raise ConfigError(f"missing required field '{key}'", field=key)
        try:
            kw["model"] = XXZConfig(raw["n_sites"], float(raw["j_z"]))
        except ContractViolation as exc:
            raise err("n_sites", str(exc)) from None
    if "beta_bar" in raw:
        if not raw["beta_bar"] > 0:
            raise err("beta_bar", "beta_bar must be positive")
        kw["beta_bar"] = float(raw["beta_bar"])
    if "subspace" in raw:
        entry = raw["subspace"]
        if isinstance(entry, str):
            if entry not in PHASE_SUBSPACES:
                raise err("subspace", f"unknown phase subspace {entry!r}")
            entry = PHASE_SUBSPACES[entry]
        try:
            sub = ComputationalSubspace(tuple(entry))
        except ContractViolation as exc:
            raise err("subspace", str(exc)) from None
        if "model" not in kw:
            raise ConfigError("a subspace needs 'n_sites' and 'j_z'", field="n_sites")
        if sub.n_sites != kw["model"].n_sites:
            raise err("subspace", f"subspace labels have {sub.n_sites} bits, expected {kw['model'].n_sites}")
        kw["subspace"] = sub
    if "m_values" in raw:
        ms = _numbers("m_values", raw["m_values"], text, int)
        limit = kw["subspace"].m if "subspace" in kw else None
        if not ms or any(m < 1 or (limit is not None and m > limit) for m in ms):
            raise err("m_values", f"m_values must be non-empty and lie in [1, {limit}]")
        kw["m_values"] = ms
    for key in ("epsilon_values", "beta_grid", "fidelity_thresholds", "scaling_j_z", "beta_min_grid"):
        if key in raw:
            vals = _numbers(key, raw[key], text)
            if not vals:
                raise err(key, f"field '{key}' must not be empty")
            kw[key] = vals
    if any(not 0 < t <= 1 for t in kw.get("fidelity_thresholds", ())):
        raise err("fidelity_thresholds", "thresholds must lie in (0, 1]")
    if any(not e >= 0 for e in kw.get("epsilon_values", ())):
        raise err("epsilon_values", "tolerances must be non-negative")
    if any(not b > 0 for b in kw.get("beta_grid", ()) + kw.get("beta_min_grid", ())):
        raise err("beta_grid", "inverse temperatures must be positive")
    for key in ("epsilon", "seed", "output_dir", "max_operators", "run_initial_mu_opt", "restarts",
                "restart_scale", "scaling_n_min", "scaling_n_max", "scaling_beta", "scaling_m"):
        if key in raw:
            kw[key] = raw[key]
    for key in ("restarts", "scaling_m", "max_operators"):
        if key in kw and kw[key] < 1:
            raise err(key, f"field '{key}' must be positive")
    if kw.get("scaling_n_min", 2) < 2 or kw.get("scaling_n_max", 12) < kw.get("scaling_n_min", 2):
        raise err("scaling_n_min", "need 2 <= scaling_n_min <= scaling_n_max")
    return ExperimentConfig(**kw)


def load_config(path, command: str | None = None) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from None
    return parse_config(text, command, str(path))
