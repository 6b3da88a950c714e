"""Experiment configuration: a single JSON document, resolved against defaults.

Schema (all keys optional; defaults shown by :data:`DEFAULTS`)::

    experiment        "discrete-demo" | "continuum-sweep" | "kuchar" | "validate"
    d, dim_s          clock size, system dimension
    seed              integer seed for every random choice
    hamiltonian       {"kind": "random-hermitian"}
                      {"kind": "diagonal", "levels": [...]}
                      {"kind": "matrix", "entries": [[x, ...], ...]}
    povm              {"kind": "sharp-basis"} | {"kind": "random", "n_outcomes": n}
                      {"kind": "explicit", "effects": [matrix, ...]}
    system_state      {"kind": "random-pure"} | {"kind": "random-mixed"} | {"kind": "basis", "index": i}
    clock_state_index integer c, clock prepared in |c>
    reference_state   {"kind": "fourier", "m": m} | {"kind": "position", "n": n}
    lambda_grid       reference broadening factors (continuum)
    displacement_s    window displacements (continuum)
    profiles          {"f_c": P, "f_r": P, "h": P} with P = {"kind": "gaussian"|"bump", "width": w}
    cross_check       also run the time-domain quadrature (continuum)
    plot              write plot.svg
    debug             {"corrupt_generator": bool}
    output_dir        directory for results.csv, manifest.json, plot.svg

Matrix entries are numbers or ``[re, im]`` pairs. In the discrete model
``random-hermitian`` draws a Hamiltonian whose evolution has period ``d``, and
``diagonal`` levels are used as literal energies.
"""

from __future__ import annotations

import copy
import json
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Any

import numpy as np

from .errors import ConfigError

EXPERIMENTS = ("discrete-demo", "continuum-sweep", "kuchar", "validate")

DEFAULTS: dict[str, Any] = {
    "experiment": "validate",
    "d": 8,
    "dim_s": 2,
    "seed": 0,
    "hamiltonian": {"kind": "random-hermitian"},
    "povm": {"kind": "random", "n_outcomes": 3},
    "system_state": {"kind": "random-pure"},
    "clock_state_index": 0,
    "reference_state": {"kind": "fourier", "m": 0},
    "lambda_grid": [1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0],
    "displacement_s": [0.0, 0.5, 2.0],
    "profiles": {
        "f_c": {"kind": "gaussian", "width": 0.05},
        "f_r": {"kind": "gaussian", "width": 1.0},
        "h": {"kind": "gaussian", "width": 0.1},
    },
    "cross_check": True,
    "plot": True,
    "debug": {"corrupt_generator": False},
    "output_dir": "chronon-out",
}

# continuum experiments default to a two-level system with unit gap
CONTINUUM_HAMILTONIAN = {"kind": "diagonal", "levels": [0.0, 1.0]}


@dataclass
class ExperimentConfig:
    experiment: str
    d: int
    dim_s: int
    seed: int
    hamiltonian: dict
    povm: dict
    system_state: dict
    clock_state_index: int
    reference_state: dict
    lambda_grid: list[float]
    displacement_s: list[float]
    profiles: dict
    cross_check: bool
    plot: bool
    debug: dict
    output_dir: str

    def to_dict(self) -> dict:
        return {f.name: copy.deepcopy(getattr(self, f.name)) for f in fields(self)}


def parse_matrix(value, dim: int | None = None) -> np.ndarray:
    try:
        rows = [[complex(x[0], x[1]) if isinstance(x, (list, tuple)) else complex(x) for x in row] for row in value]
        arr = np.array(rows, dtype=np.complex128)
    except (TypeError, ValueError, IndexError) as exc:
        raise ConfigError(f"cannot parse matrix literal: {exc}") from None
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ConfigError(f"matrix literal must be square, got shape {arr.shape}")
    if dim is not None and arr.shape[0] != dim:
        raise ConfigError(f"matrix literal has dim {arr.shape[0]}, expected {dim}")
    return arr


def _merge(base: dict, override: dict) -> dict:
    out = copy.deepcopy(base)
    for key, val in override.items():
        # kind-tagged blocks are replaced whole, not merged
        if isinstance(val, dict) and isinstance(out.get(key), dict) and key in ("profiles", "debug"):
            out[key] = _merge(out[key], val)
        else:
            out[key] = copy.deepcopy(val)
    return out


def resolve(raw: dict | None = None, **overrides) -> ExperimentConfig:
    """Merge ``raw`` and keyword overrides onto the defaults, then validate.

    Raises
    ------
    ConfigError
        On unknown experiments, inconsistent dimensions or malformed entries.
    """
    raw = dict(raw or {})
    if "config" in raw and isinstance(raw["config"], dict):
        # a manifest written by a previous run
        raw = dict(raw["config"])
    for key, val in overrides.items():
        if val is not None:
            raw[key] = val
    experiment = raw.get("experiment", DEFAULTS["experiment"])
    base = dict(DEFAULTS)
    if experiment == "continuum-sweep":
        base["hamiltonian"] = CONTINUUM_HAMILTONIAN
    merged = _merge(base, raw)
    unknown = set(merged) - {f.name for f in fields(ExperimentConfig)}
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    cfg = ExperimentConfig(**merged)
    _validate(cfg)
    return cfg


def _int(value, name: str, minimum: int) -> int:
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)) or value < minimum:
        raise ConfigError(f"{name} must be an integer >= {minimum}, got {value!r}")
    return int(value)


def _validate(cfg: ExperimentConfig) -> None:
    if cfg.experiment not in EXPERIMENTS:
        raise ConfigError(f"unknown experiment {cfg.experiment!r}; choose from {EXPERIMENTS}")
    for name in ("hamiltonian", "povm", "system_state", "reference_state", "profiles", "debug"):
        if not isinstance(getattr(cfg, name), dict):
            raise ConfigError(f"{name} must be a JSON object")
    cfg.d = _int(cfg.d, "d", 1)
    cfg.dim_s = _int(cfg.dim_s, "dim_s", 1)
    if isinstance(cfg.seed, bool) or not isinstance(cfg.seed, int) or not 0 <= cfg.seed < 2**64:
        raise ConfigError(f"seed must be a 64-bit unsigned integer, got {cfg.seed!r}")
    cfg.clock_state_index = _int(cfg.clock_state_index, "clock_state_index", 0)

    kind = cfg.hamiltonian.get("kind")
    if kind == "diagonal":
        levels = cfg.hamiltonian.get("levels")
        if not isinstance(levels, list) or not levels:
            raise ConfigError("diagonal hamiltonian needs a non-empty 'levels' list")
        cfg.dim_s = len(levels) if cfg.experiment == "continuum-sweep" else cfg.dim_s
        if len(levels) != cfg.dim_s:
            raise ConfigError(f"{len(levels)} levels but dim_s = {cfg.dim_s}")
    elif kind == "matrix":
        mat = parse_matrix(cfg.hamiltonian.get("entries"))
        if cfg.experiment == "continuum-sweep":
            cfg.dim_s = mat.shape[0]
        if mat.shape[0] != cfg.dim_s:
            raise ConfigError(f"hamiltonian matrix has dim {mat.shape[0]} but dim_s = {cfg.dim_s}")
    elif kind != "random-hermitian":
        raise ConfigError(f"unknown hamiltonian kind {kind!r}")

    kind = cfg.povm.get("kind")
    if kind == "random":
        _int(cfg.povm.get("n_outcomes", 3), "povm.n_outcomes", 1)
    elif kind == "explicit":
        effects = cfg.povm.get("effects")
        if not isinstance(effects, list) or not effects:
            raise ConfigError("explicit povm needs a non-empty 'effects' list")
        for e in effects:
            parse_matrix(e, cfg.dim_s)
    elif kind != "sharp-basis":
        raise ConfigError(f"unknown povm kind {kind!r}")

    kind = cfg.system_state.get("kind")
    if kind == "basis":
        idx = _int(cfg.system_state.get("index", 0), "system_state.index", 0)
        if idx >= cfg.dim_s:
            raise ConfigError(f"system_state.index {idx} out of range for dim_s {cfg.dim_s}")
    elif kind not in ("random-pure", "random-mixed"):
        raise ConfigError(f"unknown system_state kind {kind!r}")

    kind = cfg.reference_state.get("kind")
    if kind not in ("fourier", "position"):
        raise ConfigError(f"unknown reference_state kind {kind!r}")
    key = "m" if kind == "fourier" else "n"
    _int(cfg.reference_state.get(key, 0), f"reference_state.{key}", 0)

    try:
        cfg.lambda_grid = [float(x) for x in cfg.lambda_grid]
        cfg.displacement_s = [float(x) for x in cfg.displacement_s]
    except (TypeError, ValueError):
        raise ConfigError("lambda_grid and displacement_s must be lists of numbers") from None
    if not cfg.lambda_grid or any(not x > 0 for x in cfg.lambda_grid):
        raise ConfigError("lambda_grid must be a non-empty list of positive numbers")
    for name in ("f_c", "f_r", "h"):
        prof = cfg.profiles.get(name)
        if not isinstance(prof, dict) or prof.get("kind") not in ("gaussian", "bump"):
            raise ConfigError(f"profile {name} must have kind 'gaussian' or 'bump'")
        try:
            width = float(prof.get("width", 1.0))
        except (TypeError, ValueError):
            raise ConfigError(f"profile {name} width must be a number") from None
        if not width > 0:
            raise ConfigError(f"profile {name} width must be positive")
    if not isinstance(cfg.output_dir, str) or not cfg.output_dir:
        raise ConfigError("output_dir must be a non-empty string")


def load(path: str | Path) -> dict:
    """Read a config (or a previous run's manifest) from a JSON file."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    return data
