"""Experiment configuration: schema, defaults, presets, initial data.

A config is a single JSON object (human-editable, nested key/value) with a
schema_version field.  Randomness comes from one documented PRNG family,
numpy.random.default_rng (PCG64), seeded from options.seed; a seed is
mandatory whenever the initial data is random, so runs are bit-reproducible.
"""

from __future__ import annotations

import copy
import json
from pathlib import Path

import numpy as np

from .fieldio import load_field
from .models import ModelSpec, make_model, model_from_config
from .spectral import (
    Grid,
    SpectralField,
    dealias_truncate,
    sobolev_norm,
    to_spectral,
)
from .models import project_subspace

__all__ = [
    "SCHEMA_VERSION",
    "default_config",
    "load_config",
    "canonical_json",
    "validate_config",
    "build_model",
    "build_grid",
    "build_initial_field",
    "preset",
    "preset_names",
]

SCHEMA_VERSION = 1

_RANDOM_KINDS = ("random_bandlimited", "power_law")


def default_config() -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "model": "burgers",
        "theta": None,
        "d": None,
        "grid": {"N": [128], "L": None},
        "initial_data": {
            "kind": "random_bandlimited",
            "kmin": 1,
            "kmax": 6,
            "target_norm": 1e-2,
            "norm_space": None,       # defaults to the model's critical index
        },
        "time": {
            "t_end": 1.0,
            "dt": 1e-2,
            "observations": 50,
            "spacing": "log",         # or "linear"
            "t_obs_min": None,        # first positive observation (log spacing)
            "include_t0": True,
        },
        "energy": {
            "rule": "general_l2",
            "n_max": 8,
            "base_order": None,       # defaults to the model's critical index
            "params": {},
            "t0_threshold": None,     # smallness threshold activating a t0 offset
        },
        "options": {
            "seed": 0,
            "calibrate": False,
            "mild": False,
            "mild_t_end": 0.1,
            "decay_orders": [1, 2],
            "override_admissibility": False,
            "extra_norm_orders": [],
            "energy_identity": False,
            "gronwall_order": None,
            "mean_density": 0.0,
            "adaptive": False,
            "cfl_safety": False,
        },
    }


def _merge(base: dict, override: dict) -> dict:
    out = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], value)
        else:
            out[key] = copy.deepcopy(value)
    return out


def load_config(source) -> dict:
    """Load a config from a dict, a preset name, or a JSON file path."""
    if isinstance(source, dict):
        raw = source
    else:
        text = str(source)
        if text in preset_names():
            raw = preset(text)
        else:
            path = Path(text)
            if not path.exists():
                raise FileNotFoundError(
                    f"{text!r} is neither a preset ({', '.join(preset_names())}) "
                    f"nor a config file"
                )
            raw = json.loads(path.read_text())
    cfg = _merge(default_config(), raw)
    validate_config(cfg)
    return cfg


def canonical_json(cfg: dict) -> str:
    return json.dumps(cfg, sort_keys=True, indent=2) + "\n"


def validate_config(cfg: dict) -> None:
    if cfg.get("schema_version") != SCHEMA_VERSION:
        raise ValueError(
            f"unsupported schema_version {cfg.get('schema_version')!r}; "
            f"this build reads version {SCHEMA_VERSION}"
        )
    time = cfg["time"]
    if not time["t_end"] > 0:
        raise ValueError("time.t_end must be positive")
    if not time["dt"] > 0:
        raise ValueError("time.dt must be positive")
    data = cfg["initial_data"]
    if data["kind"] in _RANDOM_KINDS and cfg["options"].get("seed") is None:
        raise ValueError("random initial data requires options.seed")
    if data["kind"] not in _RANDOM_KINDS + ("single_mode", "from_file"):
        raise ValueError(f"unknown initial data kind {data['kind']!r}")


def build_model(cfg: dict) -> ModelSpec:
    model = cfg["model"]
    if isinstance(model, dict):
        return model_from_config(model)
    kwargs = {}
    if cfg.get("theta") is not None:
        kwargs["theta"] = cfg["theta"]
    if model == "linear" and cfg.get("d") is not None:
        kwargs["d"] = int(cfg["d"])
    if model in ("ks2d", "ks3d"):
        kwargs["mean_density"] = float(cfg["options"].get("mean_density", 0.0))
    return make_model(model, **kwargs)


def build_grid(cfg: dict, spec: ModelSpec) -> Grid:
    g = cfg["grid"]
    modes = g["N"]
    if isinstance(modes, int):
        modes = [modes] * spec.d
    if len(modes) != spec.d:
        raise ValueError(
            f"grid lists {len(modes)} axes but the model is {spec.d}-dimensional"
        )
    return Grid.make(tuple(modes), g.get("L"))


def observation_times(cfg: dict) -> np.ndarray:
    time = cfg["time"]
    t_end = float(time["t_end"])
    count = int(time["observations"])
    if time["spacing"] == "linear":
        mesh = np.linspace(0.0 if time.get("include_t0", True) else t_end / count,
                           t_end, count)
        return mesh
    t_min = time.get("t_obs_min") or t_end * 1e-3
    mesh = np.geomspace(float(t_min), t_end, count)
    if time.get("include_t0", True):
        mesh = np.concatenate([[0.0], mesh])
    return mesh


def _mode_radius(grid: Grid) -> np.ndarray:
    r2 = np.zeros(grid.shape)
    for axis, m in enumerate(grid.mode_numbers):
        shape = [1] * grid.dimension
        shape[axis] = grid.modes[axis]
        r2 = r2 + m.reshape(shape).astype(float) ** 2
    return np.sqrt(r2)


def build_initial_field(cfg: dict, spec: ModelSpec, grid: Grid,
                        rng: np.random.Generator) -> SpectralField:
    """Construct the configured initial state (always projected, dealiased,
    and mean-zero; total chemotaxis mass lives in options.mean_density)."""
    data = cfg["initial_data"]
    kind = data["kind"]
    if kind == "from_file":
        f = load_field(data["path"])
        if f.grid != grid or f.components != spec.components:
            raise ValueError("stored field does not match the configured grid/model")
        return dealias_truncate(project_subspace(spec, f))

    if kind == "single_mode":
        mode = data.get("mode", 1)
        if isinstance(mode, int):
            mode = [mode] + [0] * (grid.dimension - 1)
        amp = float(data.get("amplitude", 1.0))
        coords = grid.coordinates()
        phase = sum(
            (2.0 * np.pi / L) * mi * xi
            for mi, xi, L in zip(mode, coords, grid.periods)
        )
        samples = np.broadcast_to(amp * np.cos(phase), (spec.components,) + grid.shape)
        f = to_spectral(np.array(samples), grid)
        f = dealias_truncate(project_subspace(spec, f))
        return f

    # random profiles: white noise shaped in spectrum
    noise = rng.standard_normal((spec.components,) + grid.shape)
    f = to_spectral(noise, grid)
    radius = _mode_radius(grid)
    kmin = float(data.get("kmin", 1))
    kmax = float(data.get("kmax", max(grid.modes) // 3))
    band = (radius >= kmin - 0.5) & (radius <= kmax + 0.5)
    c = f.coeffs * band
    if kind == "power_law":
        mag = np.abs(c)
        safe = np.where(mag > 0, mag, 1.0)
        safe_radius = np.where(radius > 0, radius, 1.0)
        c = c / safe * safe_radius**float(data["exponent"]) * (mag > 0)
        c[:, grid.zero_index] = 0.0
    f = SpectralField(grid, c)
    f = dealias_truncate(project_subspace(spec, f))
    target = data.get("target_norm")
    if target is not None:
        space = data.get("norm_space")
        if space is None:
            space = float(spec.critical_index)
        current = sobolev_norm(f, float(space))
        if current == 0:
            raise ValueError("initial profile vanished; cannot reach the target norm")
        f = f * (float(target) / current)
    return f


# ---------------------------------------------------------------------------
# presets

def _preset_table() -> dict[str, dict]:
    return {
        "burgers_small": {
            "model": "burgers",
            "grid": {"N": [128]},
            "initial_data": {"kind": "random_bandlimited", "kmin": 1, "kmax": 6,
                             "target_norm": 1e-2, "norm_space": -0.5},
            "time": {"t_end": 10.0, "dt": 5e-3, "observations": 50,
                     "spacing": "log", "t_obs_min": 0.01},
            "energy": {"rule": "burgers_sobolev", "n_max": 8,
                       "params": {"caux": 1.0}},
            "options": {"seed": 101, "decay_orders": [1, 2, 3, 4, 5]},
        },
        "ns2d_small": {
            "model": "ns2d",
            "grid": {"N": [64, 64]},
            "initial_data": {"kind": "random_bandlimited", "kmin": 1, "kmax": 4,
                             "target_norm": 0.05, "norm_space": 0.0},
            "time": {"t_end": 5.0, "dt": 5e-3, "observations": 40,
                     "spacing": "log", "t_obs_min": 0.05},
            "energy": {"rule": "empirical", "n_max": 8},
            "options": {"seed": 202, "decay_orders": [1, 2]},
        },
        "ns3d_small": {
            "model": "ns3d",
            "grid": {"N": [32, 32, 32]},
            "initial_data": {"kind": "random_bandlimited", "kmin": 1, "kmax": 3,
                             "target_norm": 0.05, "norm_space": 0.5},
            "time": {"t_end": 2.0, "dt": 1e-2, "observations": 30,
                     "spacing": "log", "t_obs_min": 0.02},
            "energy": {"rule": "empirical", "n_max": 6},
            "options": {"seed": 303, "decay_orders": [1, 2]},
        },
        "sqg_small": {
            "model": "sqg",
            "theta": "3/4",
            "grid": {"N": [64, 64]},
            "initial_data": {"kind": "random_bandlimited", "kmin": 1, "kmax": 4,
                             "target_norm": 0.05, "norm_space": 0.5},
            "time": {"t_end": 5.0, "dt": 5e-3, "observations": 40,
                     "spacing": "log", "t_obs_min": 0.05},
            "energy": {"rule": "empirical", "n_max": 8},
            "options": {"seed": 404, "decay_orders": [1, 2]},
        },
        "ks2d_small": {
            "model": "ks2d",
            "grid": {"N": [64, 64]},
            "initial_data": {"kind": "random_bandlimited", "kmin": 1, "kmax": 4,
                             "target_norm": 1e-2, "norm_space": -1.0},
            "time": {"t_end": 2.0, "dt": 5e-3, "observations": 40,
                     "spacing": "log", "t_obs_min": 0.02},
            "energy": {"rule": "empirical", "n_max": 8},
            "options": {"seed": 505, "decay_orders": [1, 2]},
        },
        "linear_conservation": {
            "model": "linear",
            "theta": 1,
            "d": 1,
            "grid": {"N": [8]},
            "initial_data": {"kind": "single_mode", "mode": [1], "amplitude": 1.0},
            "time": {"t_end": 5.0, "dt": 0.1, "observations": 50,
                     "spacing": "linear"},
            "energy": {"rule": "linear_heat", "n_max": 40, "base_order": 0.0},
            "options": {"seed": 0, "decay_orders": [1, 2]},
        },
        "ks2d_blowup": {
            "model": "ks2d",
            "grid": {"N": [64, 64]},
            "initial_data": {"kind": "random_bandlimited", "kmin": 1, "kmax": 2,
                             "target_norm": 8.0, "norm_space": 0.0},
            "time": {"t_end": 2.0, "dt": 1e-3, "observations": 80,
                     "spacing": "linear"},
            "energy": {"rule": "general_l2", "n_max": 6},
            "options": {"seed": 707, "mean_density": 20.0, "decay_orders": [1]},
        },
        "ns2d_hneg": {
            "model": "ns2d",
            "grid": {"N": [64, 64]},
            "initial_data": {"kind": "power_law", "exponent": -0.4,
                             "kmin": 1, "kmax": 4,
                             "target_norm": 0.5, "norm_space": 0.0},
            "time": {"t_end": 1.0, "dt": 2e-3, "observations": 501,
                     "spacing": "linear"},
            "energy": {"rule": "empirical", "n_max": 8},
            "options": {"seed": 606, "decay_orders": [1, 2],
                        "energy_identity": True, "gronwall_order": 0.5},
        },
    }


def preset_names() -> tuple[str, ...]:
    return tuple(_preset_table().keys())


def preset(name: str) -> dict:
    table = _preset_table()
    if name not in table:
        raise KeyError(f"unknown preset {name!r}; available: {', '.join(table)}")
    return copy.deepcopy(table[name])
