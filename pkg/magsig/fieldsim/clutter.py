"""
Background field synthesis: Earth field, static infrastructure dipoles, slow drift,
white sensor noise, moving ferrous interferers and AC loop transmissions.
Also holds the named environment presets.
"""
from __future__ import annotations

import logging
from typing import Dict, List

import numpy as np
from scipy.signal import lfilter

from ..errors import ConfigurationError
from ..seeding import derive_rng
from .dipole import DipoleSource, dipole_field, superposed_field
from .specs import ClutterSpec

logger = logging.getLogger(__name__)

# Preset layouts are generated once from this seed so they never change between runs
_PRESET_SEED = 20240501

_ENVIRONMENTS: Dict[str, Dict] = {
    "env-1": {
        "earth_field": (18.0, 8.0, -42.0),
        "dipoles": 8,
        "moment_range": (50.0, 300.0),
        "noise_std": 1.5,
        "drift_scale": 2.0,
        "moving_per_minute": 2.0,
        "moving_moment": 20.0,
        "ac_amplitude": 0.5,
    },
    "env-2": {
        "earth_field": (22.0, -5.0, -38.0),
        "dipoles": 12,
        "moment_range": (30.0, 200.0),
        "noise_std": 1.2,
        "drift_scale": 1.5,
        "moving_per_minute": 3.0,
        "moving_moment": 20.0,
        "ac_amplitude": 1.0,
    },
    "env-3": {
        "earth_field": (15.0, 12.0, -45.0),
        "dipoles": 6,
        "moment_range": (100.0, 400.0),
        "noise_std": 2.0,
        "drift_scale": 2.5,
        "moving_per_minute": 1.0,
        "moving_moment": 30.0,
        "ac_amplitude": 1.5,
    },
    "env-4": {
        "earth_field": (25.0, 0.0, -35.0),
        "dipoles": 16,
        "moment_range": (20.0, 150.0),
        "noise_std": 1.8,
        "drift_scale": 3.0,
        "moving_per_minute": 6.0,
        "moving_moment": 40.0,
        "ac_amplitude": 0.8,
    },
}

PRESET_NAMES = ("shielded",) + tuple(_ENVIRONMENTS)


def _random_directions(rng: np.random.Generator, n: int) -> np.ndarray:
    v = rng.normal(size=(n, 3))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def _infrastructure_layout(name: str, count: int, moment_range) -> List[DipoleSource]:
    """Steel beams, rebar and appliances at least 2.5 m to either side of the row."""
    rng = derive_rng(_PRESET_SEED, "layout", name)
    xs = rng.uniform(-15.0, 25.0, size=count)
    ys = rng.uniform(2.5, 6.0, size=count) * rng.choice([-1.0, 1.0], size=count)
    zs = rng.uniform(0.0, 3.0, size=count)
    moments = rng.uniform(*moment_range, size=count)[:, None] * _random_directions(rng, count)
    return [
        DipoleSource((float(x), float(y), float(z)), tuple(float(m) for m in mom))
        for x, y, z, mom in zip(xs, ys, zs, moments)
    ]


def clutter_preset(name: str, target_sir_db: float = 8.0) -> ClutterSpec:
    """
    Named environments. "shielded" is the training room (Earth field only, low noise, unscaled);
    env-1..env-4 are the crowded test environments scaled to target_sir_db.
    """
    if name == "shielded":
        return ClutterSpec(
            noise_std=0.1,
            drift_scale=0.05,
            layout_jitter=0.0,
            target_sir_db=None,
            name="shielded",
        )
    if name not in _ENVIRONMENTS:
        raise ConfigurationError(f"Unknown environment preset: {name}. Known: {', '.join(PRESET_NAMES)}")
    params = _ENVIRONMENTS[name]
    return ClutterSpec(
        earth_field=params["earth_field"],
        static_dipoles=_infrastructure_layout(name, params["dipoles"], params["moment_range"]),
        noise_std=params["noise_std"],
        drift_scale=params["drift_scale"],
        moving_per_minute=params["moving_per_minute"],
        moving_moment=params["moving_moment"],
        ac_amplitude=params["ac_amplitude"],
        target_sir_db=target_sir_db,
        name=name,
    )


def gauss_markov_drift(rng: np.random.Generator, n: int, sample_rate: float, scale: float, tau: float) -> np.ndarray:
    """First-order Gauss-Markov process per axis, stationary std = scale, correlation time tau."""
    if scale == 0.0:
        return np.zeros((n, 3))
    phi = float(np.exp(-1.0 / (sample_rate * tau)))
    drive = rng.normal(size=(n, 3))
    start = rng.normal(scale=scale, size=(1, 3))
    gain = scale * np.sqrt(1.0 - phi * phi)
    drift, _ = lfilter([gain], [1.0, -phi], drive, axis=0, zi=phi * start)
    return drift


def static_field(spec: ClutterSpec, positions: np.ndarray, offset: float) -> np.ndarray:
    """World-frame field of the static layout shifted by offset metres along +x."""
    if not spec.static_dipoles:
        return np.zeros_like(positions)
    shifted = positions - np.array([offset, 0.0, 0.0])
    return superposed_field(shifted, spec.static_dipoles)


def moving_interferer_field(
    spec: ClutterSpec,
    rng: np.random.Generator,
    t: np.ndarray,
    positions: np.ndarray,
) -> np.ndarray:
    """People carrying ferrous objects on a parallel lane, crossing the walker at random times."""
    duration = float(t[-1] - t[0]) if len(t) > 1 else 0.0
    count = int(rng.poisson(spec.moving_per_minute * duration / 60.0)) if spec.moving_per_minute > 0 else 0
    total = np.zeros_like(positions)
    for _ in range(count):
        t0 = rng.uniform(t[0], t[-1])
        k0 = int(np.clip(np.searchsorted(t, t0), 0, len(t) - 1))
        lane = rng.uniform(1.5, 4.0)
        height = rng.uniform(0.5, 1.2)
        speed = rng.uniform(0.8, 1.6) * rng.choice([-1.0, 1.0])
        moment = rng.uniform(0.5, 1.0) * spec.moving_moment * _random_directions(rng, 1)[0]
        path = np.empty_like(positions)
        path[:, 0] = positions[k0, 0] + speed * (t - t0)
        path[:, 1] = positions[k0, 1] + lane
        path[:, 2] = height
        # Source fixed at the origin, sensor expressed relative to the moving carrier
        carrier = DipoleSource((0.0, 0.0, 0.0), tuple(float(m) for m in moment))
        total += dipole_field(positions - path, carrier)
    if count:
        logger.debug("moving interferers: %d", count)
    return total


def ac_field(spec: ClutterSpec, rng: np.random.Generator, t: np.ndarray) -> np.ndarray:
    if spec.ac_amplitude == 0.0:
        return np.zeros((len(t), 3))
    direction = _random_directions(rng, 1)[0]
    phase = rng.uniform(0.0, 2.0 * np.pi)
    wave = spec.ac_amplitude * np.sin(2.0 * np.pi * spec.ac_frequency * t + phase)
    return wave[:, None] * direction


def background_world(
    spec: ClutterSpec,
    rng: np.random.Generator,
    t: np.ndarray,
    positions: np.ndarray,
) -> np.ndarray:
    """Environment field in the world frame (Earth + static + moving + AC); sensor drift/noise are added later."""
    offset = rng.uniform(-spec.layout_jitter, spec.layout_jitter) if spec.layout_jitter > 0 else 0.0
    field = np.broadcast_to(spec.earth_array, positions.shape).copy()
    field += static_field(spec, positions, offset)
    field += moving_interferer_field(spec, rng, t, positions)
    field += ac_field(spec, rng, t)
    return field


def sensor_disturbance(spec: ClutterSpec, rng: np.random.Generator, n: int, sample_rate: float) -> np.ndarray:
    """Device-frame drift plus white noise."""
    drift = gauss_markov_drift(rng, n, sample_rate, spec.drift_scale, spec.drift_tau)
    noise = rng.normal(scale=spec.noise_std, size=(n, 3)) if spec.noise_std > 0 else 0.0
    return drift + noise


__all__ = [
    "PRESET_NAMES",
    "clutter_preset",
    "gauss_markov_drift",
    "static_field",
    "moving_interferer_field",
    "ac_field",
    "background_world",
    "sensor_disturbance",
]
