from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Tuple

import numpy as np

from ..errors import TrainingError
from .spec import AdamConfig

Params = Dict[str, np.ndarray]


@dataclass
class AdamState:
    m: Params
    v: Params

    @classmethod
    def zeros_like(cls, params: Params) -> "AdamState":
        return cls({k: np.zeros_like(p) for k, p in params.items()}, {k: np.zeros_like(p) for k, p in params.items()})


def adam_step(params: Params, grads: Params, state: AdamState, t: int, cfg: AdamConfig) -> Tuple[Params, AdamState]:
    """One bias-corrected Adam update at step t >= 1. Inputs are not modified."""
    if t < 1:
        raise TrainingError(f"Adam step counter starts at 1, got {t}")
    new_params: Params = {}
    new_m: Params = {}
    new_v: Params = {}
    for name, p in params.items():
        g = grads[name]
        if g.shape != p.shape:
            raise TrainingError(f"gradient shape {g.shape} does not match parameter {name} {p.shape}")
        if not np.all(np.isfinite(g)):
            raise TrainingError(f"non-finite gradient for {name}")
        m = cfg.beta1 * state.m[name] + (1.0 - cfg.beta1) * g
        v = cfg.beta2 * state.v[name] + (1.0 - cfg.beta2) * g * g
        m_hat = m / (1.0 - cfg.beta1**t)
        v_hat = v / (1.0 - cfg.beta2**t)
        new_params[name] = p - cfg.learning_rate * m_hat / (np.sqrt(v_hat) + cfg.eps)
        new_m[name] = m
        new_v[name] = v
    return new_params, AdamState(new_m, new_v)
