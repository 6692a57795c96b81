from __future__ import annotations

import logging
from typing import Optional

import numpy as np

from ..seeding import derive_rng
from .networks import Params, build_network
from .spec import ModelSpec, TrainConfig

logger = logging.getLogger(__name__)


def gradient_check(
    spec: ModelSpec,
    cfg: Optional[TrainConfig],
    X: np.ndarray,
    y: np.ndarray,
    n_params: int = 50,
    seed: Optional[int] = None,
    step: float = 1e-5,
    params: Optional[Params] = None,
) -> float:
    """
    Max relative error |a - n| / max(|a|, |n|, 1e-6) between backprop gradients and central
    differences, over n_params randomly sampled parameter entries.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=int)
    if seed is None:
        seed = cfg.seed if cfg is not None else 0
    rng = derive_rng(seed, "gradcheck", spec.family.value)
    net = build_network(spec, X.shape[1])
    if params is None:
        params = net.init_params(rng)
    params = {k: v.copy() for k, v in params.items()}
    _, grads = net.loss_and_grads(params, X, y, spec.weight_decay)

    entries = [(name, i) for name, p in params.items() for i in range(p.size)]
    picks = rng.choice(len(entries), size=min(n_params, len(entries)), replace=False)
    worst = 0.0
    for pick in picks:
        name, flat = entries[pick]
        target = params[name].reshape(-1)
        original = target[flat]
        target[flat] = original + step
        up = net.loss(params, X, y, spec.weight_decay)
        target[flat] = original - step
        down = net.loss(params, X, y, spec.weight_decay)
        target[flat] = original
        numeric = (up - down) / (2.0 * step)
        analytic = grads[name].reshape(-1)[flat]
        rel = abs(analytic - numeric) / max(abs(analytic), abs(numeric), 1e-6)
        worst = max(worst, rel)
    logger.debug("gradient check %s: max relative error %.3g over %d entries", spec.family.value, worst, len(picks))
    return worst
