"""
Gradient-trained classifiers in plain numpy: a ReLU feed-forward network and single-layer
RNN / GRU / LSTM over the three frame blocks of a feature vector. Each network exposes
forward, backward and the softmax cross-entropy loss with its parameter gradients.
"""
from __future__ import annotations

from typing import Any, Dict, List, Tuple

import numpy as np
from scipy.special import expit, logsumexp
from scipy.special import softmax as _softmax

from ..errors import ConfigurationError, DimensionError
from ..features.vectors import recurrent_view
from .spec import ModelFamily, ModelSpec

Params = Dict[str, np.ndarray]


def softmax(logits: np.ndarray) -> np.ndarray:
    return _softmax(logits, axis=-1)


def _uniform(rng: np.random.Generator, fan_in: int, shape: Tuple[int, ...]) -> np.ndarray:
    bound = 1.0 / np.sqrt(fan_in)
    return rng.uniform(-bound, bound, size=shape)


def is_weight(name: str) -> bool:
    """Matrices (not biases) carry weight decay."""
    return name[0] in ("W", "U")


class Network:
    """Shared loss plumbing; subclasses implement init_params, forward and backward."""

    def __init__(self, spec: ModelSpec, input_dim: int):
        self.spec = spec
        self.input_dim = int(input_dim)
        self.n_classes = spec.n_classes

    def init_params(self, rng: np.random.Generator) -> Params:
        raise NotImplementedError

    def forward(self, params: Params, X: np.ndarray) -> Tuple[np.ndarray, Any]:
        raise NotImplementedError

    def backward(self, params: Params, cache: Any, dlogits: np.ndarray) -> Params:
        raise NotImplementedError

    def _check(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[1] != self.input_dim:
            raise DimensionError(f"network expects (m, {self.input_dim}) input, got {X.shape}")
        return X

    def logits(self, params: Params, X: np.ndarray) -> np.ndarray:
        return self.forward(params, X)[0]

    def probabilities(self, params: Params, X: np.ndarray) -> np.ndarray:
        return softmax(self.logits(params, X))

    def loss(self, params: Params, X: np.ndarray, y: np.ndarray, weight_decay: float = 0.0) -> float:
        logits = self.logits(params, X)
        return cross_entropy(logits, y) + _decay(params, weight_decay)

    def loss_and_grads(
        self, params: Params, X: np.ndarray, y: np.ndarray, weight_decay: float = 0.0
    ) -> Tuple[float, Params]:
        logits, cache = self.forward(params, X)
        y = np.asarray(y, dtype=int)
        dlogits = softmax(logits)
        dlogits[np.arange(len(y)), y] -= 1.0
        dlogits /= len(y)
        grads = self.backward(params, cache, dlogits)
        if weight_decay:
            for name, p in params.items():
                if is_weight(name):
                    grads[name] = grads[name] + weight_decay * p
        return cross_entropy(logits, y) + _decay(params, weight_decay), grads


def cross_entropy(logits: np.ndarray, y: np.ndarray) -> float:
    y = np.asarray(y, dtype=int)
    log_probs = logits - logsumexp(logits, axis=1, keepdims=True)
    return float(-np.mean(log_probs[np.arange(len(y)), y]))


def _decay(params: Params, weight_decay: float) -> float:
    if not weight_decay:
        return 0.0
    return 0.5 * weight_decay * float(sum(np.sum(p * p) for name, p in params.items() if is_weight(name)))


class DenseNetwork(Network):
    """ReLU MLP; hidden_sizes=() reduces it to multinomial logistic regression."""

    def init_params(self, rng: np.random.Generator) -> Params:
        sizes = [self.input_dim, *self.spec.hidden_sizes, self.n_classes]
        params: Params = {}
        for layer, (fan_in, fan_out) in enumerate(zip(sizes[:-1], sizes[1:])):
            params[f"W{layer}"] = _uniform(rng, fan_in, (fan_in, fan_out))
            params[f"b{layer}"] = np.zeros(fan_out)
        return params

    @property
    def depth(self) -> int:
        return len(self.spec.hidden_sizes) + 1

    def forward(self, params: Params, X: np.ndarray):
        h = self._check(X)
        inputs: List[np.ndarray] = []
        pre: List[np.ndarray] = []
        for layer in range(self.depth):
            inputs.append(h)
            z = h @ params[f"W{layer}"] + params[f"b{layer}"]
            pre.append(z)
            h = np.maximum(z, 0.0) if layer < self.depth - 1 else z
        return h, (inputs, pre)

    def backward(self, params: Params, cache, dlogits: np.ndarray) -> Params:
        inputs, pre = cache
        grads: Params = {}
        delta = dlogits
        for layer in reversed(range(self.depth)):
            grads[f"W{layer}"] = inputs[layer].T @ delta
            grads[f"b{layer}"] = delta.sum(axis=0)
            if layer:
                delta = (delta @ params[f"W{layer}"].T) * (pre[layer - 1] > 0)
        return grads


class RecurrentNetwork(Network):
    """Single recurrent layer unrolled over sequence_steps blocks, final hidden state into a softmax head."""

    cell = "rnn"
    gates = 1

    def __init__(self, spec: ModelSpec, input_dim: int):
        super().__init__(spec, input_dim)
        if self.input_dim % spec.sequence_steps:
            raise DimensionError(f"input width {self.input_dim} does not split into {spec.sequence_steps} steps")
        self.steps = spec.sequence_steps
        self.step_dim = self.input_dim // self.steps
        self.hidden = spec.hidden_size

    def init_params(self, rng: np.random.Generator) -> Params:
        H, width = self.hidden, self.gates * self.hidden
        params = self._init_cell(rng, H, width)
        params["Wo"] = _uniform(rng, H, (H, self.n_classes))
        params["bo"] = np.zeros(self.n_classes)
        return params

    def _init_cell(self, rng: np.random.Generator, H: int, width: int) -> Params:
        return {
            "Wx": _uniform(rng, self.step_dim, (self.step_dim, width)),
            "Wh": _uniform(rng, H, (H, width)),
            "b": np.zeros(width),
        }

    def _sequence(self, X: np.ndarray) -> np.ndarray:
        return recurrent_view(self._check(X), self.steps)

    def forward(self, params: Params, X: np.ndarray):
        seq = self._sequence(X)
        h = np.zeros((len(seq), self.hidden))
        state = self._initial_state(len(seq))
        caches = []
        for t in range(self.steps):
            h, state, cache = self._step(params, seq[:, t, :], h, state)
            caches.append(cache)
        logits = h @ params["Wo"] + params["bo"]
        return logits, (h, caches)

    def backward(self, params: Params, cache, dlogits: np.ndarray) -> Params:
        h_last, caches = cache
        grads = {name: np.zeros_like(p) for name, p in params.items()}
        grads["Wo"] = h_last.T @ dlogits
        grads["bo"] = dlogits.sum(axis=0)
        dh = dlogits @ params["Wo"].T
        dstate = None
        for cache_t in reversed(caches):
            dh, dstate = self._step_backward(params, cache_t, dh, dstate, grads)
        return grads

    def _initial_state(self, m: int):
        return None

    def _step(self, params: Params, x: np.ndarray, h: np.ndarray, state):
        h_new = np.tanh(x @ params["Wx"] + h @ params["Wh"] + params["b"])
        return h_new, None, (x, h, h_new)

    def _step_backward(self, params: Params, cache, dh: np.ndarray, dstate, grads: Params):
        x, h_prev, h_new = cache
        da = dh * (1.0 - h_new * h_new)
        grads["Wx"] += x.T @ da
        grads["Wh"] += h_prev.T @ da
        grads["b"] += da.sum(axis=0)
        return da @ params["Wh"].T, None


class GRUNetwork(RecurrentNetwork):
    """h' = (1 - z)·n + z·h, n = tanh(x·Wn + (r ⊙ h)·Un + bn)."""

    cell = "gru"
    gates = 3

    def _init_cell(self, rng: np.random.Generator, H: int, width: int) -> Params:
        return {
            "Wx": _uniform(rng, self.step_dim, (self.step_dim, width)),
            "Uzr": _uniform(rng, H, (H, 2 * H)),
            "Un": _uniform(rng, H, (H, H)),
            "b": np.zeros(width),
        }

    def _step(self, params: Params, x: np.ndarray, h: np.ndarray, state):
        H = self.hidden
        a = x @ params["Wx"] + params["b"]
        zr = expit(a[:, : 2 * H] + h @ params["Uzr"])
        z, r = zr[:, :H], zr[:, H:]
        n = np.tanh(a[:, 2 * H :] + (r * h) @ params["Un"])
        h_new = (1.0 - z) * n + z * h
        return h_new, None, (x, h, z, r, n)

    def _step_backward(self, params: Params, cache, dh: np.ndarray, dstate, grads: Params):
        x, h_prev, z, r, n = cache
        dn = dh * (1.0 - z)
        dz = dh * (h_prev - n)
        dh_prev = dh * z

        dn_pre = dn * (1.0 - n * n)
        grads["Un"] += (r * h_prev).T @ dn_pre
        drh = dn_pre @ params["Un"].T
        dr = drh * h_prev
        dh_prev += drh * r

        dzr_pre = np.concatenate([dz * z * (1.0 - z), dr * r * (1.0 - r)], axis=1)
        grads["Uzr"] += h_prev.T @ dzr_pre
        dh_prev += dzr_pre @ params["Uzr"].T

        da = np.concatenate([dzr_pre, dn_pre], axis=1)
        grads["Wx"] += x.T @ da
        grads["b"] += da.sum(axis=0)
        return dh_prev, None


class LSTMNetwork(RecurrentNetwork):
    """Gates packed as [input, forget, output, candidate]; forget bias starts at 1."""

    cell = "lstm"
    gates = 4

    def _init_cell(self, rng: np.random.Generator, H: int, width: int) -> Params:
        params = super()._init_cell(rng, H, width)
        params["b"][H : 2 * H] = 1.0
        return params

    def _initial_state(self, m: int):
        return np.zeros((m, self.hidden))

    def _step(self, params: Params, x: np.ndarray, h: np.ndarray, c: np.ndarray):
        H = self.hidden
        a = x @ params["Wx"] + h @ params["Wh"] + params["b"]
        i = expit(a[:, :H])
        f = expit(a[:, H : 2 * H])
        o = expit(a[:, 2 * H : 3 * H])
        g = np.tanh(a[:, 3 * H :])
        c_new = f * c + i * g
        tc = np.tanh(c_new)
        h_new = o * tc
        return h_new, c_new, (x, h, c, i, f, o, g, tc)

    def _step_backward(self, params: Params, cache, dh: np.ndarray, dc_next, grads: Params):
        x, h_prev, c_prev, i, f, o, g, tc = cache
        dc = dh * o * (1.0 - tc * tc)
        if dc_next is not None:
            dc = dc + dc_next
        da = np.concatenate(
            [
                dc * g * i * (1.0 - i),
                dc * c_prev * f * (1.0 - f),
                dh * tc * o * (1.0 - o),
                dc * i * (1.0 - g * g),
            ],
            axis=1,
        )
        grads["Wx"] += x.T @ da
        grads["Wh"] += h_prev.T @ da
        grads["b"] += da.sum(axis=0)
        return da @ params["Wh"].T, dc * f


_NETWORKS = {
    ModelFamily.DNN: DenseNetwork,
    ModelFamily.RNN: RecurrentNetwork,
    ModelFamily.GRU: GRUNetwork,
    ModelFamily.LSTM: LSTMNetwork,
}


def build_network(spec: ModelSpec, input_dim: int) -> Network:
    family = ModelFamily.parse(spec.family)
    if family not in _NETWORKS:
        raise ConfigurationError(f"{family.value} is not a gradient-trained family")
    return _NETWORKS[family](spec, input_dim)
