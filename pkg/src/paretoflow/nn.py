"""A small dense network with hand-written backprop and Adam.

Everything is float64 and batched: inputs are ``(batch, input_dim)``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

LEAKY_SLOPE = 0.01


@dataclass
class DenseNet:
    """Affine layers with LeakyReLU in between and raw logits at the end."""

    weights: list
    biases: list
    slope: float = LEAKY_SLOPE

    @classmethod
    def init(cls, sizes, rng=None, slope=LEAKY_SLOPE):
        """Uniform fan-in initialisation, ``U(-1/sqrt(fan_in), 1/sqrt(fan_in))``."""
        rng = np.random.default_rng(rng)
        weights, biases = [], []
        for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
            bound = 1.0 / np.sqrt(fan_in)
            weights.append(rng.uniform(-bound, bound, size=(fan_in, fan_out)))
            biases.append(rng.uniform(-bound, bound, size=fan_out))
        return cls(weights, biases, slope)

    @property
    def sizes(self):
        return [self.weights[0].shape[0]] + [w.shape[1] for w in self.weights]

    @property
    def input_dim(self):
        return self.weights[0].shape[0]

    @property
    def output_dim(self):
        return self.weights[-1].shape[1]

    @property
    def params(self):
        out = []
        for w, b in zip(self.weights, self.biases):
            out += [w, b]
        return out

    def copy(self) -> "DenseNet":
        return DenseNet([w.copy() for w in self.weights], [b.copy() for b in self.biases], self.slope)

    def __call__(self, x):
        return forward(self, x)[0]

    def to_json(self) -> dict:
        layers = []
        for w, b in zip(self.weights, self.biases):
            layers.append(
                {
                    "W": {"shape": list(w.shape), "data": w.ravel().tolist()},
                    "b": {"shape": list(b.shape), "data": b.ravel().tolist()},
                }
            )
        return {"activation": "leaky_relu", "slope": self.slope, "layers": layers}

    @classmethod
    def from_json(cls, obj) -> "DenseNet":
        ws, bs = [], []
        for layer in obj["layers"]:
            ws.append(np.array(layer["W"]["data"], dtype=np.float64).reshape(layer["W"]["shape"]))
            bs.append(np.array(layer["b"]["data"], dtype=np.float64).reshape(layer["b"]["shape"]))
        return cls(ws, bs, float(obj["slope"]))

    def save(self, path):
        Path(path).write_text(json.dumps(self.to_json()))

    @classmethod
    def load(cls, path) -> "DenseNet":
        return cls.from_json(json.loads(Path(path).read_text()))


def forward(net: DenseNet, x):
    """Return logits and the cache needed by :func:`backward`."""
    h = np.asarray(x, dtype=np.float64)
    squeeze = h.ndim == 1
    if squeeze:
        h = h[None, :]
    if h.shape[1] != net.input_dim:
        raise ValueError(f"expected input width {net.input_dim}, got {h.shape[1]}")
    cache = []
    last = len(net.weights) - 1
    for i, (w, b) in enumerate(zip(net.weights, net.biases)):
        z = h @ w + b
        cache.append((h, z))
        h = z if i == last else np.where(z > 0, z, net.slope * z)
    return (h[0] if squeeze else h), cache


def backward(net: DenseNet, cache, grad_out) -> list:
    """Gradients ``[dW0, db0, dW1, db1, ...]`` of a scalar loss.

    ``grad_out`` is d(loss)/d(logits), shaped like the forward output.
    """
    g = np.asarray(grad_out, dtype=np.float64)
    if g.ndim == 1:
        g = g[None, :]
    grads = [None] * (2 * len(net.weights))
    for i in range(len(net.weights) - 1, -1, -1):
        h, z = cache[i]
        if i != len(net.weights) - 1:
            g = np.where(z > 0, g, net.slope * g)
        grads[2 * i] = h.T @ g
        grads[2 * i + 1] = g.sum(axis=0)
        if i > 0:
            g = g @ net.weights[i].T
    return grads


def log_softmax(logits, mask=None):
    """Masked, max-stabilised log-softmax along the last axis; masked entries are -inf."""
    logits = np.asarray(logits, dtype=np.float64)
    if mask is None:
        mask = np.ones(logits.shape, dtype=bool)
    mask = np.asarray(mask, dtype=bool)
    if not mask.any(axis=-1).all():
        raise ValueError("every row needs at least one unmasked entry")
    z = np.where(mask, logits, -np.inf)
    m = z.max(axis=-1, keepdims=True)
    shifted = z - m
    with np.errstate(divide="ignore"):
        lse = np.log(np.exp(shifted).sum(axis=-1, keepdims=True))
    return shifted - lse


@dataclass
class OptimizerState:
    """Adam moments for a list of parameter arrays; ``lr_scale`` rescales per array."""

    lr: float = 0.01
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    step: int = 0
    m: list = field(default_factory=list)
    v: list = field(default_factory=list)
    lr_scale: list = field(default_factory=list)

    @classmethod
    def for_params(cls, params, lr=0.01, lr_scale=None, **kw):
        scale = [1.0] * len(params) if lr_scale is None else list(lr_scale)
        return cls(
            lr=lr,
            m=[np.zeros_like(p) for p in params],
            v=[np.zeros_like(p) for p in params],
            lr_scale=scale,
            **kw,
        )


def adam_step(params, grads, opt: OptimizerState):
    """Bias-corrected Adam update of ``params`` in place."""
    if not opt.m:
        opt.m = [np.zeros_like(p) for p in params]
        opt.v = [np.zeros_like(p) for p in params]
        opt.lr_scale = opt.lr_scale or [1.0] * len(params)
    opt.step += 1
    c1 = 1.0 - opt.beta1**opt.step
    c2 = 1.0 - opt.beta2**opt.step
    for p, g, m, v, s in zip(params, grads, opt.m, opt.v, opt.lr_scale):
        m *= opt.beta1
        m += (1.0 - opt.beta1) * g
        v *= opt.beta2
        v += (1.0 - opt.beta2) * g * g
        p -= (opt.lr * s) * (m / c1) / (np.sqrt(v / c2) + opt.eps)
    return params
