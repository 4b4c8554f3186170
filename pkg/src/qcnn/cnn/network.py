"""The 1-D CNN template: shape propagation, parameters, forward and backward pass.

Activations are carried as ``(batch, groups, channels, length)`` while in the
convolutional stages and as ``(batch, features)`` afterwards.  The ten parallel
branches are one grouped 1x1 convolution with ``groups=10``; concatenation is a
reshape to ``10n`` channels (branch-major).  Pooling flattens channel-major and
takes the max over adjacent pairs, padding an odd tail with ``-inf``.  After
the first pooling the features are read as a single-channel sequence.

Stage layout for input size n::

    input (1, 1, n)
    10 branches x 5 [conv1x1 -> n channels, ReLU]     (10, n, n)
    concat                                            (1, 10n, n)
    maxpool 2                                         (5n^2,)
    10 x [conv1x1 -> n channels, ReLU]                (1, n, 5n^2)
    maxpool 2                                         (ceil(5n^3 / 2),)
    linear w1, ReLU, linear w2, ReLU, linear w3, ReLU, linear 2
    softmax, 2-node decoder
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass

import numpy as np

BRANCHES = 10
BRANCH_DEPTH = 5
TRUNK_DEPTH = 10
PROB_FLOOR = 1e-12
# Plain ReLU collapses this narrow single-channel trunk to all-zero activations
# under He init; a small leak keeps gradients flowing.
DEFAULT_NEGATIVE_SLOPE = 0.01


class ShapeError(ValueError):
    """Input or parameter shapes do not match the network."""


@dataclass(frozen=True)
class LayerSpec:
    """One stage.  Conv shapes are ``(groups, channels, length)``."""

    kind: str
    in_shape: tuple[int, ...]
    out_shape: tuple[int, ...]

    @property
    def param_shapes(self) -> tuple[tuple[int, ...], ...]:
        if self.kind == "conv1x1":
            groups, out_ch, _ = self.out_shape
            return (groups, out_ch, self.in_shape[1]), (groups, out_ch)
        if self.kind == "linear":
            return (self.out_shape[0], self.in_shape[0]), (self.out_shape[0],)
        return ()

    @property
    def fan_in(self) -> int:
        return self.in_shape[1] if self.kind == "conv1x1" else self.in_shape[0]


@dataclass(frozen=True)
class NetworkSpec:
    n: int
    linear_widths: tuple[int, int, int, int]
    stages: tuple[LayerSpec, ...]
    negative_slope: float = DEFAULT_NEGATIVE_SLOPE

    @property
    def parametric(self) -> list[LayerSpec]:
        return [s for s in self.stages if s.param_shapes]

    def parameter_shapes(self) -> list[tuple[int, ...]]:
        return [shape for s in self.parametric for shape in s.param_shapes]

    @property
    def parameter_count(self) -> int:
        return sum(math.prod(s) for s in self.parameter_shapes())

    @property
    def layer_count(self) -> int:
        return len(self.stages)


def default_widths(n: int) -> tuple[int, int, int, int]:
    return (32 * n, 16 * n, 8 * n, 2)


def build_template_network(n: int, linear_widths=None, negative_slope: float = DEFAULT_NEGATIVE_SLOPE) -> NetworkSpec:
    if not isinstance(n, (int, np.integer)) or not 1 <= n <= 4:
        raise ValueError(f"input size n must lie in 1..4, got {n!r}")
    widths = tuple(int(w) for w in (linear_widths or default_widths(n)))
    if len(widths) != 4 or widths[-1] != 2 or any(w < 1 for w in widths):
        raise ValueError(f"need four positive linear widths ending in 2, got {widths}")
    if any(b >= a for a, b in zip(widths, widths[1:])):
        raise ValueError(f"linear widths must strictly decrease, got {widths}")

    stages: list[LayerSpec] = [LayerSpec("input", (n,), (1, 1, n))]
    shape = (1, 1, n)

    def conv(groups):
        nonlocal shape
        out = (groups, n, shape[2])
        stages.append(LayerSpec("conv1x1", shape, out))
        stages.append(LayerSpec("relu", out, out))
        shape = out

    def pool():
        nonlocal shape
        flat = math.prod(shape)
        out = ((flat + 1) // 2,)
        stages.append(LayerSpec("maxpool", shape, out))
        shape = out

    for _ in range(BRANCH_DEPTH):
        conv(BRANCHES)
    concat = (1, BRANCHES * n, n)
    stages.append(LayerSpec("concat", shape, concat))
    shape = concat
    pool()
    shape = (1, 1, shape[0])
    for _ in range(TRUNK_DEPTH):
        conv(1)
    pool()
    for i, width in enumerate(widths):
        out = (width,)
        stages.append(LayerSpec("linear", shape, out))
        if i < 3:
            stages.append(LayerSpec("relu", out, out))
        shape = out
    stages.append(LayerSpec("softmax", shape, shape))
    stages.append(LayerSpec("output", shape, shape))
    return NetworkSpec(n, widths, tuple(stages), float(negative_slope))


def count_layers(spec: NetworkSpec) -> int:
    """Layer count with each branch counted separately and activations folded
    into the layer they follow."""
    total = 0
    for s in spec.stages:
        if s.kind == "conv1x1":
            total += s.out_shape[0]
        elif s.kind != "relu":
            total += 1
    return total


# ---------------------------------------------------------------------------
# parameters
# ---------------------------------------------------------------------------

class Parameters:
    """Weights and biases in stage order: ``[W0, b0, W1, b1, ...]``."""

    def __init__(self, arrays):
        self.arrays = [np.ascontiguousarray(a, dtype=np.float64) for a in arrays]

    def __len__(self):
        return len(self.arrays)

    def __iter__(self):
        return iter(self.arrays)

    def __getitem__(self, i):
        return self.arrays[i]

    def copy(self) -> "Parameters":
        return Parameters([a.copy() for a in self.arrays])

    def flat(self) -> np.ndarray:
        return np.concatenate([a.ravel() for a in self.arrays])

    @classmethod
    def from_flat(cls, spec: NetworkSpec, flat) -> "Parameters":
        flat = np.asarray(flat, dtype=np.float64)
        if flat.size != spec.parameter_count:
            raise ShapeError(f"expected {spec.parameter_count} parameters, got {flat.size}")
        out, pos = [], 0
        for shape in spec.parameter_shapes():
            size = math.prod(shape)
            out.append(flat[pos:pos + size].reshape(shape).copy())
            pos += size
        return cls(out)

    def checksum(self) -> str:
        h = hashlib.sha256()
        for a in self.arrays:
            h.update(a.astype("<f8").tobytes())
        return h.hexdigest()

    def check(self, spec: NetworkSpec) -> None:
        expected = spec.parameter_shapes()
        got = [a.shape for a in self.arrays]
        if got != expected:
            raise ShapeError(f"parameter shapes {got} do not match network {expected}")


def zero_parameters(spec: NetworkSpec) -> Parameters:
    return Parameters([np.zeros(s) for s in spec.parameter_shapes()])


def init_parameters(spec: NetworkSpec, rng) -> Parameters:
    """He initialization: weights ~ N(0, 2 / fan_in), zero biases."""
    arrays = []
    for layer in spec.parametric:
        w_shape, b_shape = layer.param_shapes
        arrays.append(rng.normal(w_shape) * math.sqrt(2.0 / layer.fan_in))
        arrays.append(np.zeros(b_shape))
    return Parameters(arrays)


# ---------------------------------------------------------------------------
# forward / backward
# ---------------------------------------------------------------------------

def _as_batch(spec: NetworkSpec, x) -> tuple[np.ndarray, bool]:
    x = np.asarray(x, dtype=np.float64)
    single = x.ndim == 1
    if single:
        x = x[None, :]
    if x.ndim != 2 or x.shape[1] != spec.n:
        raise ShapeError(f"network expects tuples of {spec.n} measurements, got shape {x.shape}")
    return x, single


def _softmax(z: np.ndarray) -> np.ndarray:
    z = z - z.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


def _forward(spec: NetworkSpec, params: Parameters, x: np.ndarray, keep: bool):
    """Run every stage; returns probabilities and (optionally) per-stage caches."""
    params.check(spec)
    batch = x.shape[0]
    h = x.reshape(batch, 1, 1, spec.n)
    caches = []
    p = 0
    for layer in spec.stages:
        kind = layer.kind
        cache = None
        if kind == "conv1x1":
            w, b = params[p], params[p + 1]
            p += 2
            h_in = h.reshape((batch,) + layer.in_shape)
            cache = h_in
            h = np.matmul(w, h_in) + b[None, :, :, None]
        elif kind == "linear":
            w, b = params[p], params[p + 1]
            p += 2
            cache = h
            h = h @ w.T + b
        elif kind == "relu":
            cache = h > 0
            h = np.where(cache, h, spec.negative_slope * h)
        elif kind == "concat":
            h = h.reshape((batch,) + layer.out_shape)
        elif kind == "maxpool":
            flat = h.reshape(batch, -1)
            width = flat.shape[1]
            if width % 2:
                flat = np.concatenate([flat, np.full((batch, 1), -np.inf)], axis=1)
            pairs = flat.reshape(batch, -1, 2)
            choice = np.argmax(pairs, axis=2)
            h = np.take_along_axis(pairs, choice[:, :, None], axis=2)[:, :, 0]
            cache = (choice, width, layer.in_shape)
        elif kind == "softmax":
            cache = h
            h = _softmax(h)
        if keep:
            caches.append(cache)
    return h, caches


def forward(spec: NetworkSpec, params: Parameters, x) -> np.ndarray:
    """Class probabilities ``(p_in_control, p_out_of_control)``.

    ``x`` is one tuple of n measurements or an ``(N, n)`` array.
    """
    x, single = _as_batch(spec, x)
    probs, _ = _forward(spec, params, x, keep=False)
    return probs[0] if single else probs


def loss(probabilities, label) -> float:
    """Cross-entropy ``-log p[label]`` with the probability floored at 1e-12.

    Batched input returns the mean over rows.
    """
    probs = np.asarray(probabilities, dtype=np.float64)
    labels = np.asarray(label).astype(np.int64)
    if probs.ndim == 1:
        return float(-np.log(max(probs[int(labels)], PROB_FLOOR)))
    picked = probs[np.arange(len(probs)), labels]
    return float(np.mean(-np.log(np.maximum(picked, PROB_FLOOR))))


def backward(spec: NetworkSpec, params: Parameters, x, labels):
    """Mean batch cross-entropy and its gradient for every parameter array.

    Returns ``(loss, gradients)`` with gradients in the order of ``params``.
    """
    x, _ = _as_batch(spec, x)
    labels = np.asarray(labels).astype(np.int64).reshape(-1)
    if len(labels) != len(x) or len(x) == 0:
        raise ShapeError("need one label per tuple in a nonempty batch")
    batch = len(x)
    probs, caches = _forward(spec, params, x, keep=True)
    picked = probs[np.arange(batch), labels]
    value = float(np.mean(-np.log(np.maximum(picked, PROB_FLOOR))))

    g = probs.copy()
    g[np.arange(batch), labels] -= 1.0
    g[picked < PROB_FLOOR] = 0.0  # floored rows have a constant loss
    g /= batch

    grads: list[np.ndarray] = [None] * len(params)  # type: ignore[list-item]
    p = len(params)
    stages = spec.stages
    # The softmax stage gradient is folded into g above; start below it.
    for index in range(len(stages) - 1, -1, -1):
        layer = stages[index]
        kind = layer.kind
        cache = caches[index]
        if kind in ("softmax", "output", "input"):
            continue
        if kind == "linear":
            p -= 2
            w = params[p]
            grads[p] = g.T @ cache
            grads[p + 1] = g.sum(axis=0)
            g = g @ w
        elif kind == "relu":
            g = np.where(cache, g, spec.negative_slope * g)
        elif kind == "conv1x1":
            p -= 2
            w = params[p]
            h_in = cache
            g = g.reshape((batch,) + layer.out_shape)
            grads[p] = np.matmul(g, np.swapaxes(h_in, -1, -2)).sum(axis=0)
            grads[p + 1] = g.sum(axis=(0, 3))
            g = np.matmul(np.swapaxes(w, -1, -2), g)
            if h_in.shape[1] == 1 and g.shape[1] > 1:
                g = g.sum(axis=1, keepdims=True)
        elif kind == "maxpool":
            choice, width, in_shape = cache
            full = np.zeros((batch, choice.shape[1], 2))
            g = g.reshape(batch, -1)
            np.put_along_axis(full, choice[:, :, None], g[:, :, None], axis=2)
            g = full.reshape(batch, -1)[:, :width].reshape((batch,) + in_shape)
        elif kind == "concat":
            g = g.reshape((batch,) + layer.in_shape)
    return value, grads
