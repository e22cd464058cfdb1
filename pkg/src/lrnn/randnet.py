"""Randomized networks with frozen hidden layers.

Only the linear output layer is ever solved for, so a network here is just a
basis ``psi_1..psi_m`` of tanh features.  Each hidden layer draws its weights
and biases from its own :class:`numpy.random.SeedSequence` child, keyed by
``(seed, *stream, layer)``; adding layers or networks never perturbs the
draws of existing ones.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import DimensionMismatch, InvalidShape


class Activation(enum.Enum):
    TANH = "tanh"


@dataclass(frozen=True, eq=False)
class RandomFeatureNetwork:
    weights: tuple
    biases: tuple
    seed: int
    stream: tuple
    r_weight: float
    r_bias: float
    activation: Activation = Activation.TANH
    time_axis: Optional[int] = None

    @property
    def d_in(self) -> int:
        return self.weights[0].shape[1]

    @property
    def widths(self) -> tuple:
        return tuple(w.shape[0] for w in self.weights)

    @property
    def depth(self) -> int:
        """Depth D in the layered sense: hidden layers plus the linear output layer."""
        return len(self.weights) + 1

    @property
    def m(self) -> int:
        return self.weights[-1].shape[0]

    def describe(self) -> dict:
        return {
            "seed": self.seed,
            "stream": list(self.stream),
            "d_in": self.d_in,
            "widths": list(self.widths),
            "r_weight": self.r_weight,
            "r_bias": self.r_bias,
            "activation": self.activation.value,
        }


def layer_rng(seed: int, stream: Sequence[int], layer: int) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(*map(int, stream), int(layer)))
    return np.random.Generator(np.random.PCG64(ss))


def build_network(
    seed: int,
    d_in: int,
    hidden_widths: Sequence[int],
    r_weight: float,
    r_bias: float,
    stream: Sequence[int] = (),
    time_axis: Optional[int] = None,
) -> RandomFeatureNetwork:
    """Draw a network with i.i.d. ``U(-r_weight, r_weight)`` weights and
    ``U(-r_bias, r_bias)`` biases in every hidden layer.

    ``stream`` separates independent networks built from the same seed
    (e.g. one per subdomain).  ``time_axis`` marks the input column holding
    time for space-time networks.
    """
    widths = [int(w) for w in hidden_widths]
    if d_in < 1 or not widths or min(widths) < 1:
        raise InvalidShape(f"invalid network shape d_in={d_in}, widths={widths}")
    if r_weight < 0 or r_bias < 0:
        raise InvalidShape("init ranges must be non-negative")
    if time_axis is not None and not 0 <= time_axis < d_in:
        raise InvalidShape("time axis outside the input dimension")
    weights, biases = [], []
    fan_in = d_in
    for layer, width in enumerate(widths):
        rng = layer_rng(seed, stream, layer)
        weights.append(rng.uniform(-r_weight, r_weight, size=(width, fan_in)))
        biases.append(rng.uniform(-r_bias, r_bias, size=width))
        fan_in = width
    for a in (*weights, *biases):
        a.setflags(write=False)
    return RandomFeatureNetwork(
        weights=tuple(weights),
        biases=tuple(biases),
        seed=int(seed),
        stream=tuple(int(s) for s in stream),
        r_weight=float(r_weight),
        r_bias=float(r_bias),
        time_axis=time_axis,
    )


def _check_points(net: RandomFeatureNetwork, points) -> np.ndarray:
    points = np.asarray(points, dtype=float)
    if points.ndim == 1 and points.size == 0:
        points = points.reshape(0, net.d_in)
    if points.ndim != 2 or points.shape[1] != net.d_in:
        raise DimensionMismatch(f"points must have shape (N, {net.d_in}), got {points.shape}")
    return points


def eval_basis(net: RandomFeatureNetwork, points) -> np.ndarray:
    """``N x m`` matrix whose row ``i`` is ``psi(x_i)``."""
    h = _check_points(net, points)
    for w, b in zip(net.weights, net.biases):
        h = np.tanh(h @ w.T + b)
    return h


def eval_solution(net: RandomFeatureNetwork, alpha, points) -> np.ndarray:
    alpha = np.asarray(alpha, dtype=float)
    if alpha.shape != (net.m,):
        raise DimensionMismatch(f"alpha must have length {net.m}, got shape {alpha.shape}")
    return eval_basis(net, points) @ alpha
