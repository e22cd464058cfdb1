"""Central finite differences of basis functions, plus exact derivatives for testing.

Every operator shifts the whole point set along one axis and re-evaluates the
basis, so one call differentiates all ``m`` features at once.  Stencils are
always central, including near the box boundary; tanh features are defined on
all of R^d.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import DimensionMismatch, InvalidShape, NoTimeAxis, UnsupportedDepth
from .randnet import RandomFeatureNetwork, _check_points, eval_basis


@dataclass(frozen=True)
class FdConfig:
    h1: float = 1e-6
    h2: float = 5e-4

    def __post_init__(self):
        if not (self.h1 > 0 and self.h2 > 0):
            raise InvalidShape("finite-difference steps must be positive")


def _shifted(points: np.ndarray, axis: int, h: float) -> np.ndarray:
    out = points.copy()
    out[:, axis] += h
    return out


def _check_axis(net: RandomFeatureNetwork, axis: int):
    if not 0 <= axis < net.d_in:
        raise DimensionMismatch(f"axis {axis} out of range for d_in={net.d_in}")


def fd_partial(net: RandomFeatureNetwork, axis: int, points, cfg: FdConfig = FdConfig()) -> np.ndarray:
    _check_axis(net, axis)
    p = _check_points(net, points)
    h = cfg.h1
    return (eval_basis(net, _shifted(p, axis, h)) - eval_basis(net, _shifted(p, axis, -h))) / (2 * h)


def fd_second_partial(
    net: RandomFeatureNetwork, axis: int, points, cfg: FdConfig = FdConfig(), center=None
) -> np.ndarray:
    """Second central difference with step ``h2``.

    ``center`` may pass a precomputed ``eval_basis(net, points)``.
    """
    _check_axis(net, axis)
    p = _check_points(net, points)
    h = cfg.h2
    if center is None:
        center = eval_basis(net, p)
    plus = eval_basis(net, _shifted(p, axis, h))
    minus = eval_basis(net, _shifted(p, axis, -h))
    return (plus - 2.0 * center + minus) / (h * h)


def spatial_axes(net: RandomFeatureNetwork) -> list:
    return [k for k in range(net.d_in) if k != net.time_axis]


def fd_laplacian(
    net: RandomFeatureNetwork,
    points,
    cfg: FdConfig = FdConfig(),
    spatial_dims: Optional[Sequence[int]] = None,
) -> np.ndarray:
    """Sum of second differences over ``spatial_dims`` (default: every non-time axis)."""
    p = _check_points(net, points)
    dims = spatial_axes(net) if spatial_dims is None else list(spatial_dims)
    for k in dims:
        _check_axis(net, k)
        if k == net.time_axis:
            raise DimensionMismatch("the time axis is not a spatial dimension")
    center = eval_basis(net, p)
    out = np.zeros_like(center)
    for k in dims:
        out += fd_second_partial(net, k, p, cfg, center=center)
    return out


def fd_time_partial(net: RandomFeatureNetwork, points, cfg: FdConfig = FdConfig()) -> np.ndarray:
    if net.time_axis is None:
        raise NoTimeAxis("network has no time axis")
    return fd_partial(net, net.time_axis, points, cfg)


def fd_directional(
    net: RandomFeatureNetwork, points, directions, cfg: FdConfig = FdConfig(), axes=None
) -> np.ndarray:
    """``grad(psi) . n`` per point, with ``directions[i]`` the vector for row ``i``.

    ``axes`` lists the input axes the direction components refer to
    (default: spatial axes).
    """
    p = _check_points(net, points)
    axes = spatial_axes(net) if axes is None else list(axes)
    directions = np.asarray(directions, dtype=float)
    if directions.shape != (len(p), len(axes)):
        raise DimensionMismatch("one direction component per listed axis is required")
    out = np.zeros((len(p), net.m))
    for j, k in enumerate(axes):
        nk = directions[:, j]
        if np.any(nk != 0):
            out += nk[:, None] * fd_partial(net, k, p, cfg)
    return out


def analytic_derivatives(net: RandomFeatureNetwork, points):
    """Exact first derivatives and Hessian diagonals of a single-hidden-layer tanh basis.

    Returns ``(grad, hess_diag)``, each of shape ``(d_in, N, m)``.
    """
    if len(net.weights) != 1:
        raise UnsupportedDepth("analytic derivatives need exactly one hidden layer")
    p = _check_points(net, points)
    w, b = net.weights[0], net.biases[0]
    s = np.tanh(p @ w.T + b)
    ds = 1.0 - s * s
    d2s = -2.0 * s * ds
    grad = np.stack([ds * w[:, k] for k in range(net.d_in)])
    hess = np.stack([d2s * w[:, k] ** 2 for k in range(net.d_in)])
    return grad, hess
