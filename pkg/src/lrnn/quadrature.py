"""Gauss-Legendre and Monte Carlo rules for relative L2 errors."""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np

from .errors import InvalidShape, ZeroDenominator
from .geometry import GeometrySpec


@lru_cache(maxsize=64)
def _gl_cached(n: int):
    x = np.empty(n)
    w = np.empty(n)
    for i in range(n):
        # Tricomi initial guess for the i-th root
        z = math.cos(math.pi * (i + 0.75) / (n + 0.5))
        for _ in range(100):
            p0, p1 = 1.0, z
            for k in range(2, n + 1):
                p0, p1 = p1, ((2 * k - 1) * z * p1 - (k - 1) * p0) / k
            dp = n * (z * p1 - p0) / (z * z - 1.0)
            dz = p1 / dp
            z -= dz
            if abs(dz) < 1e-15:
                break
        # recompute derivative at the converged root
        p0, p1 = 1.0, z
        for k in range(2, n + 1):
            p0, p1 = p1, ((2 * k - 1) * z * p1 - (k - 1) * p0) / k
        dp = n * (z * p1 - p0) / (z * z - 1.0)
        x[i] = z
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp)
    order = np.argsort(x)
    x, w = x[order], w[order]
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def gauss_legendre_1d(n: int):
    """Nodes and weights of the ``n``-point rule on [-1, 1], ascending.

    Roots of P_n are found by Newton iteration on the three-term recurrence.
    """
    if n < 1:
        raise InvalidShape("need at least one quadrature node")
    x, w = _gl_cached(int(n))
    return x.copy(), w.copy()


@dataclass(frozen=True)
class QuadratureRule:
    kind: str = "gauss"  # "gauss" (tensor Gauss-Legendre) or "mc"
    nodes_per_axis: int = 20
    n_samples: int = 10_000
    seed: int = 0

    def __post_init__(self):
        if self.kind not in ("gauss", "mc"):
            raise InvalidShape(f"unknown quadrature kind {self.kind!r}")
        if self.nodes_per_axis < 1 or self.n_samples < 1:
            raise InvalidShape("quadrature sizes must be positive")


def tensor_gauss_nodes(lo, hi, n: int):
    """Tensor-product nodes ``(P, d)`` and weights ``(P,)`` mapped to the box ``[lo, hi]``."""
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    x, w = gauss_legendre_1d(n)
    d = len(lo)
    half = (hi - lo) / 2
    axes = [lo[k] + half[k] * (x + 1.0) for k in range(d)]
    pts = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, d)
    wts = np.ones(1)
    for k in range(d):
        wts = np.multiply.outer(wts, w * half[k]).reshape(-1)
    return pts, wts


def _integration_box(geom: GeometrySpec):
    lo, hi = list(geom.box.lo), list(geom.box.hi)
    if geom.time_horizon is not None:
        lo.append(0.0)
        hi.append(geom.time_horizon)
    return np.array(lo), np.array(hi)


def integration_points(geom: GeometrySpec, rule: QuadratureRule):
    """Nodes and weights over the domain (or space-time cylinder), with times split off."""
    lo, hi = _integration_box(geom)
    if rule.kind == "gauss":
        pts, wts = tensor_gauss_nodes(lo, hi, rule.nodes_per_axis)
    else:
        rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(rule.seed), spawn_key=(3,))))
        pts = rng.uniform(lo, hi, size=(rule.n_samples, len(lo)))
        wts = np.full(rule.n_samples, float(np.prod(hi - lo)) / rule.n_samples)
    d = geom.dim
    t = pts[:, d] if geom.time_horizon is not None else None
    return pts[:, :d], t, wts


def _ratio(num: float, den: float) -> float:
    if den < 1e-300:
        raise ZeroDenominator("reference solution has vanishing L2 norm")
    return math.sqrt(num / den)


def relative_l2_error(
    approx: Callable, exact: Callable, geom: GeometrySpec, rule: QuadratureRule = QuadratureRule(),
    chunk: int = 20_000,
) -> float:
    """``||u - u_rho|| / ||u||`` over the domain.

    ``approx(x, t, sub)`` and ``exact(x, t, sub)`` take points, times (None
    when elliptic) and per-point subdomain indices, and return values of
    shape ``(P,)`` or ``(P, k)`` for vector fields.  A
    :class:`~lrnn.solution.SolutionCoefficients` is accepted for ``approx``.
    """
    x, t, w = integration_points(geom, rule)
    num = den = 0.0
    for a in range(0, len(x), chunk):
        xs = x[a:a + chunk]
        ts = None if t is None else t[a:a + chunk]
        sub = geom.classify_robust(xs, ts)
        ue = np.asarray(exact(xs, ts, sub), dtype=float)
        ua = np.asarray(approx(xs, ts, sub), dtype=float)
        diff = (ue - ua) ** 2
        mag = ue**2
        if diff.ndim == 2:
            diff = diff.sum(axis=1)
            mag = mag.sum(axis=1)
        num += float(w[a:a + chunk] @ diff)
        den += float(w[a:a + chunk] @ mag)
    return _ratio(num, den)


def relative_l2_error_flux(approx_flux: Callable, exact_flux: Callable, geom, rule=QuadratureRule()) -> float:
    """Vector-field version: ``||p - p_rho|| / ||p||`` with componentwise squared sums."""
    return relative_l2_error(approx_flux, exact_flux, geom, rule)


def slice_relative_l2_error(approx, exact, geom: GeometrySpec, t: float, nodes_per_axis: int = 20) -> float:
    """Relative L2 error over the spatial box at a fixed time."""
    x, w = tensor_gauss_nodes(geom.box.lo, geom.box.hi, nodes_per_axis)
    tt = np.full(len(x), float(t))
    sub = geom.classify_robust(x, tt)
    ue = np.asarray(exact(x, tt, sub), dtype=float)
    ua = np.asarray(approx(x, tt, sub), dtype=float)
    return _ratio(float(w @ (ue - ua) ** 2), float(w @ ue**2))
