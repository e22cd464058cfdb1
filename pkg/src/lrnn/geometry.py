"""Domain boxes, analytic interfaces and subdomain classification.

Every interface is a signed level set ``phi`` that is negative in the inner
region.  Interfaces in a :class:`GeometrySpec` are ordered innermost first, so
the subdomain index of a point is the number of interfaces it lies outside of.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import (
    AmbiguousPoint,
    InvalidGeometry,
    NotOnInterface,
    PointOutsideDomain,
)

ON_INTERFACE_TOL = 1e-10
AMBIGUOUS_TOL = 1e-12


def _as_points(x, dim: Optional[int] = None) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        x = x[None, :]
    if dim is not None and x.shape[1] != dim:
        raise InvalidGeometry(f"expected points with {dim} coordinates, got {x.shape[1]}")
    return x


def _times(t, n: int) -> Optional[np.ndarray]:
    if t is None:
        return None
    return np.broadcast_to(np.asarray(t, dtype=float), (n,))


@dataclass(frozen=True)
class DomainBox:
    lo: tuple
    hi: tuple

    def __post_init__(self):
        lo = tuple(float(v) for v in self.lo)
        hi = tuple(float(v) for v in self.hi)
        if len(lo) != len(hi) or not lo:
            raise InvalidGeometry("lo and hi must be non-empty and of equal length")
        if any(a >= b for a, b in zip(lo, hi)):
            raise InvalidGeometry(f"degenerate box: lo={lo}, hi={hi}")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def cube(cls, lo: float, hi: float, dim: int) -> "DomainBox":
        return cls((lo,) * dim, (hi,) * dim)

    @property
    def dim(self) -> int:
        return len(self.lo)

    @property
    def volume(self) -> float:
        return float(np.prod(np.subtract(self.hi, self.lo)))

    def face_measures(self) -> np.ndarray:
        """Measures of the 2*dim faces, ordered (axis 0 lo, axis 0 hi, axis 1 lo, ...)."""
        widths = np.subtract(self.hi, self.lo)
        out = []
        for k in range(self.dim):
            m = float(np.prod(np.delete(widths, k))) if self.dim > 1 else 1.0
            out += [m, m]
        return np.array(out)

    def contains(self, x, strict: bool = True) -> np.ndarray:
        x = _as_points(x, self.dim)
        lo, hi = np.array(self.lo), np.array(self.hi)
        if strict:
            return np.all((x > lo) & (x < hi), axis=1)
        return np.all((x >= lo) & (x <= hi), axis=1)

    def uniform(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return rng.uniform(self.lo, self.hi, size=(n, self.dim))


class Interface:
    """Base class for analytic interfaces.

    Subclasses provide the level set, its spatial gradient and a sampler.
    ``moving`` interfaces depend on time; static ones ignore ``t``.
    """

    moving = False
    dim: int

    def level_set(self, x, t=None) -> np.ndarray:
        raise NotImplementedError

    def gradient(self, x, t=None) -> np.ndarray:
        raise NotImplementedError

    def sample(self, rng, n, box, time_horizon=None, measure="parameter"):
        """Return ``(x, t)`` for ``n`` random interface points (``t`` is None when elliptic)."""
        raise NotImplementedError

    def normal(self, x, t=None) -> np.ndarray:
        g = self.gradient(x, t)
        return g / np.linalg.norm(g, axis=1, keepdims=True)


def _sample_times(rng, n, time_horizon):
    if time_horizon is None:
        return None
    return rng.uniform(0.0, time_horizon, size=n)


@dataclass(frozen=True)
class PolarCurve(Interface):
    """Star-shaped curve ``|x - c| = r(theta)`` with
    ``r(theta) = r0 + sin_amp*sin(freq*theta) + cos_amp*cos(freq*theta)``."""

    center: tuple
    r0: float
    sin_amp: float = 0.0
    cos_amp: float = 0.0
    freq: int = 1
    dim: int = field(default=2, init=False)

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(float(c) for c in self.center))
        if len(self.center) != 2:
            raise InvalidGeometry("PolarCurve is two-dimensional")
        theta = np.linspace(0.0, 2 * np.pi, 20001)
        if np.min(self.radius(theta)) <= 0:
            raise InvalidGeometry("polar radius must stay positive")

    def radius(self, theta):
        k = self.freq
        return self.r0 + self.sin_amp * np.sin(k * theta) + self.cos_amp * np.cos(k * theta)

    def radius_prime(self, theta):
        k = self.freq
        return k * (self.sin_amp * np.cos(k * theta) - self.cos_amp * np.sin(k * theta))

    def _polar(self, x):
        x = _as_points(x, 2)
        dx = x[:, 0] - self.center[0]
        dy = x[:, 1] - self.center[1]
        return dx, dy, np.arctan2(dy, dx)

    def level_set(self, x, t=None):
        dx, dy, theta = self._polar(x)
        return dx**2 + dy**2 - self.radius(theta) ** 2

    def gradient(self, x, t=None):
        dx, dy, theta = self._polar(x)
        rho2 = dx**2 + dy**2
        rr = self.radius(theta) * self.radius_prime(theta)
        # grad(theta) = (-dy, dx) / rho^2
        gx = 2 * dx + 2 * rr * dy / rho2
        gy = 2 * dy - 2 * rr * dx / rho2
        return np.stack([gx, gy], axis=1)

    def point(self, theta) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        r = self.radius(theta)
        return np.stack(
            [self.center[0] + r * np.cos(theta), self.center[1] + r * np.sin(theta)], axis=-1
        )

    def speed(self, theta):
        """``|dx/dtheta|``, the arclength density."""
        return np.hypot(self.radius(theta), self.radius_prime(theta))

    def sample(self, rng, n, box, time_horizon=None, measure="parameter"):
        if measure == "parameter":
            theta = rng.uniform(0.0, 2 * np.pi, size=n)
        elif measure == "arclength":
            grid = np.linspace(0.0, 2 * np.pi, 4097)
            bound = 1.05 * float(np.max(self.speed(grid)))
            theta = _rejection(rng, n, lambda k: rng.uniform(0.0, 2 * np.pi, size=k),
                               lambda th: self.speed(th) / bound)
        else:
            raise InvalidGeometry(f"unknown interface measure {measure!r}")
        return self.point(theta), _sample_times(rng, n, time_horizon)


@dataclass(frozen=True)
class Sphere(Interface):
    """``|x - c| = radius`` in any dimension (a circle when ``dim == 2``)."""

    center: tuple
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(float(c) for c in self.center))
        if self.radius <= 0:
            raise InvalidGeometry("sphere radius must be positive")

    @property
    def dim(self) -> int:
        return len(self.center)

    def level_set(self, x, t=None):
        d = _as_points(x, self.dim) - np.array(self.center)
        return np.sum(d**2, axis=1) - self.radius**2

    def gradient(self, x, t=None):
        return 2 * (_as_points(x, self.dim) - np.array(self.center))

    def point(self, angles) -> np.ndarray:
        """Map spherical angles to a surface point.

        2-D: ``angles`` is the polar angle.  3-D: ``(polar, azimuth)`` with the
        polar angle measured from the +z axis.
        """
        c = np.array(self.center)
        if self.dim == 2:
            th = float(np.atleast_1d(angles)[0])
            return c + self.radius * np.array([math.cos(th), math.sin(th)])
        if self.dim == 3:
            pol, az = angles
            return c + self.radius * np.array(
                [math.sin(pol) * math.cos(az), math.sin(pol) * math.sin(az), math.cos(pol)]
            )
        raise InvalidGeometry("angle parametrization only for dim 2 and 3")

    def sample(self, rng, n, box, time_horizon=None, measure="parameter"):
        if measure not in ("parameter", "arclength"):
            raise InvalidGeometry(f"unknown interface measure {measure!r}")
        c = np.array(self.center)
        if self.dim == 2:
            th = rng.uniform(0.0, 2 * np.pi, size=n)
            u = np.stack([np.cos(th), np.sin(th)], axis=1)
        elif self.dim == 3:
            # (cos polar, azimuth) is an equal-area parametrization
            z = rng.uniform(-1.0, 1.0, size=n)
            az = rng.uniform(0.0, 2 * np.pi, size=n)
            s = np.sqrt(1.0 - z**2)
            u = np.stack([s * np.cos(az), s * np.sin(az), z], axis=1)
        else:
            u = rng.standard_normal((n, self.dim))
            u /= np.linalg.norm(u, axis=1, keepdims=True)
        return c + self.radius * u, _sample_times(rng, n, time_horizon)


@dataclass(frozen=True)
class Hyperplane(Interface):
    """``x[axis] = offset``; the inner side is ``x[axis] < offset``."""

    axis: int
    offset: float
    dim: int

    def __post_init__(self):
        if not 0 <= self.axis < self.dim:
            raise InvalidGeometry("hyperplane axis out of range")

    def level_set(self, x, t=None):
        return _as_points(x, self.dim)[:, self.axis] - self.offset

    def gradient(self, x, t=None):
        g = np.zeros_like(_as_points(x, self.dim))
        g[:, self.axis] = 1.0
        return g

    def sample(self, rng, n, box, time_horizon=None, measure="parameter"):
        x = box.uniform(rng, n)
        x[:, self.axis] = self.offset
        return x, _sample_times(rng, n, time_horizon)


@dataclass(frozen=True)
class MovingCircle(Interface):
    """Circle ``|x - c| = r0 + rate*t`` moving with time."""

    center: tuple
    r0: float
    rate: float
    moving = True
    dim: int = field(default=2, init=False)

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(float(c) for c in self.center))
        if self.r0 <= 0:
            raise InvalidGeometry("initial radius must be positive")

    def radius(self, t):
        return self.r0 + self.rate * np.asarray(t, dtype=float)

    def _t(self, t, n):
        if t is None:
            raise InvalidGeometry("moving interface needs a time coordinate")
        return _times(t, n)

    def level_set(self, x, t=None):
        x = _as_points(x, 2)
        t = self._t(t, len(x))
        d = x - np.array(self.center)
        return np.sum(d**2, axis=1) - self.radius(t) ** 2

    def gradient(self, x, t=None):
        # spatial gradient at fixed t
        return 2 * (_as_points(x, 2) - np.array(self.center))

    def point(self, theta, t) -> np.ndarray:
        r = float(self.radius(t))
        return np.array(self.center) + r * np.array([math.cos(theta), math.sin(theta)])

    def sample(self, rng, n, box, time_horizon=None, measure="parameter"):
        if time_horizon is None:
            raise InvalidGeometry("moving interface requires a time horizon")
        if measure == "parameter":
            theta = rng.uniform(0.0, 2 * np.pi, size=n)
            t = rng.uniform(0.0, time_horizon, size=n)
        elif measure == "arclength":
            rmax = max(float(self.radius(0.0)), float(self.radius(time_horizon)))

            def draw(k):
                return np.stack([rng.uniform(0.0, 2 * np.pi, size=k),
                                 rng.uniform(0.0, time_horizon, size=k)], axis=1)

            pt = _rejection(rng, n, draw, lambda p: self.radius(p[:, 1]) / rmax)
            theta, t = pt[:, 0], pt[:, 1]
        else:
            raise InvalidGeometry(f"unknown interface measure {measure!r}")
        r = self.radius(t)
        x = np.array(self.center) + r[:, None] * np.stack([np.cos(theta), np.sin(theta)], axis=1)
        return x, t


def _rejection(rng, n, draw, accept_prob):
    out = []
    have = 0
    while have < n:
        cand = draw(2 * (n - have) + 16)
        keep = cand[rng.uniform(size=len(cand)) < accept_prob(cand)]
        out.append(keep)
        have += len(keep)
    return np.concatenate(out)[:n]


@dataclass(frozen=True)
class InterfacePoint:
    x: np.ndarray
    normal: np.ndarray
    interface_label: int
    t: Optional[float] = None


@dataclass(frozen=True)
class GeometrySpec:
    """A box split into nested subdomains by ordered interfaces.

    ``interfaces[i]`` separates subdomain ``i`` (inside) from ``i + 1``
    (outside).  ``time_horizon`` is set only for parabolic problems.
    """

    box: DomainBox
    interfaces: tuple
    time_horizon: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "interfaces", tuple(self.interfaces))
        if not self.interfaces:
            raise InvalidGeometry("at least one interface is required")
        if self.time_horizon is not None and self.time_horizon <= 0:
            raise InvalidGeometry("time horizon must be positive")
        for iface in self.interfaces:
            if iface.dim != self.box.dim:
                raise InvalidGeometry("interface dimension differs from box dimension")
            if iface.moving and self.time_horizon is None:
                raise InvalidGeometry("moving interface in a stationary geometry")
        self._check_nesting()

    def _check_nesting(self, n: int = 512):
        rng = np.random.default_rng(12345)
        for i, iface in enumerate(self.interfaces):
            x, t = iface.sample(rng, n, self.box, self.time_horizon)
            if not np.all(self.box.contains(x)):
                raise InvalidGeometry(f"interface {i} leaves the domain box")
            for j, other in enumerate(self.interfaces):
                if j == i:
                    continue
                phi = other.level_set(x, t)
                ok = phi > 0 if j < i else phi < 0
                if not np.all(ok):
                    raise InvalidGeometry(
                        f"interfaces {i} and {j} intersect or are not ordered innermost-first"
                    )

    @property
    def dim(self) -> int:
        return self.box.dim

    @property
    def n_subdomains(self) -> int:
        return len(self.interfaces) + 1

    @property
    def is_spacetime(self) -> bool:
        return self.time_horizon is not None

    def adjacent(self, label: int) -> tuple:
        """Return the (inner, outer) subdomain indices on either side of an interface."""
        return label, label + 1

    def level_sets(self, x, t=None) -> np.ndarray:
        """Matrix of level-set values, one column per interface."""
        x = _as_points(x, self.dim)
        t = _times(t, len(x))
        return np.stack([f.level_set(x, t) for f in self.interfaces], axis=1)

    def classify(self, x, t=None, strict: bool = True) -> np.ndarray:
        """Vectorized subdomain index of each point (no box check)."""
        phi = self.level_sets(x, t)
        if strict and np.any(np.abs(phi) < AMBIGUOUS_TOL):
            raise AmbiguousPoint("point lies on an interface")
        return np.sum(phi > 0, axis=1).astype(np.intp)

    def classify_robust(self, x, t=None) -> np.ndarray:
        """Classify, nudging points within 1e-12 of an interface by 1e-10 along its normal."""
        x = np.array(_as_points(x, self.dim))
        tt = _times(t, len(x))
        phi = self.level_sets(x, tt)
        close = np.abs(phi) < AMBIGUOUS_TOL
        if np.any(close):
            for j, iface in enumerate(self.interfaces):
                rows = np.nonzero(close[:, j])[0]
                if len(rows):
                    tj = None if tt is None else tt[rows]
                    x[rows] += 1e-10 * iface.normal(x[rows], tj)
        return self.classify(x, tt, strict=False)


def classify_point(geom: GeometrySpec, x, t=None) -> int:
    """Subdomain index (0-based, increasing outward) of a single point."""
    x = _as_points(x, geom.dim)
    if len(x) != 1:
        raise InvalidGeometry("classify_point takes a single point; use GeometrySpec.classify")
    if not geom.box.contains(x)[0]:
        raise PointOutsideDomain(f"{x[0]} is not inside the domain box")
    if t is not None and geom.time_horizon is not None and not 0 <= t <= geom.time_horizon:
        raise PointOutsideDomain(f"t={t} outside [0, {geom.time_horizon}]")
    return int(geom.classify(x, t)[0])


def interface_normal(iface: Interface, x, t=None) -> np.ndarray:
    """Unit spatial normal ``grad(phi)/|grad(phi)|`` at a point on the interface."""
    x = _as_points(x, iface.dim)
    if len(x) != 1:
        raise InvalidGeometry("interface_normal takes a single point")
    if abs(float(iface.level_set(x, t)[0])) >= ON_INTERFACE_TOL:
        raise NotOnInterface(f"{x[0]} is not on the interface")
    return iface.normal(x, t)[0]


def interface_parameter_to_point(iface: Interface, param, label: int = 0) -> InterfacePoint:
    """Map an interface parameter to a point with its normal attached.

    ``param`` is ``theta`` for a polar curve, ``(theta, t)`` for a moving
    circle and the spherical angles for a sphere.
    """
    t = None
    if isinstance(iface, MovingCircle):
        theta, t = param
        x = iface.point(theta, t)
    elif isinstance(iface, PolarCurve):
        x = iface.point(float(param))
    elif isinstance(iface, Sphere):
        x = iface.point(param)
    else:
        raise InvalidGeometry(f"{type(iface).__name__} has no angular parametrization")
    n = iface.normal(x[None, :], t)[0]
    return InterfacePoint(x=x, normal=n, interface_label=label, t=t)

