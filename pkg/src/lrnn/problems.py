"""The six benchmark interface problems with closed-form data.

Each subdomain carries a manufactured solution together with its hand-derived
spatial gradient, Laplacian and time derivative.  Source, jump, flux-jump,
boundary and initial data are assembled from those pieces:

    f   = du/dt - beta_s * lap(u_s)
    g1  = u_in - u_out                                   on each interface
    g2  = beta_in grad(u_in).n - beta_out grad(u_out).n  (n points outward)
    g_D = u_s on the box boundary,  u0 = u_s(., 0)
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import ConfigError, UnknownExample
from .geometry import DomainBox, GeometrySpec, Hyperplane, MovingCircle, PolarCurve, Sphere
from .quadrature import QuadratureRule
from .sampling import BOUNDARY, INTERIOR, SamplingPlan, interface_region


def _zero(x, t=None):
    return np.zeros(len(x))


@dataclass(frozen=True)
class Piece:
    """Exact solution on one subdomain.  All callables take ``(x, t)``; ``t`` may be None."""

    u: Callable
    grad: Callable
    lap: Callable
    dt: Callable = _zero


@dataclass(frozen=True, eq=False)
class ProblemDefinition:
    geom: GeometrySpec
    beta: tuple
    pieces: tuple
    name: str = "custom"

    def __post_init__(self):
        object.__setattr__(self, "beta", tuple(float(b) for b in self.beta))
        if len(self.beta) != self.geom.n_subdomains or len(self.pieces) != self.geom.n_subdomains:
            raise ConfigError("need one beta and one exact piece per subdomain")
        if min(self.beta) <= 0:
            raise ConfigError("diffusion coefficients must be positive")

    @property
    def is_spacetime(self) -> bool:
        return self.geom.is_spacetime

    def _per_sub(self, attr, x, t, sub, width=None):
        x = np.asarray(x, dtype=float)
        sub = np.asarray(sub)
        out = np.zeros((len(x),) if width is None else (len(x), width))
        for s in np.unique(sub):
            rows = sub == s
            ts = None if t is None else np.asarray(t)[rows]
            out[rows] = getattr(self.pieces[int(s)], attr)(x[rows], ts)
        return out

    def exact(self, x, t, sub):
        return self._per_sub("u", x, t, sub)

    def exact_grad(self, x, t, sub):
        return self._per_sub("grad", x, t, sub, width=self.geom.dim)

    def exact_flux(self, x, t, sub):
        """``p = beta * grad(u)``."""
        return np.asarray(self.beta)[np.asarray(sub)][:, None] * self.exact_grad(x, t, sub)

    def source(self, x, t, sub):
        beta = np.asarray(self.beta)[np.asarray(sub)]
        f = -beta * self._per_sub("lap", x, t, sub)
        if self.is_spacetime:
            f += self._per_sub("dt", x, t, sub)
        return f

    def jump(self, x, t, label: int):
        inner, outer = self.geom.adjacent(label)
        return self.pieces[inner].u(x, t) - self.pieces[outer].u(x, t)

    def flux_jump(self, x, t, normal, label: int):
        inner, outer = self.geom.adjacent(label)
        gi = np.sum(self.pieces[inner].grad(x, t) * normal, axis=1)
        go = np.sum(self.pieces[outer].grad(x, t) * normal, axis=1)
        return self.beta[inner] * gi - self.beta[outer] * go

    def dirichlet(self, x, t, sub):
        return self.exact(x, t, sub)

    def initial(self, x, sub):
        if not self.is_spacetime:
            raise ConfigError("stationary problems have no initial condition")
        return self.exact(x, np.zeros(len(x)), sub)


# --- exact solutions -----------------------------------------------------------


def _example1_pieces(b1, b2):
    def u1(x, t=None):
        return np.exp(x[:, 0] * x[:, 1]) / b1

    def g1(x, t=None):
        e = np.exp(x[:, 0] * x[:, 1]) / b1
        return np.stack([x[:, 1] * e, x[:, 0] * e], axis=1)

    def l1(x, t=None):
        return (x[:, 0] ** 2 + x[:, 1] ** 2) * np.exp(x[:, 0] * x[:, 1]) / b1

    def u2(x, t=None):
        return np.sin(x[:, 0]) * np.sin(x[:, 1]) / b2

    def g2(x, t=None):
        return np.stack([np.cos(x[:, 0]) * np.sin(x[:, 1]), np.sin(x[:, 0]) * np.cos(x[:, 1])], axis=1) / b2

    def l2(x, t=None):
        return -2.0 * np.sin(x[:, 0]) * np.sin(x[:, 1]) / b2

    return Piece(u1, g1, l1), Piece(u2, g2, l2)


def _example2_pieces():
    def u1(x, t=None):
        return 5.0 * np.exp(np.sum(x**2, axis=1)) + 20.0

    def g1(x, t=None):
        return 10.0 * x * np.exp(np.sum(x**2, axis=1))[:, None]

    def l1(x, t=None):
        r2 = np.sum(x**2, axis=1)
        return 5.0 * np.exp(r2) * (6.0 + 4.0 * r2)

    def u2(x, t=None):
        return 10.0 * np.sum(x, axis=1)

    def g2(x, t=None):
        return np.full_like(x, 10.0)

    return Piece(u1, g1, l1), Piece(u2, g2, _zero)


def _example3_pieces():
    def col(a, b):
        return np.stack([a, b], axis=1)

    p0 = Piece(
        lambda x, t=None: np.cos(x[:, 1]) + 1.8,
        lambda x, t=None: col(np.zeros(len(x)), -np.sin(x[:, 1])),
        lambda x, t=None: -np.cos(x[:, 1]),
    )
    p1 = Piece(
        lambda x, t=None: np.exp(x[:, 0]) + 1.3,
        lambda x, t=None: col(np.exp(x[:, 0]), np.zeros(len(x))),
        lambda x, t=None: np.exp(x[:, 0]),
    )
    p2 = Piece(
        lambda x, t=None: np.sin(x[:, 0]) + 0.5,
        lambda x, t=None: col(np.cos(x[:, 0]), np.zeros(len(x))),
        lambda x, t=None: -np.sin(x[:, 0]),
    )
    p3 = Piece(
        lambda x, t=None: -x[:, 0] + np.log(x[:, 1] + 2.0),
        lambda x, t=None: col(-np.ones(len(x)), 1.0 / (x[:, 1] + 2.0)),
        lambda x, t=None: -1.0 / (x[:, 1] + 2.0) ** 2,
    )
    return p0, p1, p2, p3


def _example4_pieces(d):
    p1 = Piece(
        lambda x, t=None: np.sum(x**2, axis=1) / d,
        lambda x, t=None: 2.0 * x / d,
        lambda x, t=None: np.full(len(x), 2.0),
    )
    p2 = Piece(
        lambda x, t=None: np.sum(x, axis=1) / d,
        lambda x, t=None: np.full_like(x, 1.0 / d),
        _zero,
    )
    return p1, p2


def _parabolic_pieces():
    half_pi = math.pi / 2

    def u1(x, t):
        return -np.exp(-t) * (8.0 * np.sum(x**2, axis=1) - 3.5)

    def g1(x, t):
        return -16.0 * np.exp(-t)[:, None] * x

    def l1(x, t):
        return -32.0 * np.exp(-t)

    def d1(x, t):
        return np.exp(-t) * (8.0 * np.sum(x**2, axis=1) - 3.5)

    def u2(x, t):
        return np.exp(x[:, 0] - t) * np.cos(half_pi * x[:, 1])

    def g2(x, t):
        e = np.exp(x[:, 0] - t)
        return np.stack([e * np.cos(half_pi * x[:, 1]), -half_pi * e * np.sin(half_pi * x[:, 1])], axis=1)

    def l2(x, t):
        return (1.0 - half_pi**2) * u2(x, t)

    def d2(x, t):
        return -u2(x, t)

    return Piece(u1, g1, l1, d1), Piece(u2, g2, l2, d2)


# --- benchmark registry --------------------------------------------------------

# (beta1, beta2) -> (r_weight, r_bias) settings paired with each coefficient choice
EXAMPLE1_RANGES = {
    (1.0, 10.0): (1.6, 0.7),
    (1.0, 1e2): (1.2, 1.2),
    (1.0, 1e4): (1.8, 1.3),
    (1e-4, 1e4): (1.6, 0.7),
    (1e-6, 1e6): (1.0, 1.3),
    (1e2, 1e-2): (1.3, 1.6),
    (1e4, 1e-4): (1.0, 1.8),
}
# mixed form: (u weight, u bias, flux weight, flux bias)
EXAMPLE1_MIXED_RANGES = {
    (1.0, 10.0): (1.0, 1.1, 0.7, 2.1),
    (1.0, 1e2): (1.2, 0.8, 2.6, 0.9),
    (1.0, 1e4): (1.9, 0.6, 1.0, 1.2),
    (1e-4, 1e4): (1.0, 1.1, 0.7, 2.1),
    (1e-6, 1e6): (1.0, 0.5, 0.5, 1.4),
    (1e2, 1e-2): (0.2, 0.8, 1.3, 1.3),
    (1e4, 1e-4): (2.3, 0.7, 1.4, 1.6),
}


@dataclass(frozen=True, eq=False)
class ExampleSpec:
    id: int
    title: str
    problem: ProblemDefinition
    plan: SamplingPlan
    m: int
    ranges: tuple  # (r_weight, r_bias) per subdomain network
    formulation: str = "strong"
    flux_ranges: Optional[tuple] = None  # (r_weight, r_bias) for the flux networks
    trials: int = 10
    error_rule: QuadratureRule = field(default_factory=QuadratureRule)

    def settings(self) -> dict:
        """Flat summary of the table settings, echoed into run manifests."""
        out = {
            "example": self.id,
            "formulation": self.formulation,
            "dim": self.problem.geom.dim,
            "m": self.m,
            "N": self.plan.total if self.plan.counts is None else sum(self.plan.counts.values()),
            "beta": list(self.problem.beta),
            "ranges": [list(r) for r in self.ranges],
            "trials": self.trials,
            "error_rule": self.error_rule.kind,
        }
        if self.plan.counts is not None:
            out["counts"] = dict(self.plan.counts)
        else:
            out["fractions"] = {k: str(v) for k, v in self.plan.fractions.items()}
        if self.flux_ranges is not None:
            out["flux_ranges"] = list(self.flux_ranges)
        return out


def _pair(r) -> tuple:
    r = tuple(float(v) for v in (r if isinstance(r, (tuple, list)) else (r, r)))
    if len(r) != 2:
        raise ConfigError(f"expected (r_weight, r_bias), got {r}")
    return r


def example(
    id: int,
    *,
    m: Optional[int] = None,
    N: Optional[int] = None,
    beta: Optional[Sequence[float]] = None,
    r=None,
    seed: int = 0,
    trials: Optional[int] = None,
    d: Optional[int] = None,
    formulation: str = "strong",
    ratios: Optional[Sequence[int]] = None,
    interface_measure: str = "parameter",
) -> ExampleSpec:
    """Build one of the six benchmarks with optional overrides.

    ``r`` is a scalar (same range for weights and biases), a
    ``(r_weight, r_bias)`` pair, or, for the mixed form, a 4-tuple
    ``(u weight, u bias, flux weight, flux bias)``.  ``d`` applies to
    Example 4 only.  ``ratios`` replaces the sampling proportions
    (interior : interfaces... : boundary).
    """
    if formulation not in ("strong", "mixed"):
        raise ConfigError(f"unknown formulation {formulation!r}")
    if formulation == "mixed" and id != 1:
        raise ConfigError("the mixed formulation is provided for Example 1 only")
    if d is not None and id != 4:
        raise ConfigError("the dimension override applies to Example 4 only")
    flux_ranges = None
    rule = QuadratureRule()

    if id == 1:
        title = "2-D flower interface"
        b = tuple(beta) if beta is not None else (1.0, 10.0)
        c = 0.02 * math.sqrt(5.0)
        geom = GeometrySpec(DomainBox.cube(-1.0, 1.0, 2), (PolarCurve((c, c), 0.4, sin_amp=0.2, freq=20),))
        pieces = _example1_pieces(*b)
        m0, N0, default_ratios = 320, 5000, (3, 1, 1)
        if formulation == "mixed":
            rr = tuple(r) if r is not None else EXAMPLE1_MIXED_RANGES.get(b, (1.0, 1.1, 0.7, 2.1))
            if len(rr) != 4:
                raise ConfigError("mixed form ranges are (u weight, u bias, flux weight, flux bias)")
            ranges = ((rr[0], rr[1]),) * 2
            flux_ranges = (float(rr[2]), float(rr[3]))
        else:
            ranges = (_pair(r) if r is not None else EXAMPLE1_RANGES.get(b, (1.6, 0.7)),) * 2
    elif id == 2:
        title = "3-D spherical interface"
        b = tuple(beta) if beta is not None else (1.0, 100.0)
        geom = GeometrySpec(DomainBox.cube(-1.0, 1.0, 3), (Sphere((0.0, 0.0, 0.0), 0.75),))
        pieces = _example2_pieces()
        m0, N0, default_ratios = 640, 10000, (6, 1, 3)
        ranges = (_pair(r if r is not None else (2.54, 0.33)),) * 2
    elif id == 3:
        title = "2-D multiple interfaces"
        b = tuple(beta) if beta is not None else (1.0, 2.0, 3.0, 4.0)
        geom = GeometrySpec(
            DomainBox.cube(-1.0, 1.0, 2),
            (
                Sphere((0.0, 0.0), 0.2),
                PolarCurve((0.0, 0.0), 0.5, cos_amp=-0.1, freq=5),
                Sphere((0.0, 0.0), 0.8),
            ),
        )
        pieces = _example3_pieces()
        m0, N0, default_ratios = 320, 5000, (6, 1, 1, 1, 1)
        if r is None:
            ranges = tuple(_pair(v) for v in (1.1, 0.7, 0.3, 1.0))
        elif isinstance(r, (list, tuple)) and len(r) == 4:
            ranges = tuple(_pair(v) for v in r)
        else:
            ranges = (_pair(r),) * 4
    elif id == 4:
        title = "high-dimensional hyperplane interface"
        dim = int(d) if d is not None else 5
        if dim < 2:
            raise ConfigError("Example 4 needs d >= 2")
        b = tuple(beta) if beta is not None else (1.0, 1.0)
        geom = GeometrySpec(DomainBox.cube(0.0, 1.0, dim), (Hyperplane(0, 0.5, dim),))
        pieces = _example4_pieces(dim)
        m0, N0, default_ratios = 1800, None, None
        ranges = (_pair(r if r is not None else 0.01),) * 2
        rule = QuadratureRule(kind="mc", n_samples=10_000)
    elif id in (5, 6):
        b = tuple(beta) if beta is not None else (1.0, 1.0)
        box = DomainBox.cube(-1.0, 1.0, 2)
        if id == 5:
            title = "parabolic, fixed circular interface"
            geom = GeometrySpec(box, (Sphere((0.0, 0.0), 0.5),), time_horizon=1.0)
            r_default = 0.6
        else:
            title = "parabolic, moving circular interface"
            geom = GeometrySpec(box, (MovingCircle((0.0, 0.0), 0.5, 0.3),), time_horizon=1.0)
            r_default = 1.0
        pieces = _parabolic_pieces()
        m0, N0, default_ratios = 320, 5000, (14, 3, 3)
        ranges = (_pair(r if r is not None else r_default),) * 2
    else:
        raise UnknownExample(f"no example with id {id!r}; choose 1-6")

    problem = ProblemDefinition(geom, b, pieces, name=f"example{id}")
    if id == 4:
        if N is not None or ratios is not None:
            raise ConfigError("Example 4 uses absolute point counts; N and ratios cannot be overridden")
        plan = SamplingPlan(
            counts={INTERIOR: 1000, interface_region(0): 10_000, BOUNDARY: 2 * geom.dim * 100},
            seed=seed,
            interface_measure=interface_measure,
        )
    else:
        plan = SamplingPlan.from_ratios(
            int(N) if N is not None else N0,
            tuple(ratios) if ratios is not None else default_ratios,
            len(geom.interfaces),
            spacetime=geom.is_spacetime,
            seed=seed,
            interface_measure=interface_measure,
        )
    return ExampleSpec(
        id=id,
        title=title,
        problem=problem,
        plan=plan,
        m=int(m) if m is not None else m0,
        ranges=tuple(tuple(float(v) for v in p) for p in ranges),
        formulation=formulation,
        flux_ranges=flux_ranges,
        trials=int(trials) if trials is not None else 10,
        error_rule=rule,
    )


def with_seed(spec: ExampleSpec, seed: int) -> ExampleSpec:
    return replace(spec, plan=spec.plan.with_seed(seed), error_rule=replace(spec.error_rule, seed=seed))
