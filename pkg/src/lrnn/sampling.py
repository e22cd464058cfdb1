"""Random collocation points on the interior, interfaces, boundary and initial slice."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Optional, Sequence

import numpy as np

from .errors import InfeasiblePlan
from .geometry import GeometrySpec

INTERIOR = "interior"
BOUNDARY = "boundary"
INITIAL = "initial"
INTERFACE_REJECT_TOL = 1e-8


def interface_region(label: int) -> str:
    return f"interface.{label}"


@dataclass(frozen=True)
class SamplingPlan:
    """How many points go to each region.

    Either ``fractions`` (exact rationals summing to one, applied to ``total``)
    or ``counts`` (absolute numbers per region) must be given.
    """

    total: int = 0
    fractions: Mapping[str, Fraction] = field(default_factory=dict)
    seed: int = 0
    counts: Optional[Mapping[str, int]] = None
    interface_measure: str = "parameter"

    def __post_init__(self):
        object.__setattr__(self, "fractions", {k: Fraction(v) for k, v in self.fractions.items()})
        if self.counts is not None:
            object.__setattr__(self, "counts", {k: int(v) for k, v in self.counts.items()})

    @classmethod
    def from_ratios(
        cls,
        total: int,
        ratios: Sequence[int],
        n_interfaces: int,
        spacetime: bool = False,
        seed: int = 0,
        interface_measure: str = "parameter",
    ) -> "SamplingPlan":
        """Ratios ordered ``interior : interface_0 : ... : boundary``.

        In space-time mode the boundary share is split 4:1 between the lateral
        boundary and the initial slice.
        """
        if len(ratios) != n_interfaces + 2:
            raise InfeasiblePlan(
                f"expected {n_interfaces + 2} ratios (interior, interfaces, boundary), got {len(ratios)}"
            )
        if any(r < 0 for r in ratios) or sum(ratios) <= 0:
            raise InfeasiblePlan("ratios must be non-negative with a positive sum")
        s = sum(Fraction(r) for r in ratios)
        fr = {INTERIOR: Fraction(ratios[0]) / s}
        for i in range(n_interfaces):
            fr[interface_region(i)] = Fraction(ratios[1 + i]) / s
        bnd = Fraction(ratios[-1]) / s
        if spacetime:
            fr[BOUNDARY] = bnd * Fraction(4, 5)
            fr[INITIAL] = bnd * Fraction(1, 5)
        else:
            fr[BOUNDARY] = bnd
        return cls(total=total, fractions=fr, seed=seed, interface_measure=interface_measure)

    def with_seed(self, seed: int) -> "SamplingPlan":
        return SamplingPlan(self.total, self.fractions, seed, self.counts, self.interface_measure)

    def regions(self) -> list:
        src = self.counts if self.counts is not None else self.fractions
        return list(src)


def stratified_counts(plan: SamplingPlan) -> dict:
    """Per-region counts: floor of ``N * fraction``, remainder to the interior.

    Every region with a positive fraction receives at least one point, taken
    from the interior.
    """
    if plan.counts is not None:
        if any(c < 0 for c in plan.counts.values()) or sum(plan.counts.values()) <= 0:
            raise InfeasiblePlan("absolute counts must be non-negative with a positive sum")
        return dict(plan.counts)
    if plan.total <= 0:
        raise InfeasiblePlan("total number of points must be positive")
    if not plan.fractions or sum(plan.fractions.values()) != 1:
        raise InfeasiblePlan("fractions must sum to one")
    if INTERIOR not in plan.fractions:
        raise InfeasiblePlan("the plan needs an interior region")
    counts = {k: math.floor(plan.total * f) for k, f in plan.fractions.items()}
    counts[INTERIOR] += plan.total - sum(counts.values())
    for k, f in plan.fractions.items():
        if f > 0 and counts[k] == 0:
            counts[k] = 1
            counts[INTERIOR] -= 1
    if counts[INTERIOR] < (1 if plan.fractions[INTERIOR] > 0 else 0):
        raise InfeasiblePlan(f"N={plan.total} is too small to populate every region")
    return counts


@dataclass
class CollocationSet:
    """Tagged collocation points.  ``*_t`` arrays are None for elliptic problems."""

    interior_x: np.ndarray
    interior_t: Optional[np.ndarray]
    interior_sub: np.ndarray
    iface_x: np.ndarray
    iface_t: Optional[np.ndarray]
    iface_normal: np.ndarray
    iface_label: np.ndarray
    boundary_x: np.ndarray
    boundary_t: Optional[np.ndarray]
    boundary_sub: np.ndarray
    initial_x: np.ndarray
    initial_sub: np.ndarray

    def counts(self) -> dict:
        out = {INTERIOR: len(self.interior_x), BOUNDARY: len(self.boundary_x)}
        for lab in np.unique(self.iface_label):
            out[interface_region(int(lab))] = int(np.sum(self.iface_label == lab))
        if self.interior_t is not None:
            out[INITIAL] = len(self.initial_x)
        return out


def _region_rng(seed: int, region: int) -> np.random.Generator:
    ss = np.random.SeedSequence(int(seed), spawn_key=(2, region))
    return np.random.Generator(np.random.PCG64(ss))


def sample_interior(geom: GeometrySpec, rng, n: int):
    """Uniform box points (and times), rejecting a thin band around every interface."""
    xs, ts = [], []
    have = 0
    T = geom.time_horizon
    while have < n:
        k = (n - have) + 16
        x = geom.box.uniform(rng, k)
        t = None if T is None else rng.uniform(0.0, T, size=k)
        phi = geom.level_sets(x, t)
        keep = np.all(np.abs(phi) >= INTERFACE_REJECT_TOL, axis=1)
        xs.append(x[keep])
        if t is not None:
            ts.append(t[keep])
        have += int(keep.sum())
    x = np.concatenate(xs)[:n]
    t = np.concatenate(ts)[:n] if T is not None else None
    return x, t, geom.classify(x, t)


def sample_boundary(geom: GeometrySpec, rng, n: int):
    """Uniform points on the box faces, each face chosen with probability proportional to its measure."""
    box = geom.box
    meas = box.face_measures()
    face = rng.choice(len(meas), size=n, p=meas / meas.sum())
    x = box.uniform(rng, n)
    axis = face // 2
    x[np.arange(n), axis] = np.where(face % 2 == 0, np.take(box.lo, axis), np.take(box.hi, axis))
    t = None if geom.time_horizon is None else rng.uniform(0.0, geom.time_horizon, size=n)
    # a hyperplane interface meets the boundary; points on it get nudged before classification
    sub = geom.classify_robust(x, t)
    return x, t, sub


def sample_collocation(geom: GeometrySpec, plan: SamplingPlan) -> CollocationSet:
    """Draw a deterministic collocation set for ``geom`` according to ``plan``.

    Each region uses its own child stream of ``plan.seed``, so changing one
    region's count leaves the others unchanged.
    """
    regions = set(plan.regions())
    expected = {INTERIOR, BOUNDARY} | {interface_region(i) for i in range(len(geom.interfaces))}
    if geom.is_spacetime:
        expected.add(INITIAL)
    if INITIAL in regions and not geom.is_spacetime:
        raise InfeasiblePlan("initial points requested for a stationary problem")
    unknown = regions - expected
    if unknown:
        raise InfeasiblePlan(f"plan regions {sorted(unknown)} do not match the geometry")
    counts = stratified_counts(plan)
    d = geom.dim

    x_in, t_in, s_in = sample_interior(geom, _region_rng(plan.seed, 0), counts.get(INTERIOR, 0))

    ix, it, inorm, ilab = [], [], [], []
    for i, iface in enumerate(geom.interfaces):
        n_i = counts.get(interface_region(i), 0)
        x, t = iface.sample(_region_rng(plan.seed, 10 + i), n_i, geom.box, geom.time_horizon,
                            plan.interface_measure)
        ix.append(x.reshape(n_i, d))
        it.append(t if t is not None else np.zeros(0))
        inorm.append(iface.normal(x, t) if n_i else np.zeros((0, d)))
        ilab.append(np.full(n_i, i, dtype=np.intp))

    x_b, t_b, s_b = sample_boundary(geom, _region_rng(plan.seed, 1), counts.get(BOUNDARY, 0))

    if geom.is_spacetime:
        n0 = counts.get(INITIAL, 0)
        rng0 = _region_rng(plan.seed, 3)
        x0 = np.zeros((0, d))
        chunks = []
        have = 0
        while have < n0:
            x = geom.box.uniform(rng0, n0 - have + 16)
            keep = np.all(np.abs(geom.level_sets(x, 0.0)) >= INTERFACE_REJECT_TOL, axis=1)
            chunks.append(x[keep])
            have += int(keep.sum())
        if chunks:
            x0 = np.concatenate(chunks)[:n0]
        s0 = geom.classify(x0, 0.0) if len(x0) else np.zeros(0, dtype=np.intp)
    else:
        x0 = np.zeros((0, d))
        s0 = np.zeros(0, dtype=np.intp)

    return CollocationSet(
        interior_x=x_in,
        interior_t=t_in,
        interior_sub=s_in,
        iface_x=np.concatenate(ix),
        iface_t=np.concatenate(it) if geom.is_spacetime else None,
        iface_normal=np.concatenate(inorm),
        iface_label=np.concatenate(ilab),
        boundary_x=x_b,
        boundary_t=t_b,
        boundary_sub=s_b,
        initial_x=x0,
        initial_sub=s0,
    )
