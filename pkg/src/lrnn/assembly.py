"""Block least-squares systems for the strong, mixed and space-time formulations.

Rows are stacked in the order PDE, jump, flux jump, Dirichlet (and initial, or
the three mixed interior blocks first).  Columns hold one block per network,
ordered by subdomain and, for the mixed form, flux networks after the
solution networks.  Weighted rows are scaled by ``gamma`` in both the matrix
and the right-hand side.
"""
from __future__ import annotations

import enum
import struct
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .calculus import FdConfig, fd_directional, fd_laplacian, fd_partial, fd_time_partial
from .errors import (
    DimensionMismatch,
    EmptyRegion,
    MissingInitialCondition,
    UnsupportedDimension,
)
from .problems import ProblemDefinition
from .randnet import eval_basis
from .sampling import CollocationSet
from .solution import network_inputs


class RowTag(enum.IntEnum):
    PDE = 0
    JUMP = 1
    FLUX_JUMP = 2
    DIRICHLET = 3
    INITIAL = 4
    MIXED_DIV = 5
    MIXED_GRAD_X = 6
    MIXED_GRAD_Y = 7


@dataclass(frozen=True)
class Weights:
    """Row weights for the interface, boundary and initial blocks."""

    jump: float = 50.0
    flux: float = 50.0
    dirichlet: float = 50.0
    initial: float = 50.0

    @classmethod
    def uniform(cls, gamma: float) -> "Weights":
        return cls(gamma, gamma, gamma, gamma)

    def for_tag(self, tag: RowTag) -> float:
        return {
            RowTag.JUMP: self.jump,
            RowTag.FLUX_JUMP: self.flux,
            RowTag.DIRICHLET: self.dirichlet,
            RowTag.INITIAL: self.initial,
        }.get(tag, 1.0)


@dataclass
class BlockSystem:
    matrix: np.ndarray
    rhs: np.ndarray
    row_tags: np.ndarray
    row_weights: np.ndarray
    column_blocks: tuple  # (name, start, stop)

    @property
    def shape(self) -> tuple:
        return self.matrix.shape

    def rows(self, tag: RowTag) -> np.ndarray:
        """Indices of the rows carrying ``tag``, in matrix order."""
        return np.flatnonzero(self.row_tags == tag)

    def block_shapes(self) -> dict:
        return {RowTag(t).name: (int(np.sum(self.row_tags == t)), self.matrix.shape[1])
                for t in np.unique(self.row_tags)}


class _Builder:
    def __init__(self, n_rows: int, col_sizes: Sequence[int], col_names: Sequence[str]):
        self.matrix = np.zeros((n_rows, int(sum(col_sizes))))
        self.rhs = np.zeros(n_rows)
        self.tags = np.zeros(n_rows, dtype=np.int8)
        self.weights = np.ones(n_rows)
        starts = np.concatenate([[0], np.cumsum(col_sizes)]).astype(int)
        self.cols = [slice(a, b) for a, b in zip(starts[:-1], starts[1:])]
        self.names = list(col_names)
        self.pos = 0

    def block(self, tag: RowTag, n: int, weight: float) -> slice:
        rows = slice(self.pos, self.pos + n)
        self.tags[rows] = tag
        self.weights[rows] = weight
        self.pos += n
        return rows

    def finish(self) -> BlockSystem:
        assert self.pos == len(self.rhs)
        self.matrix *= self.weights[:, None]
        self.rhs *= self.weights
        blocks = tuple((n, s.start, s.stop) for n, s in zip(self.names, self.cols))
        return BlockSystem(self.matrix, self.rhs, self.tags, self.weights, blocks)


def _check_nets(nets, geom, spacetime: bool):
    d_in = geom.dim + (1 if spacetime else 0)
    if len(nets) != geom.n_subdomains:
        raise DimensionMismatch(f"need {geom.n_subdomains} networks, got {len(nets)}")
    for net in nets:
        if net.d_in != d_in:
            raise DimensionMismatch(f"network input dimension {net.d_in} != {d_in}")
        if spacetime and net.time_axis != geom.dim:
            raise DimensionMismatch("space-time networks must carry time as their last input")


def _check_regions(pts: CollocationSet):
    if len(pts.interior_x) == 0:
        raise EmptyRegion("no interior collocation points")
    if len(pts.iface_x) == 0:
        raise EmptyRegion("no interface collocation points")
    if len(pts.boundary_x) == 0:
        raise EmptyRegion("no boundary collocation points")


def _sel(a, rows):
    return None if a is None else a[rows]


def _assemble_strong(prob, nets, pts, cfg, gamma, flux_beta, spacetime):
    geom = prob.geom
    _check_nets(nets, geom, spacetime)
    _check_regions(pts)
    beta = prob.beta
    n1, n2, n3 = len(pts.interior_x), len(pts.iface_x), len(pts.boundary_x)
    n0 = len(pts.initial_x) if spacetime else 0
    if spacetime and n0 == 0:
        raise EmptyRegion("no initial-time collocation points")
    b = _Builder(n1 + 2 * n2 + n3 + n0, [n.m for n in nets], [f"alpha{s}" for s in range(len(nets))])

    rows = b.block(RowTag.PDE, n1, 1.0)
    t_in = pts.interior_t if spacetime else None
    b.rhs[rows] = prob.source(pts.interior_x, t_in, pts.interior_sub)
    for s, net in enumerate(nets):
        idx = np.nonzero(pts.interior_sub == s)[0]
        if not len(idx):
            continue
        inp = network_inputs(pts.interior_x[idx], _sel(t_in, idx))
        blk = -beta[s] * fd_laplacian(net, inp, cfg)
        if spacetime:
            blk += fd_time_partial(net, inp, cfg)
        b.matrix[rows.start + idx, b.cols[s]] = blk

    t_if = pts.iface_t if spacetime else None
    jump_rows = b.block(RowTag.JUMP, n2, gamma.jump)
    flux_rows = b.block(RowTag.FLUX_JUMP, n2, gamma.flux)
    for label in np.unique(pts.iface_label):
        label = int(label)
        idx = np.nonzero(pts.iface_label == label)[0]
        x, t, nrm = pts.iface_x[idx], _sel(t_if, idx), pts.iface_normal[idx]
        inner, outer = geom.adjacent(label)
        inp = network_inputs(x, t)
        b.rhs[jump_rows.start + idx] = prob.jump(x, t, label)
        b.rhs[flux_rows.start + idx] = prob.flux_jump(x, t, nrm, label)
        b.matrix[jump_rows.start + idx, b.cols[inner]] = eval_basis(nets[inner], inp)
        b.matrix[jump_rows.start + idx, b.cols[outer]] = -eval_basis(nets[outer], inp)
        bi = beta[inner] if flux_beta else 1.0
        bo = beta[outer] if flux_beta else 1.0
        b.matrix[flux_rows.start + idx, b.cols[inner]] = bi * fd_directional(nets[inner], inp, nrm, cfg)
        b.matrix[flux_rows.start + idx, b.cols[outer]] = -bo * fd_directional(nets[outer], inp, nrm, cfg)

    rows = b.block(RowTag.DIRICHLET, n3, gamma.dirichlet)
    t_b = pts.boundary_t if spacetime else None
    b.rhs[rows] = prob.dirichlet(pts.boundary_x, t_b, pts.boundary_sub)
    for s, net in enumerate(nets):
        idx = np.nonzero(pts.boundary_sub == s)[0]
        if len(idx):
            inp = network_inputs(pts.boundary_x[idx], _sel(t_b, idx))
            b.matrix[rows.start + idx, b.cols[s]] = eval_basis(net, inp)

    if spacetime:
        rows = b.block(RowTag.INITIAL, n0, gamma.initial)
        b.rhs[rows] = prob.initial(pts.initial_x, pts.initial_sub)
        for s, net in enumerate(nets):
            idx = np.nonzero(pts.initial_sub == s)[0]
            if len(idx):
                inp = network_inputs(pts.initial_x[idx], np.zeros(len(idx)))
                b.matrix[rows.start + idx, b.cols[s]] = eval_basis(net, inp)
    return b.finish()


def assemble_elliptic(
    prob: ProblemDefinition,
    nets: Sequence,
    pts: CollocationSet,
    cfg: FdConfig = FdConfig(),
    gamma: Weights = Weights(),
    flux_beta: bool = True,
) -> BlockSystem:
    """Strong-form collocation system for a stationary interface problem.

    Flux-jump rows carry the diffusion coefficients of both sides, matching
    ``[beta grad(u).n] = g2``; ``flux_beta=False`` drops them.
    """
    if prob.is_spacetime:
        raise DimensionMismatch("use assemble_spacetime for parabolic problems")
    return _assemble_strong(prob, nets, pts, cfg, gamma, flux_beta, spacetime=False)


def assemble_spacetime(
    prob: ProblemDefinition,
    nets: Sequence,
    pts: CollocationSet,
    cfg: FdConfig = FdConfig(),
    gamma: Weights = Weights(),
    flux_beta: bool = True,
) -> BlockSystem:
    """Space-time collocation system: time is an extra network input and the
    initial condition is one more weighted boundary block."""
    if not prob.is_spacetime:
        raise MissingInitialCondition("space-time assembly needs a time horizon and an initial condition")
    return _assemble_strong(prob, nets, pts, cfg, gamma, flux_beta, spacetime=True)


def assemble_mixed(
    prob: ProblemDefinition,
    nets_u: Sequence,
    nets_p: Sequence,
    pts: CollocationSet,
    cfg: FdConfig = FdConfig(),
    gamma: Weights = Weights(),
) -> BlockSystem:
    """First-order system in ``(u, p = beta grad u)`` for 2-D stationary problems.

    ``nets_p[s][k]`` approximates flux component ``k`` on subdomain ``s``.
    Columns: solution blocks for every subdomain, then flux blocks ordered
    ``(s, k)``.
    """
    geom = prob.geom
    if geom.dim != 2 or prob.is_spacetime:
        raise UnsupportedDimension("the mixed formulation is implemented for 2-D elliptic problems")
    _check_nets(nets_u, geom, False)
    if len(nets_p) != geom.n_subdomains or any(len(row) != 2 for row in nets_p):
        raise DimensionMismatch("need two flux networks per subdomain")
    if any(net.d_in != 2 for row in nets_p for net in row):
        raise DimensionMismatch("flux networks must take 2-D inputs")
    _check_regions(pts)
    S = geom.n_subdomains
    beta = prob.beta
    n1, n2, n3 = len(pts.interior_x), len(pts.iface_x), len(pts.boundary_x)
    flat_p = [net for row in nets_p for net in row]
    sizes = [n.m for n in nets_u] + [n.m for n in flat_p]
    names = [f"alpha{s}" for s in range(S)] + [f"tau{s}{k}" for s in range(S) for k in range(2)]
    b = _Builder(3 * n1 + 2 * n2 + n3, sizes, names)

    def pcol(s, k):
        return b.cols[S + 2 * s + k]

    div = b.block(RowTag.MIXED_DIV, n1, 1.0)
    gx = b.block(RowTag.MIXED_GRAD_X, n1, 1.0)
    gy = b.block(RowTag.MIXED_GRAD_Y, n1, 1.0)
    b.rhs[div] = prob.source(pts.interior_x, None, pts.interior_sub)
    for s in range(S):
        idx = np.nonzero(pts.interior_sub == s)[0]
        if not len(idx):
            continue
        x = pts.interior_x[idx]
        px, py = nets_p[s]
        b.matrix[div.start + idx, pcol(s, 0)] = -fd_partial(px, 0, x, cfg)
        b.matrix[div.start + idx, pcol(s, 1)] = -fd_partial(py, 1, x, cfg)
        for k, rows in ((0, gx), (1, gy)):
            b.matrix[rows.start + idx, b.cols[s]] = -beta[s] * fd_partial(nets_u[s], k, x, cfg)
            b.matrix[rows.start + idx, pcol(s, k)] = eval_basis(nets_p[s][k], x)

    jump_rows = b.block(RowTag.JUMP, n2, gamma.jump)
    flux_rows = b.block(RowTag.FLUX_JUMP, n2, gamma.flux)
    for label in np.unique(pts.iface_label):
        label = int(label)
        idx = np.nonzero(pts.iface_label == label)[0]
        x, nrm = pts.iface_x[idx], pts.iface_normal[idx]
        inner, outer = geom.adjacent(label)
        b.rhs[jump_rows.start + idx] = prob.jump(x, None, label)
        b.rhs[flux_rows.start + idx] = prob.flux_jump(x, None, nrm, label)
        b.matrix[jump_rows.start + idx, b.cols[inner]] = eval_basis(nets_u[inner], x)
        b.matrix[jump_rows.start + idx, b.cols[outer]] = -eval_basis(nets_u[outer], x)
        for k in range(2):
            b.matrix[flux_rows.start + idx, pcol(inner, k)] = nrm[:, k:k + 1] * eval_basis(nets_p[inner][k], x)
            b.matrix[flux_rows.start + idx, pcol(outer, k)] = -nrm[:, k:k + 1] * eval_basis(nets_p[outer][k], x)

    rows = b.block(RowTag.DIRICHLET, n3, gamma.dirichlet)
    b.rhs[rows] = prob.dirichlet(pts.boundary_x, None, pts.boundary_sub)
    for s in range(S):
        idx = np.nonzero(pts.boundary_sub == s)[0]
        if len(idx):
            b.matrix[rows.start + idx, b.cols[s]] = eval_basis(nets_u[s], pts.boundary_x[idx])
    return b.finish()


def residual(sys: BlockSystem, X) -> dict:
    """RMS residual of each row block, measured on the unweighted equations.

    Blocks whose weight is zero carry no information about the unweighted
    residual and report NaN.
    """
    X = np.asarray(X, dtype=float)
    if X.shape != (sys.matrix.shape[1],):
        raise DimensionMismatch(f"X must have length {sys.matrix.shape[1]}")
    r = sys.matrix @ X - sys.rhs
    out = {}
    for tag in np.unique(sys.row_tags):
        rows = sys.row_tags == tag
        w = sys.row_weights[rows]
        if np.all(w == 0):
            out[RowTag(tag).name] = float("nan")
            continue
        ok = w != 0
        rr = r[rows][ok] / w[ok]
        out[RowTag(tag).name] = float(np.sqrt(np.mean(rr**2)))
    return out


_HEADER = struct.Struct("<qq")


def write_matrix(path, a) -> None:
    """Binary dump: two little-endian int64 (rows, cols) then row-major float64 data."""
    a = np.atleast_2d(np.asarray(a, dtype="<f8"))
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(*a.shape))
        fh.write(np.ascontiguousarray(a).tobytes())


def read_matrix(path) -> np.ndarray:
    with open(path, "rb") as fh:
        rows, cols = _HEADER.unpack(fh.read(_HEADER.size))
        data = np.frombuffer(fh.read(), dtype="<f8")
    return data.reshape(rows, cols)


def write_system(path, sys: BlockSystem, rhs_path: Optional[str] = None) -> None:
    write_matrix(path, sys.matrix)
    if rhs_path is not None:
        write_matrix(rhs_path, sys.rhs[:, None])
