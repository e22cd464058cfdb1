"""Trials, manifests, sweeps and grid dumps."""
from __future__ import annotations

import csv
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .assembly import (
    BlockSystem,
    Weights,
    assemble_elliptic,
    assemble_mixed,
    assemble_spacetime,
    residual,
    write_system,
)
from .calculus import FdConfig
from .config import RunConfig
from .geometry import GeometrySpec
from .linsolve import SolverConfig, lstsq
from .problems import ExampleSpec, example
from .quadrature import QuadratureRule, relative_l2_error, slice_relative_l2_error
from .randnet import build_network
from .sampling import CollocationSet, sample_collocation
from .solution import SolutionCoefficients

logger = logging.getLogger(__name__)

# seed stream prefixes: 0 = solution networks, 1 = flux networks (sampling uses 2)
U_STREAM, P_STREAM = 0, 1
TIME_SLICES = (0.0, 0.25, 0.5, 0.75, 1.0)


def build_networks(spec: ExampleSpec, seed: int):
    """One network per subdomain (plus two flux networks per subdomain for the mixed form)."""
    geom = spec.problem.geom
    d_in = geom.dim + (1 if geom.is_spacetime else 0)
    time_axis = geom.dim if geom.is_spacetime else None
    nets = tuple(
        build_network(seed, d_in, [spec.m], rw, rb, stream=(U_STREAM, s), time_axis=time_axis)
        for s, (rw, rb) in enumerate(spec.ranges)
    )
    flux_nets = None
    if spec.formulation == "mixed":
        rw, rb = spec.flux_ranges
        flux_nets = tuple(
            tuple(build_network(seed, d_in, [spec.m], rw, rb, stream=(P_STREAM, s, k)) for k in range(geom.dim))
            for s in range(geom.n_subdomains)
        )
    return nets, flux_nets


def assemble(spec: ExampleSpec, nets, flux_nets, pts: CollocationSet, fd: FdConfig, gamma: Weights,
             flux_beta: bool = True) -> BlockSystem:
    prob = spec.problem
    if spec.formulation == "mixed":
        return assemble_mixed(prob, nets, flux_nets, pts, fd, gamma)
    if prob.is_spacetime:
        return assemble_spacetime(prob, nets, pts, fd, gamma, flux_beta)
    return assemble_elliptic(prob, nets, pts, fd, gamma, flux_beta)


@dataclass
class TrialResult:
    seed: int
    error: float
    flux_error: Optional[float]
    times: dict
    diagnostics: dict
    shape: tuple
    residuals: dict
    solution: Optional[SolutionCoefficients] = field(default=None, repr=False)

    def record(self) -> dict:
        out = {"seed": self.seed, "error": self.error}
        if self.flux_error is not None:
            out["flux_error"] = self.flux_error
        out.update({f"time.{k}": v for k, v in self.times.items()})
        out.update({f"solver.{k}": v for k, v in self.diagnostics.items()})
        out["rows"], out["cols"] = self.shape
        return out


def solve_trial(
    spec: ExampleSpec,
    seed: int,
    fd: FdConfig = FdConfig(),
    gamma: Weights = Weights(),
    solver: SolverConfig = SolverConfig(),
    flux_beta: bool = True,
    error_rule: Optional[QuadratureRule] = None,
    dump_system: Optional[str] = None,
    keep_solution: bool = False,
) -> TrialResult:
    """Sample, assemble, solve and measure one independent trial seeded with ``seed``."""
    geom = spec.problem.geom
    times = {}
    clock = time.perf_counter

    t0 = clock()
    nets, flux_nets = build_networks(spec, seed)
    pts = sample_collocation(geom, spec.plan.with_seed(seed))
    times["sample"] = clock() - t0

    t0 = clock()
    system = assemble(spec, nets, flux_nets, pts, fd, gamma, flux_beta)
    times["assemble"] = clock() - t0
    if dump_system:
        write_system(dump_system, system, rhs_path=str(dump_system) + ".rhs")

    t0 = clock()
    X, diag = lstsq(system.matrix, system.rhs, solver)
    times["solve"] = clock() - t0
    res = residual(system, X)
    shape = system.shape
    del system

    t0 = clock()
    sol = SolutionCoefficients.from_vector(geom, nets, X, flux_nets)
    rule = error_rule if error_rule is not None else spec.error_rule
    rule = replace(rule, seed=seed)
    err = relative_l2_error(sol, spec.problem.exact, geom, rule)
    ferr = None
    if flux_nets is not None:
        ferr = relative_l2_error(sol.flux, spec.problem.exact_flux, geom, rule)
    times["evaluate"] = clock() - t0

    logger.info("seed %d: error %.3e (%s)", seed, err, ", ".join(f"{k} {v:.2f}s" for k, v in times.items()))
    return TrialResult(seed, err, ferr, times, diag.as_dict(), shape, res, sol if keep_solution else None)


def slice_errors(spec: ExampleSpec, sol: SolutionCoefficients, slices=TIME_SLICES, nodes: int = 20) -> dict:
    """Relative L2 error on the spatial box at each time slice (space-time problems)."""
    geom = spec.problem.geom
    return {t: slice_relative_l2_error(sol, spec.problem.exact, geom, t, nodes) for t in slices}


# --- configured runs -----------------------------------------------------------


def spec_from_config(cfg: RunConfig) -> ExampleSpec:
    return example(
        cfg.example,
        m=cfg.m,
        N=cfg.N,
        beta=cfg.beta,
        r=(cfg.r if cfg.r is None or len(cfg.r) != 1 else cfg.r[0]),
        seed=cfg.seed,
        trials=cfg.trials,
        d=cfg.d,
        formulation=cfg.formulation,
        ratios=cfg.ratios,
        interface_measure=cfg.interface_measure,
    )


def weights_from_config(cfg: RunConfig) -> Weights:
    g = cfg.gamma
    return Weights(
        jump=g if cfg.gamma_jump is None else cfg.gamma_jump,
        flux=g if cfg.gamma_flux is None else cfg.gamma_flux,
        dirichlet=g if cfg.gamma_dirichlet is None else cfg.gamma_dirichlet,
        initial=g if cfg.gamma_initial is None else cfg.gamma_initial,
    )


def rule_from_config(cfg: RunConfig, spec: ExampleSpec) -> QuadratureRule:
    kind = cfg.error_rule or spec.error_rule.kind
    return QuadratureRule(kind=kind, nodes_per_axis=cfg.error_nodes, n_samples=cfg.mc_samples)


@dataclass
class RunManifest:
    config: list  # (key, text) pairs
    settings: dict
    trials: list  # TrialResult.record() dicts
    mean_error: float
    mean_flux_error: Optional[float] = None
    slice_errors: Optional[dict] = None

    def lines(self) -> list:
        out = ["# resolved configuration"]
        out += [f"{k} = {v}" for k, v in self.config]
        out.append("# example settings")
        out += [f"settings.{k} = {v}" for k, v in self.settings.items()]
        out.append("# results")
        for i, rec in enumerate(self.trials):
            for k, v in rec.items():
                out.append(f"trial.{i}.{k} = {_fmt(v)}")
        out.append(f"mean_error = {_fmt(self.mean_error)}")
        if self.mean_flux_error is not None:
            out.append(f"mean_flux_error = {_fmt(self.mean_flux_error)}")
        if self.slice_errors:
            for t, e in self.slice_errors.items():
                out.append(f"slice_error.t={t:g} = {_fmt(e)}")
        return out

    def to_text(self, timings: bool = True) -> str:
        lines = self.lines()
        if not timings:
            lines = [ln for ln in lines if ".time." not in ln]
        return "\n".join(lines) + "\n"

    def write(self, outdir) -> Path:
        outdir = Path(outdir)
        outdir.mkdir(parents=True, exist_ok=True)
        (outdir / "manifest.txt").write_text(self.to_text())
        write_errors_csv(outdir / "errors.csv", self.trials)
        return outdir


def _fmt(v) -> str:
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def write_errors_csv(path, records: Sequence[dict]) -> None:
    keys = []
    for rec in records:
        keys += [k for k in rec if k not in keys]
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=keys)
        w.writeheader()
        for rec in records:
            w.writerow({k: _fmt(v) for k, v in rec.items()})


def read_errors_csv(path) -> list:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def _trial_job(args):
    # exact-solution closures do not pickle, so workers rebuild the spec
    cfg, seed = args
    spec = spec_from_config(cfg)
    solver = SolverConfig(cfg.solver, cfg.rcond, scale_columns=cfg.scale_columns)
    return solve_trial(spec, seed, FdConfig(cfg.h1, cfg.h2), weights_from_config(cfg), solver,
                       cfg.flux_beta, rule_from_config(cfg, spec))


def run(cfg: RunConfig, write: bool = True) -> RunManifest:
    """Run ``cfg.trials`` independent trials; trial ``k`` is seeded with ``cfg.seed + k``."""
    spec = spec_from_config(cfg)
    fd = FdConfig(cfg.h1, cfg.h2)
    gamma = weights_from_config(cfg)
    solver = SolverConfig(cfg.solver, cfg.rcond, scale_columns=cfg.scale_columns)
    rule = rule_from_config(cfg, spec)
    seeds = [cfg.seed + k for k in range(cfg.trials)]
    want_solution = cfg.grid_resolution >= 2 or spec.problem.is_spacetime

    results = []
    if cfg.parallel_trials and cfg.trials > 1:
        jobs = [(cfg, s) for s in seeds]
        with ProcessPoolExecutor() as pool:
            results = list(pool.map(_trial_job, jobs))
    else:
        for k, s in enumerate(seeds):
            dump = cfg.dump_system if k == 0 else None
            results.append(solve_trial(spec, s, fd, gamma, solver, cfg.flux_beta, rule, dump,
                                       keep_solution=want_solution and k == 0))

    errors = [r.error for r in results]
    ferrs = [r.flux_error for r in results if r.flux_error is not None]
    first = results[0].solution
    if first is None and want_solution:
        first = solve_trial(spec, seeds[0], fd, gamma, solver, cfg.flux_beta, rule, keep_solution=True).solution

    manifest = RunManifest(
        config=cfg.to_items(),
        settings=spec.settings(),
        trials=[r.record() for r in results],
        mean_error=float(np.mean(errors)),
        mean_flux_error=float(np.mean(ferrs)) if ferrs else None,
        slice_errors=slice_errors(spec, first) if spec.problem.is_spacetime else None,
    )
    if write:
        outdir = manifest.write(cfg.out)
        if cfg.grid_resolution >= 2:
            dump_grid(first, spec.problem.exact, spec.problem.geom, cfg.grid_resolution, outdir)
    return manifest


def sweep(cfg: RunConfig, m_grid: Sequence[int], n_grid: Sequence[int], path=None) -> dict:
    """Mean error for every (N, m) pair; CSV rows are N, columns m."""
    if not m_grid or not n_grid:
        raise ValueError("sweep grids must be non-empty")
    table = {}
    for n in n_grid:
        for m in m_grid:
            man = run(replace(cfg, m=int(m), N=int(n), grid_resolution=0, dump_system=None), write=False)
            table[(int(n), int(m))] = man.mean_error
            logger.info("N=%d m=%d mean error %.3e", n, m, man.mean_error)
    if path is not None:
        write_sweep_csv(path, table, m_grid, n_grid)
    return table


def write_sweep_csv(path, table: dict, m_grid, n_grid) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["N"] + [f"m={m}" for m in m_grid])
        for n in n_grid:
            w.writerow([n] + [repr(float(table[(int(n), int(m))])) for m in m_grid])


def dump_grid(solution, exact, geom: GeometrySpec, resolution: int, outdir, slices=TIME_SLICES) -> list:
    """Write uniform-grid CSVs of the approximation, the exact solution and their difference.

    ``solution`` and ``exact`` are ``(x, t, sub)`` callables.  Space-time
    problems get one file per time slice.  Beyond three dimensions the grid
    covers the plane of the first two axes with the other coordinates at the
    box centre.
    """
    if resolution < 2:
        raise ValueError("grid resolution must be at least 2")
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    lo, hi = np.array(geom.box.lo), np.array(geom.box.hi)
    d = geom.dim
    axes = range(d) if d <= 3 else range(2)
    lines = [np.linspace(lo[k], hi[k], resolution) for k in axes]
    mesh = np.stack(np.meshgrid(*lines, indexing="ij"), axis=-1).reshape(-1, len(lines))
    x = np.tile((lo + hi) / 2, (len(mesh), 1))
    x[:, : len(lines)] = mesh
    names = ["x", "y", "z"][:d] if d <= 3 else [f"x{k + 1}" for k in range(d)]

    written = []
    times = slices if geom.is_spacetime else (None,)
    for t in times:
        tt = None if t is None else np.full(len(x), float(t))
        sub = geom.classify_robust(x, tt)
        u = np.asarray(solution(x, tt, sub))
        ue = np.asarray(exact(x, tt, sub))
        path = outdir / ("grid.csv" if t is None else f"grid_t{t:g}.csv")
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(names + ([] if t is None else ["t"]) + ["u_rho", "u_exact", "abs_err", "subdomain"])
            for i in range(len(x)):
                row = [repr(float(v)) for v in x[i]]
                if t is not None:
                    row.append(repr(float(t)))
                row += [repr(float(u[i])), repr(float(ue[i])), repr(float(abs(u[i] - ue[i]))), int(sub[i])]
                w.writerow(row)
        written.append(path)
    return written
