"""Solved output weights and evaluation of the resulting piecewise approximation."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DimensionMismatch
from .geometry import GeometrySpec
from .randnet import eval_basis


def network_inputs(x, t=None) -> np.ndarray:
    """Stack spatial points and (optional) times into network inputs; time is the last column."""
    x = np.asarray(x, dtype=float)
    if t is None:
        return x
    t = np.broadcast_to(np.asarray(t, dtype=float), (len(x),))
    return np.hstack([x, t[:, None]])


@dataclass
class SolutionCoefficients:
    """Per-subdomain output weights ``alpha`` and, for the mixed form, flux weights ``tau``.

    ``tau[s][k]`` pairs with ``flux_nets[s][k]`` and approximates component
    ``k`` of ``p = beta * grad(u)`` on subdomain ``s``.
    """

    geom: GeometrySpec
    nets: tuple
    alpha: tuple
    flux_nets: Optional[tuple] = None
    tau: Optional[tuple] = None

    def __post_init__(self):
        for net, a in zip(self.nets, self.alpha):
            if len(a) != net.m:
                raise DimensionMismatch("alpha length does not match the network width")
        if self.tau is not None:
            for nets_s, tau_s in zip(self.flux_nets, self.tau):
                for net, tk in zip(nets_s, tau_s):
                    if len(tk) != net.m:
                        raise DimensionMismatch("tau length does not match the network width")

    @classmethod
    def from_vector(cls, geom, nets, X, flux_nets=None) -> "SolutionCoefficients":
        """Split a solution vector ordered (alpha^0, alpha^1, ..., tau^{0,0}, tau^{0,1}, ...)."""
        X = np.asarray(X, dtype=float)
        pos = 0
        alpha = []
        for net in nets:
            alpha.append(X[pos:pos + net.m])
            pos += net.m
        tau = None
        if flux_nets is not None:
            tau = []
            for nets_s in flux_nets:
                row = []
                for net in nets_s:
                    row.append(X[pos:pos + net.m])
                    pos += net.m
                tau.append(tuple(row))
            tau = tuple(tau)
        if pos != len(X):
            raise DimensionMismatch(f"solution vector has {len(X)} entries, networks need {pos}")
        return cls(geom, tuple(nets), tuple(alpha), None if flux_nets is None else tuple(flux_nets), tau)

    def __call__(self, x, t, sub):
        x = np.asarray(x, dtype=float)
        sub = np.asarray(sub)
        out = np.zeros(len(x))
        for s in np.unique(sub):
            rows = sub == s
            inp = network_inputs(x[rows], None if t is None else np.asarray(t)[rows])
            out[rows] = eval_basis(self.nets[int(s)], inp) @ self.alpha[int(s)]
        return out

    def evaluate(self, x, t=None) -> np.ndarray:
        """Approximate solution at arbitrary points, classifying them first."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        return self(x, t, self.geom.classify_robust(x, t))

    def flux(self, x, t, sub):
        if self.tau is None:
            raise DimensionMismatch("no flux approximation in a strong-form solution")
        x = np.asarray(x, dtype=float)
        sub = np.asarray(sub)
        out = np.zeros((len(x), self.geom.dim))
        for s in np.unique(sub):
            rows = sub == s
            inp = network_inputs(x[rows], None if t is None else np.asarray(t)[rows])
            for k, (net, tk) in enumerate(zip(self.flux_nets[int(s)], self.tau[int(s)])):
                out[rows, k] = eval_basis(net, inp) @ tk
        return out
