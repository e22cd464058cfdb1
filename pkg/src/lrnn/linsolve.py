"""Dense least-squares solves for the collocation systems.

SVD goes through LAPACK ``gelsd``; QR uses column pivoting and returns the
basic solution on the numerically independent columns.  The normal-equations
path accumulates ``M^T M`` in row chunks and truncates its spectrum.

By default the columns are scaled to unit norm first.  That leaves the
least-squares minimizer of a full-rank system unchanged but makes the
rank cutoff relative to each basis function rather than to the loudest
block, which matters when coefficients differ by many orders of magnitude
across subdomains.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import ConfigError, DimensionMismatch, NonFiniteInput

logger = logging.getLogger(__name__)

METHODS = ("svd", "qr", "normal")


@dataclass(frozen=True)
class SolverConfig:
    method: str = "svd"
    rcond: float = 1e-12
    chunk_rows: int = 4096
    scale_columns: bool = True

    def __post_init__(self):
        if self.method not in METHODS:
            raise ConfigError(f"solver method must be one of {METHODS}, got {self.method!r}")
        if not 0 < self.rcond < 1:
            raise ConfigError("rcond must lie in (0, 1)")


@dataclass
class LstsqDiagnostics:
    method: str
    rank: int
    sigma_max: float
    sigma_min_kept: float
    residual_norm: float

    def as_dict(self) -> dict:
        return dict(vars(self))


def _normal_solve(M, R, cfg):
    n = M.shape[1]
    G = np.zeros((n, n))
    b = np.zeros(n)
    for a in range(0, M.shape[0], cfg.chunk_rows):
        blk = M[a:a + cfg.chunk_rows]
        G += blk.T @ blk
        b += blk.T @ R[a:a + cfg.chunk_rows]
    lam, V = np.linalg.eigh(G)
    lam_max = max(float(lam[-1]), 0.0)
    # eigenvalues of M^T M are squared singular values; below eps the split is noise anyway
    cut = max(cfg.rcond**2, np.finfo(float).eps * n) * lam_max
    keep = lam > cut
    X = V[:, keep] @ ((V[:, keep].T @ b) / lam[keep])
    sig = np.sqrt(np.clip(lam[keep], 0, None))
    return X, int(keep.sum()), float(np.sqrt(lam_max)), float(sig.min()) if keep.any() else 0.0


def lstsq(M, R, cfg: SolverConfig = SolverConfig()):
    """Minimize ``||M X - R||_2``.

    Returns ``(X, diagnostics)``.  Under ``svd`` the minimum-norm minimizer is
    returned, with singular values below ``rcond * sigma_max`` treated as zero.
    """
    M = np.asarray(M, dtype=float)
    R = np.asarray(R, dtype=float)
    if M.ndim != 2 or M.shape[0] < 1 or M.shape[1] < 1:
        raise DimensionMismatch(f"matrix must be 2-D and non-empty, got {M.shape}")
    if R.shape != (M.shape[0],):
        raise DimensionMismatch(f"rhs must have shape ({M.shape[0]},), got {R.shape}")
    if not (np.all(np.isfinite(M)) and np.all(np.isfinite(R))):
        raise NonFiniteInput("matrix or right-hand side contains NaN or inf")

    A = M
    scale = None
    if cfg.scale_columns:
        scale = np.linalg.norm(M, axis=0)
        scale[scale == 0] = 1.0
        A = M / scale

    if cfg.method == "svd":
        X, _, rank, s = scipy.linalg.lstsq(A, R, cond=cfg.rcond, lapack_driver="gelsd",
                                           check_finite=False, overwrite_a=A is not M)
        sigma_max = float(s[0]) if len(s) else 0.0
        sigma_min = float(s[rank - 1]) if rank > 0 else 0.0
    elif cfg.method == "qr":
        Q, Rf, piv = scipy.linalg.qr(A, mode="economic", pivoting=True, check_finite=False)
        diag = np.abs(np.diag(Rf))
        sigma_max = float(diag[0])
        rank = int(np.sum(diag > cfg.rcond * sigma_max)) if sigma_max > 0 else 0
        sigma_min = float(diag[rank - 1]) if rank > 0 else 0.0
        X = np.zeros(A.shape[1])
        if rank:
            y = scipy.linalg.solve_triangular(Rf[:rank, :rank], Q[:, :rank].T @ R, check_finite=False)
            X[piv[:rank]] = y
    else:
        X, rank, sigma_max, sigma_min = _normal_solve(A, R, cfg)
    del A
    if scale is not None:
        X = X / scale
    res = float(np.linalg.norm(M @ X - R))
    diag = LstsqDiagnostics(cfg.method, int(rank), sigma_max, sigma_min, res)
    logger.debug("lstsq %s: rank=%d sigma_max=%.3e residual=%.3e", cfg.method, rank, sigma_max, res)
    return X, diag
