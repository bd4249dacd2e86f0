"""Exact Gaussian sampling of fractional Brownian drivers.

Two generators with the same law on the grid: a dense Cholesky factor of
the stationary increment covariance (gold standard, cost O(n^3) once per
(hurst, n)) and a circulant embedding of the increment autocovariance
(O(n log n) per path).  Variates come from a counter-based Philox stream
keyed by (seed, purpose, path index, component), so any path can be
regenerated in isolation.

Paths are produced on the main segment [0, T] with W(0) = 0 and extended
by the constant 0 over the history segment [-r, 0].
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grids import SamplePath, TimeGrid

__all__ = [
    "FbmConfig",
    "fbm_covariance",
    "fgn_autocovariance",
    "generate_fbm",
    "sample_fbm_batch",
    "keyed_generator",
]

#: purpose tag for driver sampling in the keyed RNG scheme.
PURPOSE_FBM = 1

#: negative circulant eigenvalues larger than this fraction of the top
#: eigenvalue count as real mass rather than roundoff noise.
_EIG_NOISE_REL = 1e-10
#: total negative mass below this fraction of the spectrum is clamped;
#: anything worse falls back to the Cholesky generator.
_EIG_MASS_REL = 1e-8

_METHODS = ("exact-cholesky", "circulant")


@dataclass(frozen=True)
class FbmConfig:
    """Sampling configuration: Hurst index, components, seed, generator."""

    hurst: float
    dim: int = 1
    seed: int = 0
    method: str = "circulant"

    def __post_init__(self):
        if not 0.0 < self.hurst < 1.0:
            raise ValueError(f"hurst must lie in (0, 1), got {self.hurst}")
        if self.dim < 1:
            raise ValueError(f"dim must be >= 1, got {self.dim}")
        if self.seed < 0:
            raise ValueError(f"seed must be >= 0, got {self.seed}")
        if self.method not in _METHODS:
            raise ValueError(
                f"method must be one of {_METHODS}, got {self.method!r}"
            )


def fbm_covariance(s, t, hurst: float):
    """Cov(W(s), W(t)) = (s^2H + t^2H - |t-s|^2H) / 2 for one component."""
    s = np.asarray(s, dtype=float)
    t = np.asarray(t, dtype=float)
    two_h = 2.0 * hurst
    return 0.5 * (np.abs(s) ** two_h + np.abs(t) ** two_h - np.abs(t - s) ** two_h)


def fgn_autocovariance(hurst: float, n_lags: int) -> np.ndarray:
    """Autocovariance of unit-step increments at lags 0..n_lags."""
    k = np.arange(n_lags + 1, dtype=float)
    two_h = 2.0 * hurst
    return 0.5 * (
        (k + 1.0) ** two_h - 2.0 * k ** two_h + np.abs(k - 1.0) ** two_h
    )


def keyed_generator(seed: int, *key: int) -> np.random.Generator:
    """Philox generator derived from (seed, purpose, index, ...)."""
    ss = np.random.SeedSequence((int(seed),) + tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(ss))


_chol_cache: dict[tuple[float, int], np.ndarray] = {}
_eig_cache: dict[tuple[float, int], np.ndarray] = {}


def _cholesky_factor(hurst: float, n: int) -> np.ndarray:
    key = (hurst, n)
    L = _chol_cache.get(key)
    if L is None:
        rho = fgn_autocovariance(hurst, n - 1)
        idx = np.arange(n)
        C = rho[np.abs(idx[:, None] - idx[None, :])]
        L = np.linalg.cholesky(C)
        if len(_chol_cache) > 8:
            _chol_cache.clear()
        _chol_cache[key] = L
    return L


def _circulant_eigenvalues(hurst: float, n: int) -> np.ndarray:
    """Eigenvalues of the length-2n circulant embedding, or None-like
    sentinel (raises ValueError) when the embedding fails the mass test."""
    key = (hurst, n)
    eig = _eig_cache.get(key)
    if eig is None:
        rho = fgn_autocovariance(hurst, n)
        row = np.concatenate((rho[:n], [rho[n]], rho[1:n][::-1]))
        eig = np.fft.fft(row).real
        top = float(np.max(eig))
        neg = eig < 0.0
        heavy = eig < -_EIG_NOISE_REL * top
        if np.any(heavy):
            mass = float(-np.sum(eig[heavy]))
            total = float(np.sum(np.abs(eig)))
            if mass >= _EIG_MASS_REL * total:
                raise ValueError(
                    f"circulant embedding for hurst={hurst}, n={n} has "
                    f"negative eigenvalue mass {mass:.3e} (spectrum {total:.3e})"
                )
        eig = np.where(neg, 0.0, eig)
        if len(_eig_cache) > 8:
            _eig_cache.clear()
        _eig_cache[key] = eig
    return eig


def _increments_cholesky(hurst: float, n: int, rng: np.random.Generator,
                         count: int = 1) -> np.ndarray:
    L = _cholesky_factor(hurst, n)
    z = rng.standard_normal((n, count))
    return (L @ z).T


def _increments_circulant(hurst: float, n: int, rng: np.random.Generator,
                          count: int = 1) -> np.ndarray:
    eig = _circulant_eigenvalues(hurst, n)
    m = 2 * n
    scale = np.sqrt(eig)
    out = np.empty((count, n))
    for i in range(count):
        u = rng.standard_normal(m)
        v = rng.standard_normal(m)
        z = np.fft.ifft(scale * (u + 1j * v)) * np.sqrt(m)
        out[i] = z.real[:n]
    return out


def generate_fbm(grid: TimeGrid, cfg: FbmConfig, index: int = 0) -> SamplePath:
    """One fBm sample on the grid: dim components, zero on [-r, 0].

    Increments on [0, T] carry the exact joint law of fbm_covariance
    under either method; `index` addresses independent paths under the
    same config.  If the circulant embedding is rejected, the Cholesky
    generator is used and the result metadata carries a fallback flag.
    """
    n = grid.n_main
    h = grid.h
    values = np.zeros((grid.n_nodes, cfg.dim))
    method_used, fallback = cfg.method, False
    for c in range(cfg.dim):
        rng = keyed_generator(cfg.seed, PURPOSE_FBM, index, c)
        if cfg.method == "circulant":
            try:
                incr = _increments_circulant(cfg.hurst, n, rng)
            except ValueError:
                method_used, fallback = "exact-cholesky", True
                rng = keyed_generator(cfg.seed, PURPOSE_FBM, index, c)
                incr = _increments_cholesky(cfg.hurst, n, rng)
        else:
            incr = _increments_cholesky(cfg.hurst, n, rng)
        values[grid.index_of_zero + 1:, c] = np.cumsum(incr[0]) * h ** cfg.hurst
    meta = {
        "hurst": cfg.hurst,
        "seed": cfg.seed,
        "index": index,
        "method": method_used,
        "fallback": fallback,
    }
    return SamplePath(grid, values, meta)


def sample_fbm_batch(
    grid: TimeGrid,
    cfg: FbmConfig,
    count: int,
    component: int = 0,
    chunk: int = 16384,
) -> np.ndarray:
    """Many independent single-component paths on [0, T], shape (count, n+1).

    Drawn from one keyed stream; meant for distributional tests where
    per-path addressability is not needed.
    """
    n = grid.n_main
    rng = keyed_generator(cfg.seed, PURPOSE_FBM, component)
    out = np.empty((count, n + 1))
    out[:, 0] = 0.0
    done = 0
    while done < count:
        take = min(chunk, count - done)
        if cfg.method == "exact-cholesky":
            incr = _increments_cholesky(cfg.hurst, n, rng, take)
        else:
            incr = _increments_circulant(cfg.hurst, n, rng, take)
        out[done: done + take, 1:] = np.cumsum(incr, axis=1) * grid.h ** cfg.hurst
        done += take
    return out
