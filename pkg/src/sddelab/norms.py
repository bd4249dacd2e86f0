"""Fractional norms and the derivative functional behind Young-type bounds.

The family, for a path f on [-r, T] and a driver g on [0, T]:

* norm_alpha_infty: sup over t of |f(t)| plus the backward singular
  integral of |f(t) - f(s)| (t - s)^(-alpha-1) from -r to t.
* norm_holder: sup norm plus the best Hoelder-mu ratio over node pairs.
* norm_alpha_lambda: the same node functional as norm_alpha_infty damped
  by exp(-lambda * t); equivalent to it with r- and T-dependent factors.
* weyl_derivative / lambda_alpha: the fractional derivative of g of order
  1 - alpha anchored at pairs s < t (phase dropped) and the scaled sup of
  its magnitude.
* norm_1ma_infty_T: the (1-alpha)-type driver seminorm whose ratio with
  Gamma factors dominates lambda_alpha.
* norm_alpha_1: the L1-type norm appearing in the integral bound
  certificate.
* delta_r: sup over u of the backward integral of delta-powered
  increments, the quantity controlling the sigma-increment estimates.

All integrals discretize by the product-linear rule in _singular; vector
values enter through euclidean increment magnitudes.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import gamma as _gamma

from ._singular import (
    backward_increment_integrals,
    cumulative_from_zero,
    hat_weights,
)
from .grids import DelayAlignmentError, GridError, SamplePath, main_segment

__all__ = [
    "norm_alpha_infty",
    "norm_holder",
    "norm_alpha_lambda",
    "weyl_derivative",
    "lambda_alpha",
    "norm_1ma_infty_T",
    "norm_alpha_1",
    "delta_r",
    "estimate_holder_exponent",
    "NormReport",
    "compute_norm_report",
]

_BLOCK = 256


def _check_alpha(alpha: float) -> None:
    if not 0.0 < alpha < 0.5:
        raise ValueError(f"alpha must lie in (0, 1/2), got {alpha}")


def _start_index(f: SamplePath, r: float | None) -> int:
    """Node index of -r inside f's grid (default: the grid's own start)."""
    grid = f.grid
    if r is None:
        return 0
    if r < 0:
        raise GridError(f"delay r must be >= 0, got {r}")
    steps = r / grid.h
    n = int(round(steps))
    if abs(steps - n) > 1e-9:
        raise DelayAlignmentError(f"r={r} is not a whole number of grid steps")
    if n > grid.n_history:
        raise GridError(
            f"r={r} needs {n} history steps but the grid carries {grid.n_history}"
        )
    return grid.index_of_zero - n


def _magnitudes(values: np.ndarray) -> np.ndarray:
    return np.linalg.norm(values, axis=1)


def norm_alpha_infty(f: SamplePath, alpha: float, r: float | None = None) -> float:
    """sup_t ( |f(t)| + int_{-r}^t |f(t)-f(s)| (t-s)^(-alpha-1) ds )."""
    _check_alpha(alpha)
    s0 = _start_index(f, r)
    I = backward_increment_integrals(f.values, alpha + 1.0, f.grid.h, start=s0)
    B = _magnitudes(f.values[s0:]) + I[s0:]
    return float(np.max(B))


def _holder_seminorm(values: np.ndarray, mu: float, h: float) -> float:
    N = values.shape[0] - 1
    if N < 1:
        return 0.0
    m_idx = np.arange(N + 1)
    denom = np.concatenate(([np.inf], (m_idx[1:] * h) ** mu))
    best = 0.0
    for i0 in range(0, N, _BLOCK):
        rows = np.arange(i0, min(i0 + _BLOCK, N))
        idx = rows[:, None] + m_idx[None, :]
        valid = idx <= N
        diff = values[np.minimum(idx, N)] - values[rows][:, None, :]
        mag = np.sqrt(np.sum(diff * diff, axis=2))
        ratio = np.where(valid, mag / denom[None, :], 0.0)
        best = max(best, float(ratio.max()))
    return best


def norm_holder(f: SamplePath, mu: float, r: float | None = None) -> float:
    """sup norm plus the Hoelder-mu increment ratio over [-r, T]."""
    if not 0.0 < mu <= 1.0:
        raise ValueError(f"Hoelder exponent mu must lie in (0, 1], got {mu}")
    s0 = _start_index(f, r)
    vals = f.values[s0:]
    return float(np.max(_magnitudes(vals))) + _holder_seminorm(vals, mu, f.grid.h)


def norm_alpha_lambda(
    f: SamplePath, alpha: float, lam: float, r: float | None = None
) -> float:
    """Weighted variant: sup_t e^(-lambda t) ( |f(t)| + backward integral ).

    The solver uses lambda >= 1; any lambda >= 0 is accepted (lambda = 0
    recovers norm_alpha_infty).
    """
    _check_alpha(alpha)
    if lam < 0:
        raise ValueError(f"lambda must be >= 0, got {lam}")
    s0 = _start_index(f, r)
    I = backward_increment_integrals(f.values, alpha + 1.0, f.grid.h, start=s0)
    B = _magnitudes(f.values[s0:]) + I[s0:]
    # large lambda overflows the history weight e^(lambda r); a node with an
    # exactly zero profile still contributes 0, not inf * 0 = nan
    with np.errstate(over="ignore"):
        weights = np.exp(-lam * f.grid.times()[s0:])
        vals = np.where(B == 0.0, 0.0, weights * B)
    return float(np.max(vals))


def weyl_derivative(g: SamplePath, alpha: float, s: float, t: float) -> float:
    """Order-(1-alpha) right-sided derivative of g between nodes s < t.

    Returns the real value with the complex phase dropped:
      (1/Gamma(alpha)) [ (g(s)-g(t))/(t-s)^(1-alpha)
                         + (1-alpha) int_s^t (g(s)-g(u)) (u-s)^(alpha-2) du ].
    """
    _check_alpha(alpha)
    if g.dim != 1:
        raise ValueError("weyl_derivative expects a scalar path")
    i, j = g.grid.index_of(s), g.grid.index_of(t)
    if not i < j:
        raise ValueError(f"need s < t on the grid, got s={s}, t={t}")
    h = g.grid.h
    m = j - i
    P, Q = hat_weights(2.0 - alpha, h, m)
    psi = g.values[i: j + 1, 0] - g.values[i, 0]
    K = float(np.dot(P[1:], psi[:-1]) + np.dot(Q[1:], psi[1:]))
    bracket = (g.values[i, 0] - g.values[j, 0]) / (m * h) ** (1.0 - alpha)
    bracket -= (1.0 - alpha) * K
    return bracket / float(_gamma(alpha))


def _weyl_sup_onecomp(vals: np.ndarray, alpha: float, h: float) -> float:
    """sup over node pairs of |bracket| for one scalar component.

    One pass per anchor i: signed increments psi_m = g(t_{i+m}) - g(t_i),
    the anchored hat-rule integral K_m by cumulative sum, and the bracket
    magnitude |psi_m / (mh)^(1-alpha) + (1-alpha) K_m|.
    """
    N = len(vals) - 1
    inv_denom = (np.arange(1, N + 1) * h) ** (alpha - 1.0)
    P, Q = hat_weights(2.0 - alpha, h, N)
    Pc, Qc = P[1:], Q[1:]
    best = 0.0
    for i in range(N):
        L = N - i
        psi = vals[i + 1 :] - vals[i]
        cells = Qc[:L] * psi
        cells[1:] += Pc[1:L] * psi[:-1]
        K = np.cumsum(cells)
        np.multiply(psi, inv_denom[:L], out=psi)
        psi += (1.0 - alpha) * K
        m = float(np.max(np.abs(psi)))
        if m > best:
            best = m
    return best


def lambda_alpha(g: SamplePath, alpha: float) -> float:
    """(1/Gamma(1-alpha)) sup_{s<t} |weyl_derivative(g, alpha, s, t)|.

    Evaluated on the main segment [0, T]; multi-component drivers report
    the largest component value.
    """
    _check_alpha(alpha)
    gm = main_segment(g)
    h = gm.grid.h
    best = max(
        _weyl_sup_onecomp(gm.values[:, c], alpha, h) for c in range(gm.dim)
    )
    return best / float(_gamma(alpha) * _gamma(1.0 - alpha))


def norm_1ma_infty_T(g: SamplePath, alpha: float) -> float:
    """sup_{s<t} ( |g(t)-g(s)|/(t-s)^(1-alpha)
                   + int_s^t |g(u)-g(s)| (u-s)^(alpha-2) du ) on [0, T]."""
    _check_alpha(alpha)
    gm = main_segment(g)
    h = gm.grid.h
    N = gm.grid.n_main
    if N < 1:
        return 0.0
    inv_denom = (np.arange(1, N + 1) * h) ** (alpha - 1.0)
    P, Q = hat_weights(2.0 - alpha, h, N)
    Pc, Qc = P[1:], Q[1:]
    best = 0.0
    vals2 = gm.values
    for i in range(N):
        L = N - i
        if vals2.shape[1] == 1:
            psi = np.abs(vals2[i + 1 :, 0] - vals2[i, 0])
        else:
            diff = vals2[i + 1 :] - vals2[i]
            psi = np.sqrt(np.sum(diff * diff, axis=1))
        cells = Qc[:L] * psi
        cells[1:] += Pc[1:L] * psi[:-1]
        K = np.cumsum(cells)
        np.multiply(psi, inv_denom[:L], out=psi)
        psi += K
        m = float(np.max(psi))
        if m > best:
            best = m
    return best


def norm_alpha_1(f: SamplePath, alpha: float) -> float:
    """int_0^T |f(s)| s^-alpha ds + the double increment integral on [0, T]."""
    _check_alpha(alpha)
    fm = main_segment(f)
    h = fm.grid.h
    p = _magnitudes(fm.values)
    term1 = float(cumulative_from_zero(p, alpha, h)[-1])
    E = backward_increment_integrals(fm.values, alpha + 1.0, h, start=0)
    term2 = float(np.trapezoid(E, dx=h))
    return term1 + term2


def delta_r(
    f: SamplePath, alpha: float, delta: float, r: float | None = None
) -> float:
    """sup_u int_{-r}^u |f(u)-f(s)|^delta (u-s)^(-alpha-1) ds."""
    _check_alpha(alpha)
    if not 0.0 < delta <= 1.0:
        raise ValueError(f"delta must lie in (0, 1], got {delta}")
    if not alpha < delta / (1.0 + delta):
        raise ValueError(
            f"delta_r needs alpha < delta/(1+delta); got alpha={alpha}, delta={delta}"
        )
    s0 = _start_index(f, r)
    I = backward_increment_integrals(
        f.values, alpha + 1.0, f.grid.h, delta=delta, start=s0
    )
    return float(np.max(I[s0:]))


def estimate_holder_exponent(f: SamplePath) -> float:
    """Least-squares slope of log sup-increment against log lag.

    A rough diagnostic of the Hoelder regularity of a sampled path, used
    to sanity-check drivers; dyadic lags up to a quarter of the grid.
    """
    vals = f.values
    N = vals.shape[0] - 1
    lags, sups = [], []
    m = 1
    while m <= max(N // 4, 1):
        diff = vals[m:] - vals[:-m]
        sup = float(np.max(np.linalg.norm(diff, axis=1)))
        if sup > 0:
            lags.append(m * f.grid.h)
            sups.append(sup)
        m *= 2
    if len(lags) < 2:
        raise ValueError("path too short or constant: cannot estimate exponent")
    slope = np.polyfit(np.log(lags), np.log(sups), 1)[0]
    return float(slope)


@dataclass(frozen=True)
class NormReport:
    """All norm functionals of one path (plus its driver, when distinct)."""

    alpha: float
    lam: float
    delta: float
    r: float
    norm_alpha_infty: float
    norm_holder: float
    norm_alpha_lambda: float
    lambda_alpha: float
    delta_r: float
    norm_1ma: float
    norm_alpha_1: float


def compute_norm_report(
    f: SamplePath,
    alpha: float,
    lam: float = 1.0,
    delta: float = 1.0,
    r: float | None = None,
    driver: SamplePath | None = None,
) -> NormReport:
    """Evaluate the whole norm family on f.

    The driver functionals (lambda_alpha, norm_1ma) are taken from
    `driver` when given, else from f's own main segment.  The Hoelder
    norm uses mu = 1 - alpha.
    """
    g = driver if driver is not None else f
    r_eff = f.grid.r if r is None else float(r)
    return NormReport(
        alpha=alpha,
        lam=lam,
        delta=delta,
        r=r_eff,
        norm_alpha_infty=norm_alpha_infty(f, alpha, r),
        norm_holder=norm_holder(f, 1.0 - alpha, r),
        norm_alpha_lambda=norm_alpha_lambda(f, alpha, lam, r),
        lambda_alpha=lambda_alpha(g, alpha),
        delta_r=delta_r(f, alpha, delta, r),
        norm_1ma=norm_1ma_infty_T(g, alpha),
        norm_alpha_1=norm_alpha_1(f, alpha),
    )
