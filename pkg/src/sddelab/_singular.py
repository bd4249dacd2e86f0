"""Product-linear quadrature for weakly singular kernels on uniform grids.

All norm functionals and bound checks integrate quantities of the form
phi(s) * v^(-kappa) where v is the distance to an anchor node and phi is
known at grid nodes.  The rule used everywhere: interpolate phi piecewise
linearly between nodes and integrate the kernel moments analytically per
cell.  For kappa >= 1 the anchor cell is integrable because phi vanishes
at the anchor (phi is an increment of the path there), which the product
rule preserves exactly.

Cell weights are expressed through the two hat functions on each cell, so
every discrete integral is a nonnegative combination of nodal phi values.
That makes nodewise inequalities between integrands carry over to the
discrete integrals exactly, which the bound-checking modules rely on.
"""
from __future__ import annotations

from typing import Iterator

import numpy as np

__all__ = [
    "hat_weights",
    "backward_increment_integrals",
    "backward_profile_integrals",
    "backward_matrix_integrals",
    "lag_block_pairs",
    "forward_increment_matrix",
    "cumulative_from_zero",
    "quadrature_slack",
]

#: tolerance granted to inequality checks built on this quadrature:
#: absolute + relative slack on the right-hand side scale.
SLACK_ABS = 1e-8
SLACK_REL = 1e-6

_DEFAULT_BLOCK = 256


def quadrature_slack(scale: float | np.ndarray) -> float | np.ndarray:
    """Permitted slack for an inequality whose sides have the given scale."""
    return SLACK_ABS + SLACK_REL * np.abs(scale)


def hat_weights(kappa: float, h: float, n_cells: int):
    """Hat-function weights of the kernel v**(-kappa) on uniform cells.

    Returns (P, Q), each of length n_cells + 1 and indexed by lag l >= 1
    (entry 0 is unused).  Cell l spans v in [(l-1)h, lh]; P[l] multiplies
    the nodal value at the near end (l-1)h, Q[l] the value at the far end
    l*h.  Both are nonnegative, and P[l] + Q[l] is the cell's kernel mass.

    For kappa >= 1 the near weight of the first cell is set to zero: the
    integral only converges when the integrand vanishes at the anchor, and
    then the anchor value contributes nothing.
    """
    if not 0.0 <= kappa < 2.0:
        raise ValueError(f"kernel exponent kappa={kappa} outside [0, 2)")
    if n_cells < 1:
        return np.zeros(1), np.zeros(1)
    singular = kappa >= 1.0
    l = np.arange(n_cells + 1, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        if abs(kappa - 1.0) < 1e-12:
            g1 = np.log(l, where=l > 0, out=np.full_like(l, -np.inf))
            m0 = g1[1:] - g1[:-1]
        else:
            p1 = l ** (1.0 - kappa)
            m0 = (p1[1:] - p1[:-1]) * h ** (1.0 - kappa) / (1.0 - kappa)
        p2 = l ** (2.0 - kappa)
        m1 = (p2[1:] - p2[:-1]) * h ** (2.0 - kappa) / (2.0 - kappa)
    if singular:
        m0[0] = 0.0
    P = l[1:] * m0 - m1 / h
    Q = m1 / h - l[:-1] * m0
    if singular:
        P[0] = 0.0
    return np.concatenate(([0.0], P)), np.concatenate(([0.0], Q))


def _increment_magnitude(diff: np.ndarray, delta: float) -> np.ndarray:
    """Euclidean magnitude of increments, optionally raised to delta."""
    if diff.ndim == 3:
        mag = np.sqrt(np.sum(diff * diff, axis=2))
    else:
        mag = np.abs(diff)
    if delta != 1.0:
        mag = mag ** delta
    return mag


def backward_increment_integrals(
    values: np.ndarray,
    kappa: float,
    h: float,
    delta: float = 1.0,
    start: int = 0,
    block: int = _DEFAULT_BLOCK,
) -> np.ndarray:
    """I[j] = integral over s in [t_start, t_j] of |f(t_j)-f(s)|^delta (t_j-s)^-kappa ds.

    values has shape (n_nodes,) or (n_nodes, d); the increment magnitude is
    euclidean over components.  Entries with j <= start are zero.
    """
    vals = np.asarray(values, dtype=float)
    if vals.ndim == 2 and vals.shape[1] == 1:
        vals = vals[:, 0]
    N = vals.shape[0] - 1
    out = np.zeros(N + 1)
    n_lag = N - start
    if n_lag < 1:
        return out
    P, Q = hat_weights(kappa, h, n_lag + 1)
    # collapsed per-node weight: W[m] = Q[m] + P[m+1]; the farthest node of
    # each row only carries Q, corrected below.
    W = Q[1:-1] + P[2:]
    if vals.ndim == 1:
        # scalar fast path: one triangular dot per row, weights read as
        # contiguous suffixes of the reversed collapsed-weight vector
        RW = np.ascontiguousarray(W[::-1])
        L = len(W)
        for j in range(start + 1, N + 1):
            m = j - start
            phi = np.abs(vals[start:j] - vals[j])
            if delta != 1.0:
                phi **= delta
            out[j] = np.dot(phi, RW[L - m :]) - P[m + 1] * phi[0]
        return out
    base = vals[start:]
    for j0 in range(start + 1, N + 1, block):
        rows = np.arange(j0, min(j0 + block, N + 1))
        diff = base[None, :, :] - vals[rows][:, None, :]
        phi = _increment_magnitude(diff, delta)
        lags = rows[:, None] - start - np.arange(base.shape[0])[None, :]
        wm = np.where(lags >= 1, W[np.clip(lags - 1, 0, len(W) - 1)], 0.0)
        I = np.einsum("bk,bk->b", wm, phi) - P[rows - start + 1] * phi[:, 0]
        out[rows] = I
    return out


def backward_profile_integrals(
    profile: np.ndarray, kappa: float, h: float, start: int = 0
) -> np.ndarray:
    """I[j] = integral over s in [t_start, t_j] of p(s) (t_j - s)^-kappa ds.

    The profile does not vanish at the anchor, so this requires kappa < 1.
    """
    if kappa >= 1.0:
        raise ValueError("profile integrals need kappa < 1 (no anchor zero)")
    p = np.asarray(profile, dtype=float)
    N = len(p) - 1
    out = np.zeros(N + 1)
    n_lag = N - start
    if n_lag < 1:
        return out
    P, Q = hat_weights(kappa, h, n_lag + 1)
    W = np.concatenate(([P[1]], Q[1:-1] + P[2:]))
    conv = np.convolve(p[start:], W)[: n_lag + 1]
    rows = np.arange(start + 1, N + 1)
    out[rows] = conv[1:] - P[rows - start + 1] * p[start]
    return out


def backward_matrix_integrals(
    phi: np.ndarray, kappa: float, h: float, start: int = 0
) -> np.ndarray:
    """I[j] = integral of phi[j, k-as-s] (t_j - s)^-kappa ds from t_start to t_j.

    phi[j, k] holds the integrand at node k for anchor j (lower triangle
    used).  For kappa >= 1 the diagonal phi[j, j] must vanish.
    """
    phi = np.asarray(phi, dtype=float)
    N = phi.shape[0] - 1
    out = np.zeros(N + 1)
    n_lag = N - start
    if n_lag < 1:
        return out
    P, Q = hat_weights(kappa, h, n_lag + 1)
    W = np.concatenate(([P[1]], Q[1:-1] + P[2:]))
    for j in range(start + 1, N + 1):
        m = j - start
        seg = phi[j, start: j + 1]
        out[j] = np.dot(W[:m + 1][::-1], seg) - P[m + 1] * seg[0]
    return out


def lag_block_pairs(
    values: np.ndarray,
    kappa: float,
    h: float,
    signed: bool,
    delta: float = 1.0,
    block: int = _DEFAULT_BLOCK,
) -> Iterator[tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]]:
    """Pairwise increment and anchored-integral blocks in lag coordinates.

    Yields (rows, psi, K, valid) where for anchor i = rows[b] and lag m:
      psi[b, m]  = f(t_{i+m}) - f(t_i) (signed, scalar values only) or
                   |f(t_{i+m}) - f(t_i)|^delta,
      K[b, m]    = integral over u in [t_i, t_{i+m}] of psi_i(u) (u-t_i)^-kappa du,
      valid[b,m] = i + m <= last node.
    Invalid entries are zeroed.  Requires kappa >= 1 (anchor zero of psi).
    """
    vals = np.asarray(values, dtype=float)
    vector = vals.ndim == 2
    if signed and vector:
        raise ValueError("signed pair blocks are scalar-only")
    N = vals.shape[0] - 1
    if N < 1:
        return
    P, Q = hat_weights(kappa, h, N)
    m_idx = np.arange(N + 1)
    for i0 in range(0, N, block):
        rows = np.arange(i0, min(i0 + block, N))
        idx = rows[:, None] + m_idx[None, :]
        valid = idx <= N
        idxc = np.minimum(idx, N)
        vb = vals[idxc]
        diff = vb - (vals[rows][:, None, :] if vector else vals[rows][:, None])
        psi = diff if signed else _increment_magnitude(diff, delta)
        psi = np.where(valid, psi, 0.0)
        cells = P[1:] * psi[:, :-1] + Q[1:] * psi[:, 1:]
        cells = np.where(valid[:, 1:], cells, 0.0)
        K = np.concatenate(
            (np.zeros((len(rows), 1)), np.cumsum(cells, axis=1)), axis=1
        )
        yield rows, psi, K, valid


def forward_increment_matrix(
    values: np.ndarray, kappa: float, h: float, delta: float = 1.0
) -> np.ndarray:
    """Full matrix Psi[i, j] = integral over [t_i, t_j] of |f(u)-f(t_i)|^delta (u-t_i)^-kappa du.

    Materializes (n_nodes)^2 floats; intended for moderate grids.
    """
    vals = np.asarray(values, dtype=float)
    N = vals.shape[0] - 1
    Psi = np.zeros((N + 1, N + 1))
    for rows, _psi, K, valid in lag_block_pairs(
        vals, kappa, h, signed=False, delta=delta
    ):
        idx = rows[:, None] + np.arange(N + 1)[None, :]
        sel = valid.ravel()
        rr = np.repeat(rows, N + 1)[sel]
        cc = idx.ravel()[sel]
        Psi[rr, cc] = K.ravel()[sel]
    return Psi


def cumulative_from_zero(profile: np.ndarray, kappa: float, h: float) -> np.ndarray:
    """J[j] = integral over s in [t_0, t_j] of p(s) (s - t_0)^-kappa ds.

    Kernel anchored at the segment start; requires kappa < 1.
    """
    if kappa >= 1.0:
        raise ValueError("start-anchored integrals need kappa < 1")
    p = np.asarray(profile, dtype=float)
    N = len(p) - 1
    if N < 1:
        return np.zeros(max(N + 1, 1))
    P, Q = hat_weights(kappa, h, N)
    cells = P[1:] * p[:-1] + Q[1:] * p[1:]
    return np.concatenate(([0.0], np.cumsum(cells)))
