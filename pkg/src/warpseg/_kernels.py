"""Hot numerical loops: DP tables for (soft-)DTW and GRU unrolls.

Everything here is float64 in, float64 out, and free of Python object
state so the functions compile under numba when it is installed. Without
numba the same bodies run as plain NumPy loops (slower but identical
formulas). Results are deterministic either way; only use one path per
process so repeated runs stay bit-identical.
"""

from __future__ import annotations

import math

import numpy as np

try:
    from numba import njit as _njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    HAVE_NUMBA = False

    def _njit(**_kw):
        def deco(fn):
            return fn

        return deco


@_njit(cache=True)
def softdtw_forward(cost: np.ndarray, gamma: float) -> np.ndarray:
    """Accumulated soft cost table R, shape (n+1, m+1).

    R[0, 0] = 0, first row/column +inf, R[i, j] = cost[i-1, j-1] +
    softmin(diag, up, left). gamma == 0 degenerates to the hard-DTW
    recursion, so the same table serves classic DTW.
    """
    n, m = cost.shape
    R = np.full((n + 1, m + 1), np.inf)
    R[0, 0] = 0.0
    for i in range(1, n + 1):
        for j in range(1, m + 1):
            a = R[i - 1, j - 1]
            b = R[i - 1, j]
            c = R[i, j - 1]
            lo = min(a, min(b, c))
            if gamma == 0.0:
                sm = lo
            else:
                # max-shift keeps exponents <= 0; exp(-inf) drops the
                # sentinel boundary cells from the sum.
                s = (
                    math.exp(-(a - lo) / gamma)
                    + math.exp(-(b - lo) / gamma)
                    + math.exp(-(c - lo) / gamma)
                )
                sm = lo - gamma * math.log(s)
            R[i, j] = cost[i - 1, j - 1] + sm
    return R


@_njit(cache=True)
def softdtw_backward(cost: np.ndarray, R: np.ndarray, gamma: float) -> np.ndarray:
    """Reverse DP: E[i, j] = d(value)/d(cost[i, j]), the expected alignment.

    Exponents are always <= 0 because R[i+1, j] - cost cell <= R[i, j]
    by the forward recursion, so no overflow guard is needed.
    """
    n, m = cost.shape
    Dp = np.zeros((n + 2, m + 2))
    Dp[1 : n + 1, 1 : m + 1] = cost
    Rp = np.full((n + 2, m + 2), -np.inf)
    Rp[: n + 1, : m + 1] = R
    Rp[n + 1, m + 1] = R[n, m]
    E = np.zeros((n + 2, m + 2))
    E[n + 1, m + 1] = 1.0
    for i in range(n, 0, -1):
        for j in range(m, 0, -1):
            rij = Rp[i, j]
            wa = math.exp((Rp[i + 1, j] - rij - Dp[i + 1, j]) / gamma)
            wb = math.exp((Rp[i, j + 1] - rij - Dp[i, j + 1]) / gamma)
            wc = math.exp((Rp[i + 1, j + 1] - rij - Dp[i + 1, j + 1]) / gamma)
            E[i, j] = E[i + 1, j] * wa + E[i, j + 1] * wb + E[i + 1, j + 1] * wc
    return E[1 : n + 1, 1 : m + 1]


@_njit(cache=True)
def gru_forward(
    X: np.ndarray,
    h0: np.ndarray,
    Wx: np.ndarray,
    Whg: np.ndarray,
    Whn: np.ndarray,
    b: np.ndarray,
):
    """Unroll one GRU over X (T x D) from h0 (H,).

    Gate layout: Wx is D x 3H with columns [reset | update | candidate],
    Whg is H x 2H for the reset/update hidden terms, Whn is H x H for the
    candidate term (applied to reset * h_prev). Returns hidden states
    (T x H) plus gate activations cached for the backward pass.
    """
    T = X.shape[0]
    H = h0.shape[0]
    XP = np.dot(X, Wx)  # (T, 3H)
    Hs = np.empty((T, H))
    Rg = np.empty((T, H))
    Zg = np.empty((T, H))
    Ng = np.empty((T, H))
    h = h0.copy()
    for t in range(T):
        hg = np.dot(h, Whg)  # (2H,)
        r = 1.0 / (1.0 + np.exp(-(XP[t, :H] + b[:H] + hg[:H])))
        z = 1.0 / (1.0 + np.exp(-(XP[t, H : 2 * H] + b[H : 2 * H] + hg[H:])))
        n = np.tanh(XP[t, 2 * H :] + b[2 * H :] + np.dot(r * h, Whn))
        h = (1.0 - z) * n + z * h
        Rg[t] = r
        Zg[t] = z
        Ng[t] = n
        Hs[t] = h
    return Hs, Rg, Zg, Ng


@_njit(cache=True)
def gru_backward(
    X: np.ndarray,
    h0: np.ndarray,
    Wx: np.ndarray,
    Whg: np.ndarray,
    Whn: np.ndarray,
    Hs: np.ndarray,
    Rg: np.ndarray,
    Zg: np.ndarray,
    Ng: np.ndarray,
    dH: np.ndarray,
):
    """Backprop-through-time for gru_forward given dL/d(hidden states)."""
    T, D = X.shape
    H = h0.shape[0]
    WxT = np.ascontiguousarray(Wx.T)
    WhgT = np.ascontiguousarray(Whg.T)
    WhnT = np.ascontiguousarray(Whn.T)
    dX = np.zeros((T, D))
    dWx = np.zeros(Wx.shape)
    dWhg = np.zeros(Whg.shape)
    dWhn = np.zeros(Whn.shape)
    db = np.zeros(3 * H)
    dh = np.zeros(H)
    da = np.empty(3 * H)
    for t in range(T - 1, -1, -1):
        h_prev = Hs[t - 1] if t > 0 else h0
        dht = dH[t] + dh
        r = Rg[t]
        z = Zg[t]
        n = Ng[t]
        da_z = dht * (h_prev - n) * z * (1.0 - z)
        da_n = dht * (1.0 - z) * (1.0 - n * n)
        drh = np.dot(da_n, WhnT)  # grad wrt (r * h_prev)
        da_r = drh * h_prev * r * (1.0 - r)
        da[:H] = da_r
        da[H : 2 * H] = da_z
        da[2 * H :] = da_n
        dWx += np.outer(X[t], da)
        db += da
        da_rz = da[: 2 * H]
        dWhg += np.outer(h_prev, da_rz)
        dWhn += np.outer(r * h_prev, da_n)
        dX[t] = np.dot(da, WxT)
        dh = dht * z + drh * r + np.dot(da_rz, WhgT)
    return dX, dh, dWx, dWhg, dWhn, db


def pairwise_dist(xv: np.ndarray, yv: np.ndarray, squared: bool) -> np.ndarray:
    """Row-by-row distance matrix via explicit differences.

    Deliberately avoids the |x|^2 + |y|^2 - 2xy expansion so identical
    rows give an exact 0.0 (the zero-diagonal contract for self-alignment).
    """
    n = xv.shape[0]
    out = np.empty((n, yv.shape[0]))
    for i in range(n):
        d = yv - xv[i]
        s = np.sum(d * d, axis=1)
        out[i] = s if squared else np.sqrt(s)
    return out


def warm_up() -> None:
    """Trigger JIT compilation on tiny inputs (no-op without numba)."""
    c = np.ones((2, 2))
    R = softdtw_forward(c, 1.0)
    softdtw_backward(c, R, 1.0)
    softdtw_forward(c, 0.0)
    X = np.zeros((2, 2))
    h0 = np.zeros(3)
    Wx = np.zeros((2, 9))
    Whg = np.zeros((3, 6))
    Whn = np.zeros((3, 3))
    b = np.zeros(9)
    Hs, Rg, Zg, Ng = gru_forward(X, h0, Wx, Whg, Whn, b)
    gru_backward(X, h0, Wx, Whg, Whn, Hs, Rg, Zg, Ng, np.zeros((2, 3)))
