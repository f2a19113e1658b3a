"""Boys function F_n(T) = int_0^1 t^(2n) exp(-T t^2) dt."""
from __future__ import annotations

import numpy as np
from scipy.special import erf

# Below this argument the highest order is summed as a series and recursed down;
# above it F_0 comes from erf and is recursed up (stable for large T).
SWITCH = 30.0


def _series(n: int, T: np.ndarray) -> np.ndarray:
    term = np.full(T.shape, 1.0 / (2 * n + 1))
    total = term.copy()
    k = 0
    while True:
        k += 1
        term = term * (2.0 * T) / (2 * n + 2 * k + 1)
        total += term
        if np.all(term <= 1e-17 * total) or k > 400:
            break
    return np.exp(-T) * total


def boys(nmax: int, T) -> np.ndarray:
    """Return F_0..F_nmax at every T; result has shape (nmax + 1, *T.shape)."""
    T = np.asarray(T, dtype=float)
    if np.any(T < 0) or not np.all(np.isfinite(T)):
        raise FloatingPointError("Boys function argument must be finite and non-negative")
    out = np.empty((nmax + 1,) + T.shape)
    small = T < SWITCH
    if np.any(small):
        Ts = T[small]
        e = np.exp(-Ts)
        f = _series(nmax, Ts)
        out[nmax][small] = f
        for n in range(nmax, 0, -1):
            f = (2.0 * Ts * f + e) / (2 * n - 1)
            out[n - 1][small] = f
    large = ~small
    if np.any(large):
        Tl = T[large]
        e = np.exp(-Tl)
        f = 0.5 * np.sqrt(np.pi / Tl) * erf(np.sqrt(Tl))
        out[0][large] = f
        for n in range(nmax):
            f = ((2 * n + 1) * f - e) / (2.0 * Tl)
            out[n + 1][large] = f
    return out
