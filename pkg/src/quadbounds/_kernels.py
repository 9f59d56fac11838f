"""Hot loops of the Monte Carlo detector simulation.

Two interchangeable backends with the same floating-point operation order:
numba ``@njit`` loops and a numpy fallback that vectorizes over trials. The
numpy path is used when numba is missing or ``QUADBOUNDS_DISABLE_NUMBA`` is set
to a non-empty value other than ``0``.
"""
from __future__ import annotations

import os

import numpy as np

__all__ = ["BACKEND", "window_max", "window_max_numpy", "first_crossing", "first_crossing_numpy"]


def _numba_disabled() -> bool:
    return os.environ.get("QUADBOUNDS_DISABLE_NUMBA", "").strip() not in ("", "0")


def window_max_numpy(w, mu, sigma, a, b, c, m, first_end):
    """Per-trial maximum of the ``m``-sample LLR window sums.

    ``w`` holds standard normal draws of shape ``(n_trials, L)``; sample ``t`` of
    every trial is ``mu[t] + sigma[t] * w[:, t]`` and its LLR is ``(a x + b) x + c``.
    Windows ending at 0-based index ``first_end .. L-1`` are admissible
    (``first_end >= m - 1``).
    """
    n, length = w.shape
    s = np.zeros(n)
    best = np.full(n, -np.inf)
    for t in range(length):
        x = mu[t] + sigma[t] * w[:, t]
        s += (a * x + b) * x + c
        if t >= m:
            xo = mu[t - m] + sigma[t - m] * w[:, t - m]
            s -= (a * xo + b) * xo + c
        if t >= first_end:
            np.maximum(best, s, out=best)
    return best


def first_crossing_numpy(llr, m, h):
    """0-based index of the first window end ``n >= m - 1`` with sum ``>= h``, or -1."""
    s = 0.0
    for t in range(llr.shape[0]):
        s += llr[t]
        if t >= m:
            s -= llr[t - m]
        if t >= m - 1 and s >= h:
            return t
    return -1


try:
    if _numba_disabled():
        raise ImportError("numba disabled by QUADBOUNDS_DISABLE_NUMBA")
    from numba import njit
except ImportError:
    BACKEND = "numpy"
    window_max = window_max_numpy
    first_crossing = first_crossing_numpy
else:
    BACKEND = "numba"

    @njit(cache=True, nogil=True)
    def window_max(w, mu, sigma, a, b, c, m, first_end):
        n, length = w.shape
        best = np.full(n, -np.inf)
        for i in range(n):
            s = 0.0
            top = -np.inf
            for t in range(length):
                x = mu[t] + sigma[t] * w[i, t]
                s += (a * x + b) * x + c
                if t >= m:
                    xo = mu[t - m] + sigma[t - m] * w[i, t - m]
                    s -= (a * xo + b) * xo + c
                if t >= first_end and s > top:
                    top = s
            best[i] = top
        return best

    @njit(cache=True, nogil=True)
    def first_crossing(llr, m, h):
        s = 0.0
        for t in range(llr.shape[0]):
            s += llr[t]
            if t >= m:
                s -= llr[t - m]
            if t >= m - 1 and s >= h:
                return t
        return -1
