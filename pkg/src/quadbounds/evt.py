"""False-alarm bound approximations: Edgeworth power form and Gumbel (EVT) form.

Both approximate ``1 - F(h)**m_alpha`` where ``F`` is the hypothesis-0 cdf of the
window sum. The Gumbel form replaces the power by the limit law of the maximum of
``m_alpha`` iid copies, located at ``delta = F^-1(1 - 1/m_alpha)`` with rate
``gamma = m_alpha * f(delta)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .edgeworth import EdgeworthDist, _unwrap, edgeworth_cdf, edgeworth_pdf, edgeworth_sf

__all__ = [
    "QuantileError",
    "EvtParams",
    "inverse_cdf",
    "evt_params",
    "alpha_evt",
    "alpha_edgeworth",
]

QUANTILE_TOL = 1e-12
_MAX_BISECTIONS = 200
_MAX_EXPANSIONS = 60


class QuantileError(ValueError):
    """The Edgeworth cdf could not be inverted at the requested level."""

    def __init__(self, q: float, reason: str):
        self.q = q
        super().__init__(f"cannot invert Edgeworth cdf at q={q!r}: {reason}")


@dataclass(frozen=True)
class EvtParams:
    """Gumbel location ``delta`` (raw units) and rate ``gamma`` for ``m_alpha`` windows."""

    delta: float
    gamma: float
    m_alpha: int

    def __post_init__(self):
        if not math.isfinite(self.delta):
            raise ValueError(f"delta must be finite, got {self.delta}")
        if not self.gamma > 0:
            raise ValueError(f"gamma must be > 0, got {self.gamma}")
        if self.m_alpha < 1:
            raise ValueError(f"m_alpha must be >= 1, got {self.m_alpha}")


def inverse_cdf(d: EdgeworthDist, q: float) -> float:
    """Solve ``edgeworth_cdf(d, z) = q`` by bracketed bisection.

    Levels above one half are matched through the survival function so that
    ``q = 1 - 1e-10`` keeps full relative precision in ``1 - q``.

    Raises
    ------
    QuantileError
        If no sign change can be bracketed, or the converged point misses the
        level by more than ``QUANTILE_TOL`` (a non-monotone tail).
    """
    if not 0.0 < q < 1.0:
        raise ValueError(f"q must be in (0, 1), got {q}")
    upper = q > 0.5
    tail = 1.0 - q

    def resid(z):
        # Increasing in z wherever the expansion is monotone.
        if upper:
            return tail - edgeworth_sf(d, z)
        return edgeworth_cdf(d, z) - q

    lo = d.mean - 10.0 * d.sigma
    hi = d.mean + 20.0 * d.sigma
    step = 10.0 * d.sigma
    for _ in range(_MAX_EXPANSIONS):
        if resid(lo) < 0:
            break
        lo -= step
        step *= 2.0
    else:
        raise QuantileError(q, "lower bracket not found")
    step = 20.0 * d.sigma
    for _ in range(_MAX_EXPANSIONS):
        if resid(hi) > 0:
            break
        hi += step
        step *= 2.0
    else:
        raise QuantileError(q, "upper bracket not found")

    for _ in range(_MAX_BISECTIONS):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        r = resid(mid)
        if r == 0:
            lo = hi = mid
            break
        if r < 0:
            lo = mid
        else:
            hi = mid
    z = 0.5 * (lo + hi)
    if abs(resid(z)) > QUANTILE_TOL:
        raise QuantileError(q, f"bisection ended {abs(resid(z)):.3g} away from the level; cdf is not monotone here")
    return z


def evt_params(d0: EdgeworthDist, m_alpha: int) -> EvtParams:
    """Gumbel parameters for the maximum of ``m_alpha`` iid draws from ``d0``."""
    if m_alpha < 2:
        raise ValueError(f"m_alpha must be >= 2, got {m_alpha}")
    delta = inverse_cdf(d0, 1.0 - 1.0 / m_alpha)
    gamma = m_alpha * edgeworth_pdf(d0, delta)
    if not gamma > 0:
        raise ValueError(f"non-positive Gumbel rate {gamma} at delta={delta}")
    return EvtParams(delta, gamma, m_alpha)


def alpha_evt(d0: EdgeworthDist, m_alpha: int, h, params: EvtParams | None = None):
    """Gumbel approximation ``1 - exp(-exp(-gamma (h - delta)))`` of the false-alarm bound."""
    p = evt_params(d0, m_alpha) if params is None else params
    h = np.asarray(h, dtype=float)
    with np.errstate(over="ignore"):
        val = -np.expm1(-np.exp(-p.gamma * (h - p.delta)))
    return _unwrap(np.clip(val, 0.0, 1.0))


def alpha_edgeworth(d0: EdgeworthDist, m_alpha: int, h):
    """``1 - edgeworth_cdf(h)**m_alpha`` computed in log space."""
    if m_alpha < 1:
        raise ValueError(f"m_alpha must be >= 1, got {m_alpha}")
    sf = np.asarray(edgeworth_sf(d0, h), dtype=float)
    with np.errstate(divide="ignore"):
        val = -np.expm1(m_alpha * np.log1p(-sf))
    return _unwrap(np.clip(val, 0.0, 1.0))
