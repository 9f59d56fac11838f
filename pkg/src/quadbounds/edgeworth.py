"""Gaussian kernel, Hermite polynomials and the {3, 4, 6} Edgeworth expansion.

The expansion of a distribution with mean ``mean``, standard deviation ``sigma``
and standardized coefficients ``C_p`` is, with ``t = (z - mean) / sigma``::

    pdf(z) = phi(t) / sigma * (1 + sum_p C_p / p! * H_p(t))
    cdf(z) = Phi(t) - phi(t) * sum_p C_p / p! * H_{p-1}(t)

for ``p`` in ``{3, 4, 6}`` and probabilists' Hermite polynomials ``H_p``. The
cdf is the exact antiderivative of the pdf, using
``d/dt [phi(t) H_{p-1}(t)] = -phi(t) H_p(t)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np
from scipy.special import ndtr

from .moments import MomentSet, standardized_coefficients, y_moments, z_moments_closed_form

__all__ = [
    "EDGEWORTH_ORDERS",
    "EdgeworthDist",
    "hermite",
    "std_normal_pdf",
    "std_normal_cdf",
    "std_normal_sf",
    "edgeworth_pdf",
    "edgeworth_cdf",
    "edgeworth_sf",
    "clt_cdf",
    "hypothesis_distribution",
    "beta_edgeworth",
    "beta_clt",
]

EDGEWORTH_ORDERS = (3, 4, 6)
MAX_HERMITE_ORDER = 8
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


def hermite(p: int, z):
    """Probabilists' Hermite polynomial ``He_p(z)``.

    ``H_0 = 1``, ``H_1 = z``, ``H_{p+1} = z H_p - p H_{p-1}``.
    """
    if p < 0 or p > MAX_HERMITE_ORDER:
        raise ValueError(f"Hermite order must be in 0..{MAX_HERMITE_ORDER}, got {p}")
    z = np.asarray(z, dtype=float)
    prev = np.ones_like(z)
    if p == 0:
        return _unwrap(prev)
    cur = z.copy()
    for j in range(1, p):
        prev, cur = cur, z * cur - j * prev
    return _unwrap(cur)


def _unwrap(x):
    return float(x) if np.ndim(x) == 0 else x


def std_normal_pdf(z):
    z = np.asarray(z, dtype=float)
    return _unwrap(_INV_SQRT_2PI * np.exp(-0.5 * z * z))


def std_normal_cdf(z):
    return _unwrap(ndtr(np.asarray(z, dtype=float)))


def std_normal_sf(z):
    return _unwrap(ndtr(-np.asarray(z, dtype=float)))


@dataclass(frozen=True)
class EdgeworthDist:
    """Edgeworth approximation of a distribution from its first four moments."""

    mean: float
    sigma: float
    coeffs: Mapping[int, float]

    def __post_init__(self):
        if not (math.isfinite(self.sigma) and self.sigma > 0):
            raise ValueError(f"sigma must be finite and > 0, got {self.sigma}")
        if not math.isfinite(self.mean):
            raise ValueError(f"mean must be finite, got {self.mean}")
        if set(self.coeffs) != set(EDGEWORTH_ORDERS):
            raise ValueError(f"coefficients must be given for orders {EDGEWORTH_ORDERS}, got {sorted(self.coeffs)}")
        object.__setattr__(self, "coeffs", {p: float(self.coeffs[p]) for p in EDGEWORTH_ORDERS})

    @classmethod
    def from_moments(cls, mz: MomentSet) -> "EdgeworthDist":
        c3, c4, c6 = standardized_coefficients(mz)
        return cls(mz.mean, mz.sigma, {3: c3, 4: c4, 6: c6})

    @classmethod
    def gaussian(cls, mean: float = 0.0, sigma: float = 1.0) -> "EdgeworthDist":
        return cls(mean, sigma, {3: 0.0, 4: 0.0, 6: 0.0})

    def standardize(self, z):
        return (np.asarray(z, dtype=float) - self.mean) / self.sigma

    def pdf(self, z, floor: bool = False):
        return edgeworth_pdf(self, z, floor)

    def cdf(self, z, clip: bool = True):
        return edgeworth_cdf(self, z, clip)

    def sf(self, z):
        return edgeworth_sf(self, z)


def _pdf_correction(d: EdgeworthDist, t):
    c = d.coeffs
    return (c[3] / 6.0) * hermite(3, t) + (c[4] / 24.0) * hermite(4, t) + (c[6] / 720.0) * hermite(6, t)


def _cdf_correction(d: EdgeworthDist, t):
    c = d.coeffs
    return (c[3] / 6.0) * hermite(2, t) + (c[4] / 24.0) * hermite(3, t) + (c[6] / 720.0) * hermite(5, t)


def edgeworth_pdf(d: EdgeworthDist, z, floor: bool = False):
    """Density of the truncated expansion at ``z`` (raw units).

    The {3, 4, 6} expansion of a skewed law dips below zero a few deviations left
    of the mean. By default the signed value is returned, so the density stays the
    exact derivative of :func:`edgeworth_cdf` and integrates to one; ``floor=True``
    clips it at zero instead.
    """
    t = d.standardize(z)
    dens = std_normal_pdf(t) * (1.0 + _pdf_correction(d, t)) / d.sigma
    if floor:
        dens = np.maximum(dens, 0.0)
    return _unwrap(dens)


def edgeworth_cdf(d: EdgeworthDist, z, clip: bool = True):
    """Cumulative distribution of the truncated expansion, clipped to [0, 1] unless ``clip=False``."""
    t = d.standardize(z)
    val = ndtr(t) - std_normal_pdf(t) * _cdf_correction(d, t)
    return _unwrap(np.clip(val, 0.0, 1.0) if clip else val)


def edgeworth_sf(d: EdgeworthDist, z):
    """``1 - edgeworth_cdf`` evaluated without cancellation in the upper tail."""
    t = d.standardize(z)
    val = ndtr(-t) + std_normal_pdf(t) * _cdf_correction(d, t)
    return _unwrap(np.clip(val, 0.0, 1.0))


def clt_cdf(mean: float, sigma: float, z):
    """Gaussian approximation ``Phi((z - mean) / sigma)``."""
    if not sigma > 0:
        raise ValueError(f"sigma must be > 0, got {sigma}")
    return std_normal_cdf((np.asarray(z, dtype=float) - mean) / sigma)


def hypothesis_distribution(scenario, m: int | None = None, hypothesis: int = 1) -> EdgeworthDist:
    """Edgeworth distribution of the ``m``-sample LLR sum under hypothesis 0 or 1.

    ``scenario`` is any object with ``h0``/``h1`` Gaussian specs, an ``m``
    attribute and an ``llr()`` method returning the quadratic form, such as
    :class:`quadbounds.tcd.ChangeScenario`.
    """
    if hypothesis not in (0, 1):
        raise ValueError(f"hypothesis must be 0 or 1, got {hypothesis}")
    m = scenario.m if m is None else m
    g = scenario.h1 if hypothesis == 1 else scenario.h0
    mz = z_moments_closed_form(y_moments(scenario.llr(), g), m)
    return EdgeworthDist.from_moments(mz)


def beta_edgeworth(scenario, m: int | None, h):
    """Edgeworth approximation of the missed-detection bound ``P_1(S_n < h)``.

    ``h`` is the threshold on the raw window sum; standardization with the
    hypothesis-1 mean and deviation happens here.
    """
    return edgeworth_cdf(hypothesis_distribution(scenario, m, 1), h)


def beta_clt(scenario, m: int | None, h):
    d = hypothesis_distribution(scenario, m, 1)
    return clt_cdf(d.mean, d.sigma, h)
