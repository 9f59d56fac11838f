"""Transient change detection with the finite-moving-average (FMA) test.

Samples are Gaussian with ``(mu0, sigma0^2)`` nominally and ``(mu1, sigma1^2)``
during a change of ``m`` samples. The detector sums the last ``m`` per-sample
log-likelihood ratios, ``S_n``, and alarms at the first ``n >= m`` with
``S_n >= h``.

Monte Carlo runs are split into fixed-size chunks of trials. Chunk ``k`` draws
its normals from a Philox generator keyed by ``SeedSequence(seed,
spawn_key=(k,))``, so estimates depend only on ``(inputs, seed)`` and not on how
the chunks are scheduled. Normals come from numpy's ziggurat sampler.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .edgeworth import EdgeworthDist, clt_cdf, edgeworth_cdf, hypothesis_distribution
from .evt import alpha_edgeworth, alpha_evt, evt_params
from .metrics import CurveTable
from .moments import GaussianSpec, QuadraticForm

__all__ = [
    "ChangeScenario",
    "McEstimate",
    "llr_terms",
    "llr_coefficients",
    "fma_statistic",
    "simulate_stopping_time",
    "sample_window_sums",
    "pmd_statistics",
    "pfa_statistics",
    "mc_pmd",
    "mc_pfa",
    "mc_pmd_curve",
    "mc_pfa_curve",
    "empirical_beta",
    "empirical_alpha",
    "beta_grid",
    "alpha_grid",
    "analytic_grid",
    "bound_curves",
    "roc_table",
    "CHUNK_TRIALS",
]

CHUNK_TRIALS = 8192


@dataclass(frozen=True)
class ChangeScenario:
    """Nominal/changed Gaussian pair, transient length ``m``, guarantee window
    ``m_alpha`` and 1-based change onset ``v``."""

    h0: GaussianSpec
    h1: GaussianSpec
    m: int
    m_alpha: int = 1
    v: int = 1

    def __post_init__(self):
        if self.h0 == self.h1:
            raise ValueError("h0 and h1 must differ")
        for name in ("m", "m_alpha", "v"):
            val = getattr(self, name)
            if int(val) != val or val < 1:
                raise ValueError(f"{name} must be a positive integer, got {val}")

    @classmethod
    def from_params(cls, mu0, sigma0_sq, mu1, sigma1_sq, m, m_alpha=1, v=1) -> "ChangeScenario":
        return cls(GaussianSpec(mu0, sigma0_sq), GaussianSpec(mu1, sigma1_sq), m, m_alpha, v)

    def llr(self) -> QuadraticForm:
        return llr_coefficients(self)

    def dist(self, hypothesis: int, m: int | None = None) -> EdgeworthDist:
        return hypothesis_distribution(self, m, hypothesis)

    def gaussian(self, hypothesis: int) -> GaussianSpec:
        return self.h1 if hypothesis == 1 else self.h0

    def replace(self, **changes) -> "ChangeScenario":
        fields = dict(h0=self.h0, h1=self.h1, m=self.m, m_alpha=self.m_alpha, v=self.v)
        fields.update(changes)
        return ChangeScenario(**fields)


@dataclass(frozen=True)
class McEstimate:
    p_hat: float
    stderr: float
    n_trials: int
    seed: int

    @classmethod
    def from_count(cls, hits: int, n_trials: int, seed: int) -> "McEstimate":
        p = hits / n_trials
        return cls(p, math.sqrt(p * (1.0 - p) / n_trials), n_trials, seed)


def llr_terms(h0: GaussianSpec, h1: GaussianSpec) -> tuple[float, float, float]:
    """``(a, b, c)`` of the per-sample LLR ``a x^2 + b x + c`` between two Gaussians.

    The constant uses ``ln(sigma0^2 / sigma1^2)`` as the log-variance term.
    """
    s0, s1 = h0.sigma2, h1.sigma2
    a = (s1 - s0) / (2.0 * s0 * s1)
    b = (s0 * h1.mu - s1 * h0.mu) / (s0 * s1)
    c = math.log(s0 / s1) + (s1 * h0.mu**2 - s0 * h1.mu**2) / (2.0 * s0 * s1)
    return a, b, c


def llr_coefficients(s: ChangeScenario) -> QuadraticForm:
    return QuadraticForm(*llr_terms(s.h0, s.h1))


def fma_statistic(llr_window, m: int | None = None) -> float:
    """Window sum ``S_n`` of the last ``m`` LLR values."""
    window = np.asarray(llr_window, dtype=float)
    if window.ndim != 1:
        raise ValueError("window must be one-dimensional")
    if m is not None and window.shape[0] != m:
        raise ValueError(f"window length {window.shape[0]} != m={m}")
    return float(math.fsum(window))


def _generator(seed: int, chunk: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(chunk,))))


def _chunked_window_max(q, mu, sigma, m, first_end, n_trials, seed, workers=1):
    mu = np.ascontiguousarray(mu, dtype=float)
    sigma = np.ascontiguousarray(sigma, dtype=float)
    length = mu.shape[0]
    n_chunks = -(-n_trials // CHUNK_TRIALS)

    def run(k):
        size = min(CHUNK_TRIALS, n_trials - k * CHUNK_TRIALS)
        w = _generator(seed, k).standard_normal((size, length))
        return _kernels.window_max(w, mu, sigma, float(q.a), float(q.b), float(q.c), int(m), int(first_end))

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, range(n_chunks)))
    else:
        parts = [run(k) for k in range(n_chunks)]
    return np.concatenate(parts)


def sample_window_sums(s: ChangeScenario, hypothesis: int, n: int, seed: int, m: int | None = None,
                       workers: int = 1) -> np.ndarray:
    """``n`` independent draws of ``Z``, the sum of ``m`` LLRs with all samples under one hypothesis."""
    m = s.m if m is None else m
    g = s.gaussian(hypothesis)
    mu = np.full(m, g.mu)
    sigma = np.full(m, g.sigma)
    return _chunked_window_max(s.llr(), mu, sigma, m, m - 1, n, seed, workers)


def pmd_statistics(s: ChangeScenario, n_trials: int, seed: int, workers: int = 1) -> np.ndarray:
    """Per-trial ``S_m`` for a change starting at ``v = 1``.

    With ``v = 1`` only the window ending at ``n = m`` lies inside the deadline, so a
    trial misses exactly when this value is below ``h``.
    """
    g = s.h1
    mu = np.full(s.m, g.mu)
    sigma = np.full(s.m, g.sigma)
    return _chunked_window_max(s.llr(), mu, sigma, s.m, s.m - 1, n_trials, seed, workers)


def pfa_statistics(s: ChangeScenario, n_trials: int, seed: int, workers: int = 1) -> np.ndarray:
    """Per-trial maximum of ``S_n`` over the ``m_alpha`` windows of a pure-noise run.

    Each run has ``m + m_alpha - 1`` nominal samples; a false alarm at threshold
    ``h`` occurs exactly when this maximum is ``>= h``.
    """
    length = s.m + s.m_alpha - 1
    mu = np.full(length, s.h0.mu)
    sigma = np.full(length, s.h0.sigma)
    return _chunked_window_max(s.llr(), mu, sigma, s.m, s.m - 1, n_trials, seed, workers)


def simulate_stopping_time(s: ChangeScenario, h: float, horizon: int, seed: int) -> int | None:
    """1-based FMA stopping index on one simulated record, or ``None`` if no alarm.

    Samples ``v .. v + m - 1`` follow ``h1``; all others follow ``h0``.
    """
    if horizon < s.m:
        raise ValueError(f"horizon must be >= m={s.m}, got {horizon}")
    idx = np.arange(1, horizon + 1)
    changed = (idx >= s.v) & (idx <= s.v + s.m - 1)
    mu = np.where(changed, s.h1.mu, s.h0.mu)
    sigma = np.where(changed, s.h1.sigma, s.h0.sigma)
    x = mu + sigma * _generator(seed, 0).standard_normal(horizon)
    llr = s.llr()(x)
    t = _kernels.first_crossing(np.ascontiguousarray(llr), int(s.m), float(h))
    return None if t < 0 else int(t) + 1


def mc_pmd(s: ChangeScenario, h: float, n_trials: int = 100_000, seed: int = 0, workers: int = 1) -> McEstimate:
    """Monte Carlo missed-detection probability for a change at ``v = 1``."""
    if n_trials < 1:
        raise ValueError("n_trials must be >= 1")
    stats = pmd_statistics(s, n_trials, seed, workers)
    return McEstimate.from_count(int(np.count_nonzero(stats < h)), n_trials, seed)


def mc_pfa(s: ChangeScenario, h: float, n_trials: int = 100_000, seed: int = 0, workers: int = 1) -> McEstimate:
    """Monte Carlo probability of an alarm within ``m_alpha`` admissible windows of noise."""
    if n_trials < 1:
        raise ValueError("n_trials must be >= 1")
    stats = pfa_statistics(s, n_trials, seed, workers)
    return McEstimate.from_count(int(np.count_nonzero(stats >= h)), n_trials, seed)


def _binomial(p, n):
    p = np.asarray(p, dtype=float)
    return p, np.sqrt(p * (1.0 - p) / n)


def mc_pmd_curve(s: ChangeScenario, h_grid, n_trials: int, seed: int, workers: int = 1):
    """``(p_hat, stderr)`` arrays of :func:`mc_pmd` over ``h_grid`` from one shared simulation."""
    stats = np.sort(pmd_statistics(s, n_trials, seed, workers))
    hits = np.searchsorted(stats, np.asarray(h_grid, dtype=float), side="left")
    return _binomial(hits / n_trials, n_trials)


def mc_pfa_curve(s: ChangeScenario, h_grid, n_trials: int, seed: int, workers: int = 1):
    """``(p_hat, stderr)`` arrays of :func:`mc_pfa` over ``h_grid`` from one shared simulation."""
    stats = np.sort(pfa_statistics(s, n_trials, seed, workers))
    below = np.searchsorted(stats, np.asarray(h_grid, dtype=float), side="left")
    return _binomial((n_trials - below) / n_trials, n_trials)


def empirical_beta(z1, h_grid):
    """Empirical ``F_{Z,1}(h) = P(Z < h)`` and its binomial standard error."""
    z1 = np.sort(np.asarray(z1, dtype=float))
    n = z1.shape[0]
    return _binomial(np.searchsorted(z1, np.asarray(h_grid, dtype=float), side="left") / n, n)


def empirical_alpha(z0, h_grid, m_alpha: int):
    """Empirical ``1 - F_{Z,0}(h)^m_alpha`` with a delta-method standard error."""
    f, se = empirical_beta(z0, h_grid)
    alpha = -np.expm1(m_alpha * np.log(np.where(f > 0, f, 1.0)))
    alpha = np.where(f > 0, alpha, 1.0)
    se_alpha = m_alpha * f ** (m_alpha - 1) * se
    return alpha, se_alpha


def beta_grid(z1, steps: int = 400, tail: float = 1e-4) -> np.ndarray:
    """Thresholds between the ``tail`` and ``1 - tail`` sample quantiles of ``Z`` under hypothesis 1."""
    lo, hi = np.quantile(np.asarray(z1, dtype=float), [tail, 1.0 - tail])
    return np.linspace(lo, hi, steps)


def alpha_grid(z0, steps: int = 400) -> np.ndarray:
    """Thresholds from the sample median to the sample maximum of ``Z`` under hypothesis 0.

    The median keeps the false-alarm bound essentially at 1 at the left end for any
    ``m_alpha >= 10``; the maximum is where the empirical bound reaches 0.
    """
    z0 = np.asarray(z0, dtype=float)
    return np.linspace(np.median(z0), z0.max(), steps)


def analytic_grid(s: ChangeScenario, which: str = "both", steps: int = 400) -> np.ndarray:
    """Sample-free threshold grid: ``mean1 +- 6 sd1`` for beta, ``mean0 - 2 sd0 .. mean0 + 15 sd0`` for alpha."""
    spans = []
    if which in ("beta", "both"):
        d1 = s.dist(1)
        spans.append((d1.mean - 6.0 * d1.sigma, d1.mean + 6.0 * d1.sigma))
    if which in ("alpha", "both"):
        d0 = s.dist(0)
        spans.append((d0.mean - 2.0 * d0.sigma, d0.mean + 15.0 * d0.sigma))
    if not spans:
        raise ValueError(f"which must be beta, alpha or both, got {which!r}")
    return np.linspace(min(lo for lo, _ in spans), max(hi for _, hi in spans), steps)


def bound_curves(s: ChangeScenario, h_grid, n_samples: int | None = None, seed: int = 0,
                 workers: int = 1) -> CurveTable:
    """Analytic bound approximations on ``h_grid``, with empirical bounds if ``n_samples`` is given.

    Columns: ``beta_edg``, ``beta_clt``, ``alpha_edg``, ``alpha_evt`` and, with
    samples, ``beta_emp``, ``beta_emp_se``, ``alpha_emp``, ``alpha_emp_se``. The
    EVT column is NaN when ``m_alpha < 2``.
    """
    h = np.asarray(h_grid, dtype=float)
    d0, d1 = s.dist(0), s.dist(1)
    cols = {
        "beta_edg": edgeworth_cdf(d1, h),
        "beta_clt": clt_cdf(d1.mean, d1.sigma, h),
        "alpha_edg": alpha_edgeworth(d0, s.m_alpha, h),
        "alpha_evt": alpha_evt(d0, s.m_alpha, h) if s.m_alpha >= 2 else np.full(h.shape, np.nan),
    }
    if n_samples:
        z1 = sample_window_sums(s, 1, n_samples, seed, workers=workers)
        z0 = sample_window_sums(s, 0, n_samples, seed + 1, workers=workers)
        cols["beta_emp"], cols["beta_emp_se"] = empirical_beta(z1, h)
        cols["alpha_emp"], cols["alpha_emp_se"] = empirical_alpha(z0, h, s.m_alpha)
    return CurveTable(h, {k: np.atleast_1d(v) for k, v in cols.items()})


def roc_table(s: ChangeScenario, h_grid, n_trials: int, seed: int, workers: int = 1) -> CurveTable:
    """Analytic (alpha, beta) approximations next to Monte Carlo ``P_fa`` and ``P_md`` per threshold.

    Any pairing of an alpha column with a beta column gives one approximate ROC.
    """
    if s.m_alpha < 2:
        raise ValueError("ROC needs m_alpha >= 2 for the EVT column")
    h = np.asarray(h_grid, dtype=float)
    d0, d1 = s.dist(0), s.dist(1)
    pfa, pfa_se = mc_pfa_curve(s, h, n_trials, seed, workers)
    pmd, pmd_se = mc_pmd_curve(s, h, n_trials, seed + 1, workers)
    cols = {
        "alpha_evt": alpha_evt(d0, s.m_alpha, h),
        "alpha_edg": alpha_edgeworth(d0, s.m_alpha, h),
        "beta_edg": edgeworth_cdf(d1, h),
        "beta_clt": clt_cdf(d1.mean, d1.sigma, h),
        "pfa_mc": pfa,
        "pfa_mc_se": pfa_se,
        "pmd_mc": pmd,
        "pmd_mc_se": pmd_se,
    }
    return CurveTable(h, {k: np.atleast_1d(v) for k, v in cols.items()})
