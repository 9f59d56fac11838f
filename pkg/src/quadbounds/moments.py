"""Raw moments of Gaussian variables, inhomogeneous quadratic forms and their iid sums.

Notation: ``X ~ N(mu, sigma2)``, ``Y = a*X**2 + b*X + c`` and ``Z = Y_1 + ... + Y_m``
with the ``Y_n`` iid. Everything here is exact up to float64 rounding.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

__all__ = [
    "GaussianSpec",
    "QuadraticForm",
    "MomentSet",
    "gaussian_raw_moment",
    "y_moments",
    "z_moments_closed_form",
    "z_moment_multinomial",
    "z_moments_multinomial",
    "standardized_coefficients",
]

MAX_GAUSSIAN_ORDER = 8
MAX_ORDER = 4


@dataclass(frozen=True)
class GaussianSpec:
    """Mean and variance of a Gaussian sample."""

    mu: float
    sigma2: float

    def __post_init__(self):
        if not (math.isfinite(self.mu) and math.isfinite(self.sigma2)):
            raise ValueError(f"GaussianSpec fields must be finite, got mu={self.mu}, sigma2={self.sigma2}")
        if self.sigma2 <= 0:
            raise ValueError(f"sigma2 must be > 0, got {self.sigma2}")

    @property
    def sigma(self) -> float:
        return math.sqrt(self.sigma2)


@dataclass(frozen=True)
class QuadraticForm:
    """Coefficients of ``a*x**2 + b*x + c``."""

    a: float
    b: float
    c: float

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.a, self.b, self.c)):
            raise ValueError(f"QuadraticForm coefficients must be finite, got {self}")
        if self.a == 0 and self.b == 0 and self.c == 0:
            raise ValueError("QuadraticForm coefficients are all zero")

    def __call__(self, x):
        return (self.a * x + self.b) * x + self.c


@dataclass(frozen=True)
class MomentSet:
    """Raw moments of orders 1..4 of a scalar random variable.

    ``c3``, ``c4`` and ``c6`` are the standardized Hermite coefficients used by the
    Edgeworth expansion (skewness, excess kurtosis and ``10 * c3**2``). They are
    only available when the variance is strictly positive.
    """

    xi1: float
    xi2: float
    xi3: float = math.nan
    xi4: float = math.nan
    c3: float = field(init=False, repr=False, default=math.nan)
    c4: float = field(init=False, repr=False, default=math.nan)
    c6: float = field(init=False, repr=False, default=math.nan)

    def __post_init__(self):
        var = self.xi2 - self.xi1 * self.xi1
        # Tolerate rounding-level negatives from cancellation on large raw moments.
        if var < -1e-12 * max(1.0, abs(self.xi2)):
            raise ValueError(f"negative variance: xi2 - xi1**2 = {var}")
        # var**2 > 0 excludes variances whose powers underflow to zero.
        if var > 0 and var * var > 0 and math.isfinite(self.xi3) and math.isfinite(self.xi4):
            c3, c4, c6 = _standardize(self.xi1, self.xi2, self.xi3, self.xi4)
            object.__setattr__(self, "c3", c3)
            object.__setattr__(self, "c4", c4)
            object.__setattr__(self, "c6", c6)

    @property
    def mean(self) -> float:
        return self.xi1

    @property
    def variance(self) -> float:
        return max(self.xi2 - self.xi1 * self.xi1, 0.0)

    @property
    def sigma(self) -> float:
        return math.sqrt(self.variance)

    def raw(self, k: int) -> float:
        """Raw moment of order ``k`` (``k = 0`` gives 1)."""
        if k == 0:
            return 1.0
        if not 1 <= k <= MAX_ORDER:
            raise ValueError(f"order must be in 0..{MAX_ORDER}, got {k}")
        return (self.xi1, self.xi2, self.xi3, self.xi4)[k - 1]

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.xi1, self.xi2, self.xi3, self.xi4)


def gaussian_raw_moment(g: GaussianSpec, k: int) -> float:
    """E[X**k] for ``X ~ N(g.mu, g.sigma2)``.

    Uses ``E[X^k] = mu E[X^(k-1)] + (k-1) sigma2 E[X^(k-2)]``.
    """
    if k < 0 or k > MAX_GAUSSIAN_ORDER:
        raise ValueError(f"Gaussian moment order must be in 0..{MAX_GAUSSIAN_ORDER}, got {k}")
    prev, cur = 1.0, g.mu
    if k == 0:
        return prev
    for j in range(2, k + 1):
        prev, cur = cur, g.mu * cur + (j - 1) * g.sigma2 * prev
    return cur


def y_moments(q: QuadraticForm, g: GaussianSpec, max_k: int = 4) -> MomentSet:
    """Raw moments of ``Y = a X^2 + b X + c`` for Gaussian ``X``.

    Expands ``(a X^2 + (b X + c))^k`` twice with the binomial theorem, so that

        E[Y^k] = sum_{i<=k} sum_{j<=i} C(k,i) C(i,j) a^(k-i) b^(i-j) c^j E[X^(2k-i-j)].

    Orders above ``max_k`` are returned as NaN.
    """
    if not 1 <= max_k <= MAX_ORDER:
        raise ValueError(f"max_k must be in 1..{MAX_ORDER}, got {max_k}")
    xs = [gaussian_raw_moment(g, j) for j in range(2 * max_k + 1)]
    out = [math.nan] * MAX_ORDER
    for k in range(1, max_k + 1):
        total = 0.0
        for i in range(k + 1):
            for j in range(i + 1):
                coeff = math.comb(k, i) * math.comb(i, j)
                total += coeff * q.a ** (k - i) * q.b ** (i - j) * q.c**j * xs[2 * k - i - j]
        out[k - 1] = total
    return MomentSet(*out)


def z_moments_closed_form(my: MomentSet, m: int) -> MomentSet:
    """Raw moments of the sum of ``m`` iid copies of a variable with moments ``my``.

    The fourth-order pair term is ``3 (E[Y^2])^2``, which is what the full
    multinomial expansion gives (see :func:`z_moment_multinomial`).
    """
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    y1, y2, y3, y4 = my.as_tuple()
    z1 = m * y1
    z2 = m * (y2 + (m - 1) * y1**2)
    z3 = m * (y3 + (m - 1) * (3 * y2 * y1 + (m - 2) * y1**3))
    z4 = m * (y4 + (m - 1) * (4 * y3 * y1 + 3 * y2**2 + (m - 2) * (6 * y2 * y1**2 + (m - 3) * y1**4)))
    return MomentSet(z1, z2, z3, z4)


@lru_cache(maxsize=None)
def _partitions(k: int) -> tuple[tuple[int, ...], ...]:
    """Integer partitions of ``k`` as non-increasing tuples."""

    def gen(n, largest):
        if n == 0:
            yield ()
            return
        for part in range(min(n, largest), 0, -1):
            for rest in gen(n - part, part):
                yield (part,) + rest

    return tuple(gen(k, k))


def z_moment_multinomial(my: MomentSet, m: int, k: int) -> float:
    """E[Z^k] for ``Z`` a sum of ``m`` iid copies, from the multinomial theorem.

    Rather than enumerating all ``m**k`` compositions, each integer partition
    ``(l_1, ..., l_r)`` of ``k`` is weighted by the number of ways to assign its
    parts to distinct summands, ``m! / ((m - r)! prod(mult!))``, times the
    multinomial coefficient ``k! / prod(l_i!)``.
    """
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    if not 0 <= k <= MAX_ORDER:
        raise ValueError(f"order must be in 0..{MAX_ORDER}, got {k}")
    total = 0.0
    for parts in _partitions(k):
        r = len(parts)
        if r > m:
            continue
        placements = math.perm(m, r)
        for count in _multiplicities(parts):
            placements //= math.factorial(count)
        multinomial = math.factorial(k)
        for part in parts:
            multinomial //= math.factorial(part)
        term = float(placements * multinomial)
        for part in parts:
            term *= my.raw(part)
        total += term
    return total if k else 1.0


def _multiplicities(parts):
    counts = {}
    for p in parts:
        counts[p] = counts.get(p, 0) + 1
    return counts.values()


def z_moments_multinomial(my: MomentSet, m: int) -> MomentSet:
    return MomentSet(*(z_moment_multinomial(my, m, k) for k in range(1, MAX_ORDER + 1)))


def _standardize(xi1, xi2, xi3, xi4):
    var = xi2 - xi1 * xi1
    sigma = math.sqrt(var)
    mu3 = xi3 - 3 * xi1 * xi2 + 2 * xi1**3
    mu4 = xi4 - 4 * xi1 * xi3 + 6 * xi1**2 * xi2 - 3 * xi1**4
    c3 = mu3 / sigma**3
    c4 = mu4 / var**2 - 3.0
    return c3, c4, 10.0 * c3**2


def standardized_coefficients(mz: MomentSet) -> tuple[float, float, float]:
    """Skewness ``c3``, excess kurtosis ``c4`` and ``c6 = 10 c3^2`` of ``mz``.

    Raises
    ------
    ValueError
        If the variance is not strictly positive or orders 3/4 are missing.
    """
    if not (math.isfinite(mz.xi3) and math.isfinite(mz.xi4)):
        raise ValueError("moments of order 3 and 4 are required")
    if not (mz.xi2 - mz.xi1**2 > 0 and math.isfinite(mz.c3)):
        raise ValueError("degenerate distribution: variance is not positive")
    return mz.c3, mz.c4, mz.c6
