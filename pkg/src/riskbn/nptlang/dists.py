"""Closed-form binning of the supported distribution families.

Each family is reduced to cumulative functions ``F`` (mass), ``G1``
(first partial moment) and ``G2`` (second partial moment); per-bin
quantities are differences of those at the bin edges.  Carrying the
first partial moment gives every bin a mass-weighted representative
value, which is what keeps discretized means accurate even on coarse
grids.  After restriction to the grid's domain the masses are
renormalized, so distributions whose natural support exceeds the node
domain (e.g. an exponential prior on a probability node) are truncated.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import special
from scipy import stats

from riskbn.errors import DomainError

_SQRT2 = np.sqrt(2.0)
_MIN_MASS = 1e-300


@dataclass(frozen=True)
class BinnedDistribution:
    """A distribution evaluated onto a grid.

    ``masses`` sum to 1 over the grid; ``bin_values`` is the conditional
    mean of the distribution within each bin (bin midpoint where the bin
    carries no mass).  ``point`` is set when the distribution is a point
    mass, in which case the value is exact.
    """

    kind: str  # "continuous" or "discrete"
    edges: np.ndarray
    masses: np.ndarray
    bin_values: np.ndarray
    mean: float
    variance: float
    point: float | None = None

    @property
    def support(self) -> tuple[float, float]:
        return float(self.edges[0]), float(self.edges[-1])


def _finalize(
    edges: np.ndarray,
    mass: np.ndarray,
    m1: np.ndarray,
    m2: np.ndarray,
    kind: str = "continuous",
) -> BinnedDistribution:
    total = float(mass.sum())
    if not np.isfinite(total) or total <= _MIN_MASS:
        raise DomainError("distribution carries no mass on the node domain")
    mass = np.clip(mass, 0.0, None)
    total = float(mass.sum())
    masses = mass / total
    mids = 0.5 * (edges[:-1] + edges[1:])
    with np.errstate(invalid="ignore", divide="ignore"):
        values = np.where(mass > _MIN_MASS, m1 / np.maximum(mass, _MIN_MASS), mids)
    # keep representatives inside their bins in the face of rounding
    values = np.clip(values, edges[:-1], edges[1:])
    mean = float((m1.sum()) / total)
    second = float(m2.sum()) / total
    variance = max(second - mean * mean, 0.0)
    return BinnedDistribution(kind, edges, masses, values, mean, variance)


def point_mass(edges: np.ndarray, value: float) -> BinnedDistribution:
    """All mass in the bin containing ``value``; the representative is exact.

    Values outside the grid domain are clamped to the nearest boundary.
    """
    edges = np.asarray(edges, dtype=float)
    v = float(min(max(value, edges[0]), edges[-1]))
    idx = int(np.searchsorted(edges, v, side="right") - 1)
    idx = min(max(idx, 0), len(edges) - 2)
    masses = np.zeros(len(edges) - 1)
    masses[idx] = 1.0
    values = 0.5 * (edges[:-1] + edges[1:])
    values[idx] = v
    return BinnedDistribution("continuous", edges, masses, values, v, 0.0, point=v)


# --- family cumulants -------------------------------------------------------
# Each _cum_* returns (F, G1, G2) evaluated at an array of points x, where
# F(x) = P(X <= x), G1(x) = E[X; X <= x], G2(x) = E[X^2; X <= x] for the
# UNtruncated family (restriction to the grid happens via differencing).


def _cum_exponential(rate: float, x: np.ndarray):
    if rate <= 0:
        raise DomainError(f"Exponential rate must be > 0, got {rate}")
    x = np.clip(x, 0.0, None)
    e = np.exp(-rate * x)
    f = 1.0 - e
    g1 = 1.0 / rate - (x + 1.0 / rate) * e
    g2 = 2.0 / rate**2 - (x * x + 2.0 * x / rate + 2.0 / rate**2) * e
    return f, g1, g2


def _cum_uniform(lo: float, hi: float, x: np.ndarray):
    if not hi > lo:
        raise DomainError(f"Uniform needs lo < hi, got [{lo}, {hi}]")
    xc = np.clip(x, lo, hi)
    w = hi - lo
    f = (xc - lo) / w
    g1 = (xc * xc - lo * lo) / (2.0 * w)
    g2 = (xc**3 - lo**3) / (3.0 * w)
    return f, g1, g2


def _cum_normal(mu: float, sigma: float, x: np.ndarray):
    z = (x - mu) / sigma
    f = special.ndtr(z)
    phi = np.exp(-0.5 * z * z) / np.sqrt(2.0 * np.pi)
    # ∫_{-inf}^{x} t φ dt and ∫ t^2 φ dt in standardized form
    g1z = -phi
    g2z = f - z * phi
    g1 = mu * f + sigma * g1z
    g2 = mu * mu * f + 2.0 * mu * sigma * g1z + sigma * sigma * g2z
    return f, g1, g2


def _cum_triangle(a: float, c: float, b: float, x: np.ndarray):
    """Sorted triangle with left a, mode c, right b (a <= c <= b, a < b)."""
    f = np.zeros_like(x)
    g1 = np.zeros_like(x)
    g2 = np.zeros_like(x)
    span = (b - a)
    xc = np.clip(x, a, b)

    if c > a:
        k = 2.0 / (span * (c - a))
        t = np.clip(xc, a, c)
        f += k * (t - a) ** 2 / 2.0
        # ∫ t * k (t - a) dt from a to t
        g1 += k * (t**3 / 3.0 - a * t**2 / 2.0 - (a**3 / 3.0 - a**3 / 2.0))
        g2 += k * (t**4 / 4.0 - a * t**3 / 3.0 - (a**4 / 4.0 - a**4 / 3.0))
    if b > c:
        k = 2.0 / (span * (b - c))
        t = np.clip(xc, c, b)
        f += k * ((b - c) ** 2 - (b - t) ** 2) / 2.0
        # ∫ t * k (b - t) dt from c to t
        g1 += k * (
            (b * t**2 / 2.0 - t**3 / 3.0) - (b * c**2 / 2.0 - c**3 / 3.0)
        )
        g2 += k * (
            (b * t**3 / 3.0 - t**4 / 4.0) - (b * c**3 / 3.0 - c**4 / 4.0)
        )
    return f, g1, g2


def _cum_beta(alpha: float, beta_: float, x: np.ndarray):
    if alpha <= 0 or beta_ <= 0:
        raise DomainError(f"Beta needs positive shape parameters, got ({alpha}, {beta_})")
    xc = np.clip(x, 0.0, 1.0)
    f = special.betainc(alpha, beta_, xc)
    mean = alpha / (alpha + beta_)
    g1 = mean * special.betainc(alpha + 1.0, beta_, xc)
    second = mean * (alpha + 1.0) / (alpha + beta_ + 1.0)
    g2 = second * special.betainc(alpha + 2.0, beta_, xc)
    return f, g1, g2


def continuous_family(name: str, params: tuple[float, ...], edges: np.ndarray) -> BinnedDistribution:
    """Bin a continuous family onto ``edges`` and renormalize to the domain."""
    edges = np.asarray(edges, dtype=float)
    lo, hi = edges[0], edges[-1]

    if name == "exponential":
        (rate,) = params
        cum = lambda x: _cum_exponential(rate, x)  # noqa: E731
    elif name == "uniform":
        ulo, uhi = params
        cum = lambda x: _cum_uniform(ulo, uhi, x)  # noqa: E731
    elif name == "tnormal":
        mu, var, tlo, thi = params
        if var <= 0:
            raise DomainError(f"TNormal variance must be > 0, got {var}")
        if not thi > tlo:
            raise DomainError(f"TNormal needs lower < upper, got [{tlo}, {thi}]")
        sigma = float(np.sqrt(var))
        lo, hi = max(lo, tlo), min(hi, thi)
        if not hi > lo:
            raise DomainError("TNormal truncation window misses the node domain")
        cum = lambda x: _cum_normal(mu, sigma, np.clip(x, lo, hi))  # noqa: E731
    elif name == "triangle":
        a, c, b = sorted(params)
        if not b > a:
            return point_mass(edges, a)
        cum = lambda x: _cum_triangle(a, c, b, x)  # noqa: E731
    elif name == "beta":
        alpha, beta_ = params
        cum = lambda x: _cum_beta(alpha, beta_, x)  # noqa: E731
    else:
        raise DomainError(f"not a continuous family: {name}")

    inner = np.clip(edges, lo, hi)
    f, g1, g2 = cum(inner)
    return _finalize(edges, np.diff(f), np.diff(g1), np.diff(g2))


def binomial_binned(n: float, p: float, edges: np.ndarray) -> BinnedDistribution:
    """Bin a Binomial(n, p) onto integer-range bins.

    ``edges`` are half-open real boundaries; integers k with
    ``edges[i] <= k < edges[i+1]`` fall in bin i (the last bin is closed).
    Uses the partial-sum identities E[X; a<=X<=b] = n p (F' (b-1) - F'(a-2))
    with F' the CDF of Binomial(n-1, p), and the analogue for X(X-1).
    """
    if abs(n - round(n)) > 1e-9 or n < 0:
        raise DomainError(f"Binomial n must be a non-negative integer, got {n}")
    n = int(round(n))
    if p < -1e-12 or p > 1 + 1e-12:
        raise DomainError(f"Binomial p must lie in [0, 1], got {p}")
    p = min(max(p, 0.0), 1.0)
    edges = np.asarray(edges, dtype=float)

    # inclusive integer range [lo_k, hi_k] per bin
    lo_k = np.ceil(edges[:-1] - 1e-12).astype(int)
    hi_k = np.ceil(edges[1:] - 1e-12).astype(int) - 1
    hi_k[-1] = int(np.floor(edges[-1] + 1e-12))
    lo_k = np.clip(lo_k, 0, n)
    hi_k = np.clip(hi_k, -1, n)

    def cdf(nn: int, ks: np.ndarray) -> np.ndarray:
        out = np.zeros(ks.shape, dtype=float)
        if nn < 0:
            return out
        valid = ks >= 0
        out[valid] = stats.binom.cdf(np.minimum(ks[valid], nn), nn, p)
        return out

    mass = cdf(n, hi_k) - cdf(n, lo_k - 1)
    m1 = n * p * (cdf(n - 1, hi_k - 1) - cdf(n - 1, lo_k - 2))
    m12 = n * (n - 1) * p * p * (cdf(n - 2, hi_k - 2) - cdf(n - 2, lo_k - 3))
    m2 = m12 + m1
    empty = hi_k < lo_k
    mass[empty] = 0.0
    m1[empty] = 0.0
    m2[empty] = 0.0
    out = _finalize(edges, mass, m1, m2, kind="discrete")
    return out


def binomial_logpmf(k: float, n: float, p: np.ndarray) -> np.ndarray:
    """Vectorized log pmf at integer count k over an array of p values."""
    if abs(n - round(n)) > 1e-9 or n < 0:
        raise DomainError(f"Binomial n must be a non-negative integer, got {n}")
    if abs(k - round(k)) > 1e-9 or k < 0 or k > n:
        raise DomainError(f"count must be an integer in [0, {int(n)}], got {k}")
    n = int(round(n))
    k = int(round(k))
    p = np.asarray(p, dtype=float)
    logc = special.gammaln(n + 1) - special.gammaln(k + 1) - special.gammaln(n - k + 1)
    with np.errstate(divide="ignore", invalid="ignore"):
        term1 = np.where(k > 0, k * np.log(p), 0.0)
        term2 = np.where(n - k > 0, (n - k) * np.log1p(-p), 0.0)
    out = logc + term1 + term2
    out = np.where((p <= 0) & (k > 0), -np.inf, out)
    out = np.where((p >= 1) & (k < n), -np.inf, out)
    return out


def tnormal_mean(mu: float, var: float, lo: float, hi: float) -> float:
    """Mean of a Normal(mu, var) truncated to [lo, hi]."""
    if var <= 0:
        raise DomainError(f"TNormal variance must be > 0, got {var}")
    if not hi > lo:
        raise DomainError(f"TNormal needs lower < upper, got [{lo}, {hi}]")
    sigma = float(np.sqrt(var))
    a, b = (lo - mu) / sigma, (hi - mu) / sigma
    za = np.exp(-0.5 * a * a) / np.sqrt(2 * np.pi)
    zb = np.exp(-0.5 * b * b) / np.sqrt(2 * np.pi)
    z = special.ndtr(b) - special.ndtr(a)
    if z <= _MIN_MASS:
        raise DomainError("TNormal truncation window carries no mass")
    return float(mu + sigma * (za - zb) / z)


def tnormal_prob_geq(mu: float, var: float, lo: float, hi: float, threshold: float) -> float:
    """P(X >= threshold) for a Normal(mu, var) truncated to [lo, hi]."""
    sigma = float(np.sqrt(var))
    z = special.ndtr((hi - mu) / sigma) - special.ndtr((lo - mu) / sigma)
    if z <= _MIN_MASS:
        raise DomainError("TNormal truncation window carries no mass")
    t = min(max(threshold, lo), hi)
    upper = special.ndtr((hi - mu) / sigma) - special.ndtr((t - mu) / sigma)
    return float(upper / z)
