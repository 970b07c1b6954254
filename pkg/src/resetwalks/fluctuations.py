"""Fourier fluctuation series and asymptotic moments of the height.

The mean and variance of the height carry O(1) oscillating corrections whose
Fourier coefficients are gamma-function values on the imaginary axis.  The
modulus of those values is pinned by |Gamma(it)|^2 = pi / (t sinh(pi t)), so
the series truncate after a handful of terms; everything here is double
precision except where noted.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import loggamma

EULER_GAMMA = 0.5772156649015329
COEFF_CUTOFF = 1e-25


# ---------------------------------------------------------------------------
# Gamma and digamma on the imaginary axis.

def log_abs_gamma_imag(t: float) -> float:
    """log |Gamma(it)| from the reflection identity, safe for large t."""
    if t <= 0:
        raise ValueError("t must be positive")
    # log sinh(pi t) without overflow: pi t + log((1 - exp(-2 pi t)) / 2)
    log_sinh = math.pi * t + math.log1p(-math.exp(-2.0 * math.pi * t)) - math.log(2.0)
    return 0.5 * (math.log(math.pi) - math.log(t) - log_sinh)


def gamma_imag(t: float) -> complex:
    """Gamma(it) for t > 0: modulus from the exact sinh identity, phase from
    the standard complex log-gamma."""
    phase = loggamma(complex(0.0, t)).imag
    mod = math.exp(log_abs_gamma_imag(t))
    return mod * complex(math.cos(phase), math.sin(phase))


def digamma_imag(t: float, terms: int = None) -> complex:
    """psi(it) for t > 0 by the partial-fraction series
    psi(z) = -1/z - gamma + sum_k z/(k(k+z)), split into real and imaginary
    parts and summed with an Euler-Maclaurin tail."""
    if t <= 0:
        raise ValueError("t must be positive")
    N = terms if terms is not None else max(64, int(8 * t))
    n = np.arange(1, N + 1, dtype=float)
    t2 = t * t
    imag_sum = float(np.sum(t / (n * n + t2)))
    real_sum = float(np.sum(t2 / (n * (n * n + t2))))

    # Tails sum_{n >= M} with M = N+1: integral closed form + f(M)/2 - f'(M)/12.
    M = float(N + 1)
    # imaginary tail: f(u) = t/(u^2+t^2)
    imag_tail = (math.pi / 2.0 - math.atan(M / t)) \
        + 0.5 * t / (M * M + t2) \
        + (1.0 / 12.0) * 2.0 * M * t / (M * M + t2) ** 2
    # real tail: g(u) = t^2/(u(u^2+t^2)) = 1/u - u/(u^2+t^2)
    real_tail = 0.5 * math.log1p(t2 / (M * M)) \
        + 0.5 * (1.0 / M - M / (M * M + t2)) \
        + (1.0 / 12.0) * (1.0 / (M * M) + (t2 - M * M) / (M * M + t2) ** 2)
    imag_part = 1.0 / t + imag_sum + imag_tail
    real_part = real_sum + real_tail - EULER_GAMMA
    return complex(real_part, imag_part)


def digamma_imag_bound(t: float) -> float:
    """Right side of the |psi(it)| inequality:
    (1/2) ln(1+t^2) + (pi/2 + 1 - gamma) + 1/t."""
    return 0.5 * math.log1p(t * t) + (math.pi / 2.0 + 1.0 - EULER_GAMMA) + 1.0 / t


def digamma_imag_bound_relaxed(t: float) -> float:
    """Weaker closed bound: (pi/2 + 1 - gamma + ln2/2) + ln(t) 1_{t>=1} + 1/t."""
    return (math.pi / 2.0 + 1.0 - EULER_GAMMA + math.log(2.0) / 2.0) \
        + (math.log(t) if t >= 1.0 else 0.0) + 1.0 / t


# ---------------------------------------------------------------------------
# The fluctuation series.

@dataclass(frozen=True)
class FluctuationSeries:
    """Truncated Fourier series sum_{k != 0} c_k exp(-s_k x), s_k = 2ik pi/ln p.

    ``kind`` is "mean" (c_k = Gamma(s_k)) or "variance" (c_k = Gamma'(s_k));
    conjugate symmetry c_{-k} = conj(c_k) makes the sum real, so only k >= 1
    coefficients are stored.
    """
    p: float
    kind: str
    coefficients: tuple      # c_k for k = 1..K
    tail_bound: float

    @property
    def period(self) -> float:
        return math.log(1.0 / self.p)

    def __call__(self, x: float) -> float:
        # s_k = i * y_k with y_k = 2 k pi / ln p (< 0); exp(-s_k x) has
        # angle -y_k x, and pairing k with -k doubles the real part.
        total = 0.0
        for k, c in enumerate(self.coefficients, start=1):
            y = 2.0 * k * math.pi / math.log(self.p)
            total += 2.0 * (c * cmath.exp(complex(0.0, -y * x))).real
        return total

    def sup_over_period(self, samples: int = 4096) -> float:
        """sup |series| over one period: dense scan plus local refinement."""
        period = self.period
        xs = np.linspace(0.0, period, samples, endpoint=False)
        vals = np.abs([self(x) for x in xs])
        i = int(np.argmax(vals))
        lo = xs[max(i - 1, 0)] - (period / samples if i == 0 else 0.0)
        hi = xs[min(i + 1, samples - 1)] + (period / samples if i == samples - 1 else 0.0)
        f = lambda x: -abs(self(x))
        # golden-section refine
        gr = (math.sqrt(5.0) - 1.0) / 2.0
        a, b = lo, hi
        c = b - gr * (b - a)
        d = a + gr * (b - a)
        while b - a > 1e-12 * period:
            if f(c) < f(d):
                b, d = d, c
                c = b - gr * (b - a)
            else:
                a, c = c, d
                d = a + gr * (b - a)
        return abs(self(0.5 * (a + b)))

    def mean_over_period(self, samples: int = 256) -> float:
        """Trapezoid mean over one period (spectrally exact for a trig
        polynomial once samples exceed twice the truncation order)."""
        period = self.period
        xs = np.linspace(0.0, period, samples, endpoint=False)
        return float(np.mean([self(x) for x in xs]))


@lru_cache(maxsize=None)
def fluctuation_series(p: float, kind: str, cutoff: float = COEFF_CUTOFF) -> FluctuationSeries:
    """Build the truncated series for the mean ("mean") or variance
    ("variance") fluctuations; truncation follows the doubly-fast decay of
    |Gamma(s_k)| (1 + |psi(s_k)|)."""
    if kind not in ("mean", "variance"):
        raise ValueError('kind must be "mean" or "variance"')
    p = float(p)
    coeffs = []
    k = 1
    while True:
        t = 2.0 * k * math.pi / math.log(1.0 / p)   # s_k = -i t, t > 0
        gamma_at = gamma_imag(t).conjugate()        # Gamma(-it) = conj Gamma(it)
        psi_at = digamma_imag(t).conjugate()
        weight = abs(gamma_at) * (1.0 + abs(psi_at))
        if weight < cutoff and k > 1:
            tail = weight
            break
        coeffs.append(gamma_at if kind == "mean" else psi_at * gamma_at)
        k += 1
        if k > 64:
            tail = weight
            break
    return FluctuationSeries(p, kind, tuple(coeffs), tail)


def mean_fluctuation(p, x: float, terms: int = None) -> float:
    """Q-type series: the oscillating part of the height mean."""
    series = fluctuation_series(float(p), "mean")
    if terms is not None:
        series = FluctuationSeries(series.p, "mean", series.coefficients[:terms], series.tail_bound)
    return series(x)


def variance_fluctuation(p, x: float, terms: int = None) -> float:
    """R-type series: the extra oscillating part entering the variance."""
    series = fluctuation_series(float(p), "variance")
    if terms is not None:
        series = FluctuationSeries(series.p, "variance", series.coefficients[:terms], series.tail_bound)
    return series(x)


def sup_bound_closed_form(p: float, kind: str) -> float:
    """Closed uniform bounds on the fluctuation amplitude, via
    lnexp(p, b) = ln(1 - exp(b / ln p))."""
    lnp = math.log(p)
    lnexp = lambda b: math.log1p(-math.exp(b / lnp))
    if kind == "mean":
        return (lnp / math.pi) * lnexp(4.0 * math.pi**2 / 5.0)
    return (lnp / math.pi) * (lnexp(4.0 * math.pi**2 / 5.0)
                              + (math.pi / 2.0 + 1.0 - EULER_GAMMA - lnp / (2.0 * math.pi))
                              * lnexp(114.0 * math.pi**2 / 155.0))


@dataclass(frozen=True)
class DecayReport:
    kind: str
    ratios: tuple            # successive |c_{k+1}/c_k|
    geometric: bool          # ratios bounded below 1 (smoothness surrogate)
    fitted_rate: float       # slope of log|c_k| against k


def coefficient_decay_report(series: FluctuationSeries) -> DecayReport:
    mags = [abs(c) for c in series.coefficients if abs(c) > 0]
    ratios = tuple(b / a for a, b in zip(mags, mags[1:]))
    ks = np.arange(1, len(mags) + 1)
    slope = float(np.polyfit(ks, np.log(mags), 1)[0]) if len(mags) >= 2 else float("-inf")
    geometric = bool(ratios) and max(ratios) < 1.0
    return DecayReport(series.kind, ratios, geometric, slope)


def reference_polynomial_decay(K: int = 12) -> DecayReport:
    """Delange-style k^{-1.5} comparison sequence; fails the geometric test."""
    mags = [k ** -1.5 for k in range(1, K + 1)]
    ratios = tuple(b / a for a, b in zip(mags, mags[1:]))
    ks = np.arange(1, K + 1)
    slope = float(np.polyfit(ks, np.log(mags), 1)[0])
    # ratios tend to 1 from below: not geometric in the bounded-away sense
    geometric = max(ratios) < 0.95
    return DecayReport("reference", ratios, geometric, slope)


# ---------------------------------------------------------------------------
# Asymptotic moments of the height.

@dataclass(frozen=True)
class AsymptoticMoment:
    n: int
    value: float
    terms: dict              # named breakdown; values sum to ``value``
    error_order: float       # size of the neglected error term

    def reconstruct(self) -> float:
        return sum(self.terms.values())


def mean_asymptotic(p, n: int) -> AsymptoticMoment:
    """Height mean: ln n/ln(1/p) - gamma/ln p - 1/2 - ln q/ln p
    + fluctuation(ln(qn))/ln p, with an O((ln n)^4/n) error."""
    if n < 2:
        raise ValueError("need n >= 2")
    p = float(p)
    q = 1.0 - p
    lnp = math.log(p)
    terms = {
        "leading": math.log(n) / -lnp,
        "constant": -EULER_GAMMA / lnp - 0.5 - math.log(q) / lnp,
        "fluctuation": mean_fluctuation(p, math.log(q * n)) / lnp,
    }
    return AsymptoticMoment(n, sum(terms.values()), terms,
                            math.log(n) ** 4 / n)


def variance_asymptotic(p, n: int) -> AsymptoticMoment:
    """Height variance: (Q^2 + 2 gamma Q + 2R + pi^2/6)/ln^2 p + 1/12 at
    argument ln(qn), with an O((ln n)^5/n) error."""
    if n < 2:
        raise ValueError("need n >= 2")
    p = float(p)
    q = 1.0 - p
    lnp2 = math.log(p) ** 2
    x = math.log(q * n)
    Q = mean_fluctuation(p, x)
    R = variance_fluctuation(p, x)
    terms = {
        "pi2": math.pi**2 / (6.0 * lnp2),
        "fluctuation": (Q * Q + 2.0 * EULER_GAMMA * Q + 2.0 * R) / lnp2,
        "constant": 1.0 / 12.0,
    }
    return AsymptoticMoment(n, sum(terms.values()), terms,
                            math.log(n) ** 5 / n)


def harmonic_sum_direct(p, t: float, tol: float = 1e-20) -> float:
    """sum_{h>=0} (1 - exp(-t q p^{h+1})) summed outright (geometric cutoff);
    independent check of the inverse-Mellin expansion."""
    if t < 0:
        raise ValueError("t must be >= 0")
    p = float(p)
    q = 1.0 - p
    total = 0.0
    h = 0
    while True:
        x = t * q * p ** (h + 1)
        term = -math.expm1(-x)
        total += term
        h += 1
        if x < 1.0 and term < tol:
            total += term * p / (1.0 - p)   # geometric tail envelope
            break
        if h > 10_000:
            break
    return total


def harmonic_sum_expansion(p, t: float) -> float:
    """The expansion produced by the Mellin analysis:
    ln t/(-ln p) - (gamma/ln p + 1/2 + ln q/ln p) + fluctuation(ln(qt))/ln p."""
    if t <= 0:
        raise ValueError("t must be positive")
    p = float(p)
    q = 1.0 - p
    lnp = math.log(p)
    return math.log(t) / -lnp - (EULER_GAMMA / lnp + 0.5 + math.log(q) / lnp) \
        + mean_fluctuation(p, math.log(q * t)) / lnp


# ---------------------------------------------------------------------------
# Exact moments of the height (oracle for the asymptotics).

def exact_height_moments(p, n: int, tail: float = 1e-18):
    """E[H_n] and Var[H_n] from the exact CDF: E = sum_h (1 - CDF(h)),
    E[H^2] + E[H] = sum_h (2h+1)(1 - CDF(h)), truncated once CDF > 1 - tail."""
    from .kernelgf import moran_height_cdf
    p = float(p)
    mean = 0.0
    second = 0.0
    h = 0
    while True:
        cdf = float(moran_height_cdf(p, h, n))
        sf = 1.0 - cdf
        mean += sf
        second += (2 * h + 1) * sf
        if cdf > 1.0 - tail or h > n:
            break
        h += 1
    return mean, second - mean * mean
