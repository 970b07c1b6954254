"""Asymptotics of the running maximum of single up-step walks with resets.

The cumulative law Pr(H_n <= h) is governed by the dominant root of
D(z) = 1 - z + q p^{h+1} z^{h+2}; pinning that root down gives the
double-exponential (discrete Gumbel) limit shape, the peak location, and the
waiting-time asymptotics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
import numpy as np

from .errors import ClassificationFailed
from .kernelgf import moran_height_cdf, moran_height_pmf, waiting_time_gf, coeff_extract
from .numeric import as_fraction, is_exact

EULER_GAMMA = 0.5772156649015329


# ---------------------------------------------------------------------------
# Denominator root localization.

@dataclass(frozen=True)
class DenominatorRoots:
    h: int
    p: float
    roots: tuple                 # all h+2 roots, sorted by modulus
    z1: float                    # dominant real root in (1, 1/p)
    epsilon: float               # z1 - 1, from compensated bisection
    classified: bool             # True when the h >= 2/q regime applies
    z_star: float                # positive critical point of D

    def moduli(self):
        return [abs(z) for z in self.roots]


def denominator_value(p, h: int, z):
    """D(z) = 1 - z + q p^{h+1} z^{h+2}; exact when p and z are rational."""
    one = Fraction(1) if is_exact(p, z) else 1.0
    q = one - p
    return one - z + q * p ** (h + 1) * z ** (h + 2)


def _epsilon_bisection(p: float, h: int, tol: float = 1e-15, max_iter: int = 200) -> float:
    """Solve D(1+eps)=0 for eps directly: g(eps) = q p^{h+1} (1+eps)^{h+2} - eps.

    Working in eps-space sidesteps the catastrophic cancellation of
    evaluating D near z = 1 (eps is of order q p^{h+1})."""
    q = 1.0 - p
    g = lambda e: q * p ** (h + 1) * (1.0 + e) ** (h + 2) - e
    lo = 0.0
    hi = q * p ** (h + 1)
    while g(hi) > 0:
        hi *= 2.0
        if hi > 1.0 / p - 1.0:
            hi = 1.0 / p - 1.0
            break
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if g(mid) > 0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= tol * max(hi, 1e-300):
            break
    return 0.5 * (lo + hi)


def locate_roots(p: float, h: int, mod_tol: float = 1e-9) -> DenominatorRoots:
    """All h+2 roots of D, classified per the localization pattern:
    one real root in (1, 1/p), one at exactly 1/p, the rest of modulus
    slightly above 1/p, all simple.

    The pattern is only guaranteed for h >= 2/q; below that the roots are
    still returned with ``classified=False``.
    """
    p = float(p)
    q = 1.0 - p
    z_star = (1.0 / p) * (1.0 / (q * (h + 2))) ** (1.0 / (h + 1))
    eps = _epsilon_bisection(p, h)
    z1 = 1.0 + eps

    # Rescale z = w/p so all coefficients are O(1): 1 - w/p + (q/p) w^{h+2}.
    coeffs = np.zeros(h + 3)
    coeffs[0] = 1.0
    coeffs[1] = -1.0 / p
    coeffs[h + 2] = q / p
    w_roots = np.polynomial.polynomial.polyroots(coeffs)
    roots = sorted((w / p for w in w_roots), key=abs)

    # Snap the two structurally known roots to their refined values.
    roots[0] = complex(z1)
    i_unit = min(range(len(roots)), key=lambda i: abs(roots[i] - 1.0 / p))
    roots[i_unit] = complex(1.0 / p)
    roots.sort(key=abs)

    inside = [z for z in roots if abs(z) < 1.0 / p - mod_tol]
    at = [z for z in roots if abs(abs(z) - 1.0 / p) <= mod_tol]
    outside = [z for z in roots if abs(z) > 1.0 / p + mod_tol]
    gaps = [abs(a - b) for i, a in enumerate(roots) for b in roots[i + 1:]]
    simple = min(gaps) > 1e-9 if gaps else True

    classified = h >= 2.0 / q
    if classified:
        # eps > 0 certifies z1 > 1 even when eps underflows below the
        # ulp of 1.0 (it does already for moderate h).
        ok = (len(inside) == 1 and abs(inside[0].imag) < mod_tol
              and eps > 0.0 and inside[0].real < 1.0 / p
              and len(at) == 1 and len(outside) == h and simple)
        if not ok:
            raise ClassificationFailed(
                f"root pattern violated for p={p}, h={h}: "
                f"{len(inside)} inside, {len(at)} on, {len(outside)} outside")
    return DenominatorRoots(h, p, tuple(roots), z1, eps, classified, z_star)


# ---------------------------------------------------------------------------
# Height law approximations.

def height_cdf_approx(p: float, n: int, h: int) -> float:
    """exp(-q n p^{h+1}), the double-exponential approximation of Pr(H_n <= h)."""
    if n < 1 or h < 0:
        raise ValueError("need n >= 1 and h >= 0")
    q = 1.0 - float(p)
    return math.exp(-q * n * float(p) ** (h + 1))


def peak_height(p: float, n: int):
    """Peak location of the height law and its limiting value.

    The mode is the closest integer to ln(n q^2 / ln(1/p)) / ln(1/p); the
    probability there tends to p^{p/q} - p^{1/q}.
    """
    if n < 2:
        raise ValueError("need n >= 2")
    p = float(p)
    q = 1.0 - p
    c_star = 1.0 - math.log(math.log(1.0 / p) / q**2) / math.log(n)
    h_star = round(c_star * math.log(n) / math.log(1.0 / p))
    peak = p ** (p / q) - p ** (1.0 / q)
    return int(h_star), peak


@dataclass(frozen=True)
class FracPartData:
    n: int
    alpha: float            # p^{-frac(ln n / ln(1/p))}, in [1, 1/p)


def alpha(p, n: int) -> FracPartData:
    """Log-periodic factor p^{-{ln n / ln(1/p)}} with exact handling of
    resonance points: when p = 1/m and n is an exact power of m the
    fractional part is forced to zero (naive rounding can flip the value
    by a factor 1/p there)."""
    if n < 1:
        raise ValueError("need n >= 1")
    pf = as_fraction(p)
    if pf.numerator == 1:
        m = pf.denominator
        v = n
        while v % m == 0:
            v //= m
        if v == 1:
            return FracPartData(n, 1.0)
    x = math.log(n) / -math.log(float(p))
    frac = x - math.floor(x)
    return FracPartData(n, float(p) ** (-frac))


# ---------------------------------------------------------------------------
# Gumbel utilities.

@dataclass(frozen=True)
class GumbelParams:
    mu: float
    beta: float

    def __post_init__(self):
        if self.beta <= 0:
            raise ValueError("beta must be positive")


def gumbel_cdf(params: GumbelParams, x, discrete: bool = False) -> float:
    """Continuous CDF exp(-exp(-(x-mu)/beta)); the discrete variant is the
    same expression restricted to integer arguments (floored)."""
    if discrete:
        x = math.floor(x)
    return math.exp(-math.exp(-(x - params.mu) / params.beta))


def gumbel_mean_var(params: GumbelParams):
    """Mean and variance of the continuous Gumbel law."""
    return (params.mu + EULER_GAMMA * params.beta,
            math.pi**2 / 6.0 * params.beta**2)


def gumbel_median(params: GumbelParams) -> float:
    return params.mu - params.beta * math.log(math.log(2.0))


def discrete_gumbel_mean_var(params: GumbelParams, dps: int = 30):
    """Mean and variance of the integer-supported Gumbel law, summed in
    extended precision (the terms decay doubly exponentially)."""
    with mpmath.workdps(dps):
        mu, beta = mpmath.mpf(params.mu), mpmath.mpf(params.beta)
        cdf = lambda h: mpmath.exp(-mpmath.exp(-(h - mu) / beta))
        lo = int(math.floor(params.mu - 40 * params.beta))
        hi = int(math.ceil(params.mu + 40 * params.beta))
        mean = mpmath.mpf(0)
        second = mpmath.mpf(0)
        prev = cdf(lo - 1)
        for hh in range(lo, hi + 1):
            cur = cdf(hh)
            w = cur - prev
            mean += hh * w
            second += hh * hh * w
            prev = cur
        var = second - mean * mean
        return mean, var


@dataclass(frozen=True)
class GumbelConvergence:
    n: int
    distance: float          # sup_k |exact CDF - double-exponential form|
    mean_gap: float          # |discrete mean - continuous mean| for the limit params
    var_gap: float
    bounds_ok: bool          # the |X - Y| < 1 moment bounds hold


def gumbel_convergence_check(p, n: int) -> GumbelConvergence:
    """Distance between the exact height CDF at the shifted integers and the
    limiting discrete Gumbel shape exp(-q alpha(n) p^{k+1})."""
    if n < 2:
        raise ValueError("need n >= 2")
    pf = float(p)
    q = 1.0 - pf
    a = alpha(p, n).alpha
    base = math.floor(math.log(n) / math.log(1.0 / pf))
    dist = 0.0
    for h in range(0, min(n, 4 * base + 40) + 1):
        k = h - base
        exact = float(moran_height_cdf(pf, h, n))
        approx = math.exp(-q * a * pf ** (k + 1))
        dist = max(dist, abs(exact - approx))
    beta = 1.0 / math.log(1.0 / pf)
    params = GumbelParams(0.0, beta)
    dmean, dvar = discrete_gumbel_mean_var(params)
    cmean, cvar = gumbel_mean_var(params)
    mean_gap = abs(float(dmean) - cmean)
    var_gap = abs(float(dvar) - cvar)
    ok = mean_gap < 1.0 and var_gap < 2.0 + 4.0 * abs(cmean)
    return GumbelConvergence(n, dist, mean_gap, var_gap, ok)


# ---------------------------------------------------------------------------
# Waiting time and excursions.

def waiting_time_cdf_approx(p: float, h: int, n: int) -> float:
    """Pr(tau_h <= n) ~ 1 - exp(-q n p^h).

    This is 1 minus the double-exponential height form at h-1, through the
    first-passage/height duality Pr(tau_h <= n) = 1 - Pr(H_n <= h-1).
    """
    if h < 1 or n < 1:
        raise ValueError("need h >= 1 and n >= 1")
    q = 1.0 - float(p)
    return 1.0 - math.exp(-q * n * float(p) ** h)


def waiting_time_cdf_exact(p, h: int, n: int):
    """Pr(tau_h <= n) summed from the first-passage generating function."""
    gf = waiting_time_gf(p, h)
    return sum(gf.series_prefix(n)[h:]) if n >= h else 0 * gf.den[0]


@dataclass(frozen=True)
class ExcursionStats:
    n: int
    cdf: object              # Pr(excursion height <= h)
    mean: float              # asymptotic mean
    variance: float          # asymptotic variance


def excursion_height_stats(p, n: int, h: int) -> ExcursionStats:
    """Height statistics of walks conditioned to end at altitude zero.

    Such a walk necessarily ends with a reset, so its height law equals the
    unconditioned law one tick earlier; asymptotic moments are the walk
    moments evaluated at n-1.
    """
    from .fluctuations import mean_asymptotic, variance_asymptotic
    if n < 1:
        raise ValueError("need n >= 1")
    cdf = moran_height_cdf(p, h, n - 1)
    if n - 1 >= 2:
        mean = mean_asymptotic(p, n - 1).value
        var = variance_asymptotic(p, n - 1).value
    else:
        mean = float("nan")
        var = float("nan")
    return ExcursionStats(n, cdf, mean, var)
