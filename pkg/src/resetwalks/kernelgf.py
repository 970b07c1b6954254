"""Bounded-height generating functions and fast coefficient extraction.

The kernel method turns the truncation recurrence for height-bounded walks
into a closed form over the divergent roots of 1 - z*P(u) = 0; for single
up-step (Moran) walks everything collapses to an explicit rational function
whose coefficients can be pulled out in O(log n) arithmetic operations by
polynomial binary exponentiation.
"""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import BranchPointProximity, DegenerateRoots, KernelZero, ResourceLimit
from .model import LaurentPoly, StepModel, step_polynomial
from .numeric import format_probability, is_exact, parse_probability

KERNEL_Z_RADIUS = 0.25     # beyond this, modulus no longer identifies the divergent branches
ROOT_GAP_REL = 1e-8


@dataclass(frozen=True)
class RationalGF:
    """num(z)/den(z) with coefficient lists in ascending powers; den[0] != 0."""

    num: tuple
    den: tuple

    def __post_init__(self):
        if not self.den or self.den[0] == 0:
            raise ValueError("denominator constant term must be nonzero")

    @property
    def exact(self) -> bool:
        return is_exact(*self.num, *self.den)

    def series_prefix(self, n: int) -> list:
        """First n+1 series coefficients by unrolling the linear recurrence."""
        d0 = self.den[0]
        out = []
        for i in range(n + 1):
            acc = self.num[i] if i < len(self.num) else 0 * d0
            for j in range(1, min(i, len(self.den) - 1) + 1):
                acc -= self.den[j] * out[i - j]
            out.append(acc / d0)
        return out

    def coefficient(self, n: int):
        return coeff_extract(self, n)

    def eval_at(self, z):
        num = _poly_eval(self.num, z)
        den = _poly_eval(self.den, z)
        return num / den

    def to_json(self) -> str:
        return json.dumps({"num": [format_probability(c) for c in self.num],
                           "den": [format_probability(c) for c in self.den]})

    @staticmethod
    def from_json(text: str) -> "RationalGF":
        obj = json.loads(text)
        return RationalGF(tuple(parse_probability(str(c)) for c in obj["num"]),
                          tuple(parse_probability(str(c)) for c in obj["den"]))


def _poly_eval(coeffs, z):
    acc = 0 * z
    for c in reversed(coeffs):
        acc = acc * z + c
    return acc


# ---------------------------------------------------------------------------
# Coefficient extraction: x^n modulo the characteristic polynomial.

def _poly_mulmod_exact(a, b, chi_low):
    """(a*b) mod (x^m + chi_low(x)) for dense coefficient lists."""
    m = len(chi_low)
    prod = [0 * a[0]] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai == 0:
            continue
        for j, bj in enumerate(b):
            prod[i + j] += ai * bj
    for i in range(len(prod) - 1, m - 1, -1):
        c = prod[i]
        if c == 0:
            continue
        prod[i] = 0 * c
        for j, g in enumerate(chi_low):
            if g != 0:
                prod[i - m + j] -= c * g
    return prod[:m] + [0 * a[0]] * (m - len(prod)) if len(prod) < m else prod[:m]


def _poly_mulmod_float(a, b, chi_low, sparse):
    prod = np.convolve(a, b)
    m = len(chi_low)
    if len(prod) < m:
        prod = np.concatenate([prod, np.zeros(m - len(prod))])
    prod = prod.tolist()
    for i in range(len(prod) - 1, m - 1, -1):
        c = prod[i]
        if c == 0.0:
            continue
        prod[i] = 0.0
        for j, g in sparse:
            prod[i - m + j] -= c * g
    return prod[:m]


def coeff_extract(gf: RationalGF, n: int):
    """[z^n] of the series of num/den in O(deg(den)^2 log n) operations.

    Reduces x^n modulo the characteristic polynomial of the denominator's
    recurrence, then combines with the first deg(den) series terms.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    den = list(gf.den)
    m = len(den) - 1
    if m == 0:
        return (gf.num[n] if n < len(gf.num) else 0 * gf.den[0]) / den[0]

    # Split off the polynomial part so the recurrence is pure from index m on.
    quot = []
    rem = list(gf.num)
    if len(rem) - 1 >= m:
        quot = [0 * den[0]] * (len(rem) - m)
        for i in range(len(rem) - 1, m - 1, -1):
            c = rem[i] / den[m]
            quot[i - m] = c
            for j in range(m + 1):
                rem[i - m + j] -= c * den[j]
        rem = rem[:m]
    poly_part = quot[n] if n < len(quot) else 0 * den[0]

    base = RationalGF(tuple(rem) if rem else (0 * den[0],), tuple(den))
    first = base.series_prefix(m - 1) if m > 0 else []
    if n < m:
        return poly_part + first[n]

    d0 = den[0]
    chi_low = [den[m - j] / d0 for j in range(m)]   # x^m + sum chi_low[j] x^j
    exact = gf.exact
    if exact:
        cur = [Fraction(0)] * m
        if m == 1:
            cur = [Fraction(0)]
        one = [Fraction(1)] + [Fraction(0)] * (m - 1)
        x = [Fraction(0), Fraction(1)] + [Fraction(0)] * (m - 2) if m >= 2 else None
        mul = lambda a, b: _poly_mulmod_exact(a, b, chi_low)
    else:
        chi_low = [float(c) for c in chi_low]
        one = [1.0] + [0.0] * (m - 1)
        x = [0.0, 1.0] + [0.0] * (m - 2) if m >= 2 else None
        sparse = [(j, g) for j, g in enumerate(chi_low) if g != 0.0]
        mul = lambda a, b: _poly_mulmod_float(a, b, chi_low, sparse)

    if m == 1:
        # x == -chi_low[0]; x^n is scalar
        coeff = (-chi_low[0]) ** n
        return poly_part + coeff * first[0]

    result = one
    power = x
    e = n
    while e:
        if e & 1:
            result = mul(result, power)
        e >>= 1
        if e:
            power = mul(power, power)
    value = sum(c * f for c, f in zip(result, first))
    if not exact and not math.isfinite(float(value)):
        raise ArithmeticError("coefficient extraction overflowed in float mode")
    return poly_part + value


# ---------------------------------------------------------------------------
# Moran closed forms.

def moran_height_gf(p, h: int) -> RationalGF:
    """Generating function of Pr(H_n <= h) for the single up-step walk:
    (1 - (pz)^{h+1}) / (1 - z + q p^{h+1} z^{h+2})."""
    if not (0 < p < 1):
        raise ValueError("p must be in (0,1)")
    if h < 0:
        raise ValueError("h must be >= 0")
    one = Fraction(1) if is_exact(p) else 1.0
    q = one - p
    num = [one] + [0 * one] * h + [-(p ** (h + 1))]
    den = [one, -one] + [0 * one] * h + [q * p ** (h + 1)]
    return RationalGF(tuple(num), tuple(den))


def moran_height_cdf(p, h: int, n: int):
    """Pr(H_n <= h) via O(log n) extraction; exact if p is a Fraction."""
    if h >= n:
        return Fraction(1) if is_exact(p) else 1.0
    return coeff_extract(moran_height_gf(p, h), n)


def moran_height_pmf(p, h: int, n: int):
    """Pr(H_n = h)."""
    if h == 0:
        return moran_height_cdf(p, 0, n)
    return moran_height_cdf(p, h, n) - moran_height_cdf(p, h - 1, n)


def pippenger_sum(p, h: int, n: int):
    """Pr(H_n <= h) as the alternating binomial sum
    sum_k (-q p^{h+1})^k [C(n-k(h+1), k) - p^{h+1} C(n-(k+1)(h+1), k)]."""
    if n < 0 or h < 0:
        raise ValueError("n and h must be >= 0")
    one = Fraction(1) if is_exact(p) else 1.0
    q = one - p
    ph1 = p ** (h + 1)
    total = 0 * one
    for k in range(n // (h + 1) + 1):
        a = math.comb(n - k * (h + 1), k) if n - k * (h + 1) >= 0 else 0
        b_idx = n - (k + 1) * (h + 1)
        b = math.comb(b_idx, k) if b_idx >= 0 else 0
        total += (-q * ph1) ** k * (a - ph1 * b)
    return total


def waiting_time_gf(p, h: int) -> RationalGF:
    """Generating function of Pr(tau_h = n), the first time altitude h is hit:
    (1 - pz) p^h z^h / (1 - z + q p^h z^{h+1}).

    Derived from Pr(tau_h <= n) = 1 - Pr(H_n <= h-1) and the bounded-height
    closed form; consistent with Pr(tau_h = h) = p^h.
    """
    if h < 1:
        raise ValueError("h must be >= 1")
    one = Fraction(1) if is_exact(p) else 1.0
    q = one - p
    ph = p ** h
    num = [0 * one] * h + [ph, -ph * p]
    den = [one, -one] + [0 * one] * (h - 1) + [q * ph]
    return RationalGF(tuple(num), tuple(den))


# ---------------------------------------------------------------------------
# Kernel method for arbitrary finite step sets.

@dataclass(frozen=True)
class KernelRoots:
    z: complex
    large_roots: tuple      # the d branches diverging as z -> 0

    def __iter__(self):
        return iter(self.large_roots)


def kernel_roots_at(model: StepModel, z, z_radius: float = KERNEL_Z_RADIUS) -> KernelRoots:
    """All roots of u^{|c|} (1 - z P(u)) of largest modulus (d of them).

    Near z = 0 the d divergent branches u_i(z) ~ z^{-1/d} are exactly the
    largest-modulus roots; the operation refuses |z| beyond ``z_radius``
    rather than risk mislabeling branches.
    """
    if z == 0:
        raise ValueError("z must be nonzero")
    if abs(z) > z_radius:
        raise BranchPointProximity(f"|z|={abs(z):.4g} beyond configured radius {z_radius}")
    P = step_polynomial(model)
    c, d = model.min_step, model.max_step
    shift = max(0, -c)
    # Coefficients of u^shift - z * u^shift * P(u), ascending in u.
    deg = shift + d
    coeffs = np.zeros(deg + 1, dtype=complex)
    coeffs[shift] = 1.0
    for k, pk in model.steps:
        coeffs[shift + k] -= z * float(pk)
    roots = np.polynomial.polynomial.polyroots(coeffs)
    # One Newton polish per root on f(u) = 1 - z P(u).
    dP = P.derivative()
    polished = []
    for u in roots:
        if u != 0:
            f = 1 - z * complex(P(u))
            fp = -z * complex(dP(u))
            if fp != 0:
                u = u - f / fp
        polished.append(u)
    polished.sort(key=lambda u: (-abs(u), cmath.phase(u)))
    large = polished[:d]
    rest = polished[d:]
    if rest and abs(rest[0]) > 0:
        if abs(large[-1]) / abs(rest[0]) < 1.2:
            raise BranchPointProximity("divergent and convergent branches have comparable modulus")
    gap = min((abs(a - b) for i, a in enumerate(large) for b in large[i + 1:]), default=math.inf)
    if gap < ROOT_GAP_REL * max(abs(u) for u in large):
        raise DegenerateRoots(f"kernel roots within {gap:.3g} of each other")
    return KernelRoots(z, tuple(large))


def bounded_gf_closed_form(model: StepModel, h: int, z, u,
                           roots: KernelRoots = None):
    """(W, F): values at (z, u) of the height-bounded generating functions
    without and with resets, from the interpolation closed form over the
    divergent kernel roots."""
    if roots is None:
        roots = kernel_roots_at(model, z)
    P = step_polynomial(model)
    q = float(model.reset_prob)

    def W_at(uu):
        kern = 1 - z * complex(P(uu))
        if kern == 0:
            raise KernelZero(f"1 - z P(u) vanishes at u={uu!r}")
        s = 0j
        rs = roots.large_roots
        for i, ui in enumerate(rs):
            prod = 1 + 0j
            for j, uj in enumerate(rs):
                if j != i:
                    prod *= (uj - uu) / (uj - ui)
            s += (uu / ui) ** (h + 1) * prod
        return (1 - s) / kern

    W = W_at(u)
    W1 = W_at(1.0)
    F = W / (1 - z * q * W1)
    return W, F


@dataclass(frozen=True)
class BoundedGFTable:
    """Series coefficients of the height-bounded generating functions.

    ``w[n]`` / ``f[n]`` are Laurent polynomials in u: the altitude laws at
    time n of walks that never exceeded h, without and with resets.
    """
    h: int
    order: int
    w: tuple
    f: tuple

    def w_coefficient(self, n: int, k: int):
        return self.w[n].coefficient(k)

    def f_coefficient(self, n: int, k: int):
        return self.f[n].coefficient(k)

    def height_cdf(self, n: int):
        """Pr(H_n <= h) = total mass of the reset-aware bounded walk."""
        return self.f[n].mass()

    def w_eval(self, z, u):
        return sum(complex(poly(u)) * z**n for n, poly in enumerate(self.w))

    def f_eval(self, z, u):
        return sum(complex(poly(u)) * z**n for n, poly in enumerate(self.f))


def bounded_gf_series(model: StepModel, h: int, order: int,
                      width_cap: int = 500_000) -> BoundedGFTable:
    """Iterate the truncation recurrence: multiply by P(u), drop monomials
    above u^h, and (for the reset variant) add q times the surviving mass."""
    if h < 0 or order < 0:
        raise ValueError("h and order must be >= 0")
    P = step_polynomial(model)
    q = model.reset_prob
    w = [LaurentPoly.one(model.exact)]
    f = [LaurentPoly.one(model.exact)]
    for _ in range(order):
        nxt = (P * w[-1]).truncate_above(h).normalize()
        w.append(nxt)
        carried = (P * f[-1]).truncate_above(h)
        nxt = (carried + LaurentPoly(0, (q * f[-1].mass(),))).normalize()
        f.append(nxt)
        if len(f[-1].coeffs) > width_cap:
            raise ResourceLimit(f"bounded series support exceeded {width_cap} slots")
    return BoundedGFTable(h, order, tuple(w), tuple(f))
