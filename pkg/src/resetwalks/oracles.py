"""Ground-truth engines for walks with resets.

Dynamic programming over step polynomials gives exact finite-time
distributions; closed-form mean/variance come from the generating function
F(z,u) = (1 + qz/(1-z)) / (1 - zP(u)); Monte Carlo provides a third,
independent route.  The exhaustive-enumeration oracle lives in
:mod:`resetwalks.enumeration`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import NormalizationFailed, ResourceLimit
from .model import DistVector, LaurentPoly, StepModel, drift_moments, step_polynomial, validate_model
from .numeric import as_fraction

DEFAULT_WIDTH_CAP = 200_000


def altitude_dist_dp(model: StepModel, n: int, width_cap: int = DEFAULT_WIDTH_CAP) -> DistVector:
    """Exact law of the altitude after n ticks, by iterating
    f_{t+1}(u) = P(u) f_t(u) + q f_t(1)."""
    if n < 0:
        raise ValueError("n must be >= 0")
    P = step_polynomial(model)
    q = model.reset_prob
    f = LaurentPoly.one(model.exact)
    for _ in range(n):
        if len(f.coeffs) > width_cap:
            raise ResourceLimit(f"altitude support exceeded {width_cap} slots")
        f = (P * f + LaurentPoly(0, (q * f.mass(),))).normalize()
    return DistVector(f.offset, f.coeffs)


def altitude_dist_formula(model: StepModel, n: int, k: int,
                          width_cap: int = DEFAULT_WIDTH_CAP):
    """Pr(Y_n = k) as the coefficient formula
    [u^k] P(u)^n + q [u^k] sum_{j<n} P(u)^j."""
    if n < 0:
        raise ValueError("n must be >= 0")
    P = step_polynomial(model)
    zero = 0 * model.reset_prob
    power = LaurentPoly.one(model.exact)
    partial = zero  # [u^k] sum_{j=0}^{n-1} P^j, accumulated as we go
    for _ in range(n):
        partial += power.coefficient(k)
        power = (power * P).normalize()
        if len(power.coeffs) > width_cap:
            raise ResourceLimit(f"altitude support exceeded {width_cap} slots")
    return power.coefficient(k) + model.reset_prob * partial


def altitude_mean_var(model: StepModel, n: int):
    """Closed-form mean and variance of the altitude at time n."""
    if n < 0:
        raise ValueError("n must be >= 0")
    q = model.reset_prob
    if model.is_moran:
        p = model.steps[0][1]
        mean = (p / q) * (1 - p**n)
        var = (p / q**2) * (1 - p**n * (p**(n + 1) + (1 + 2 * n) * q))
        return mean, var
    delta, second = drift_moments(model)
    r = 1 - q
    mean = delta / q + r**(n - 1) * (delta - delta / q) if n >= 1 else 0 * delta
    var = ((second + delta) * q + delta**2) / q**2 \
        + r**n * (2 * delta**2 * n / ((q - 1) * q) - (second + delta) / q) \
        - r**(2 * n) * delta**2 / q**2
    return mean, var


@dataclass(frozen=True)
class HeightDistribution:
    """Pr(H_n = h) for h = 0..hmax, plus the mass of heights beyond hmax."""
    dist: DistVector
    tail: object

    def cdf(self, h: int):
        return self.dist.cdf(h)


def height_dist_dp(model: StepModel, n: int, hmax: int,
                   state_cap: int = 2_000_000) -> HeightDistribution:
    """Exact law of the running maximum H_n = max(Y_0..Y_n), truncated at hmax.

    Joint DP over (altitude, running max); states whose maximum exceeds hmax
    are pooled into a single tail bucket.
    """
    if n < 0 or hmax < 0:
        raise ValueError("n and hmax must be >= 0")
    q = model.reset_prob
    zero = 0 * q
    table = {(0, 0): Fraction(1) if model.exact else 1.0}
    tail = zero
    for _ in range(n):
        new = {}
        new_tail = tail  # walks already above hmax stay there
        for (alt, high), mass in table.items():
            for jump, p in model.steps:
                a = alt + jump
                h = a if a > high else high
                w = mass * p
                if h > hmax:
                    new_tail += w
                else:
                    key = (a, h)
                    new[key] = new.get(key, zero) + w
            key = (0, high)
            new[key] = new.get(key, zero) + mass * q
        if len(new) > state_cap:
            raise ResourceLimit(f"height DP exceeded {state_cap} states")
        table, tail = new, new_tail
    heights = {}
    for (_, high), mass in table.items():
        heights[high] = heights.get(high, zero) + mass
    return HeightDistribution(DistVector.from_dict(heights), tail)


def excursion_height_dist(model: StepModel, n: int, hmax: int) -> HeightDistribution:
    """Height law conditioned on ending at altitude 0 (computed directly
    from the joint DP, not via the walk/excursion identity)."""
    if n < 0 or hmax < 0:
        raise ValueError("n and hmax must be >= 0")
    q = model.reset_prob
    zero = 0 * q
    table = {(0, 0): Fraction(1) if model.exact else 1.0}
    for _ in range(n):
        new = {}
        for (alt, high), mass in table.items():
            for jump, p in model.steps:
                a = alt + jump
                h = a if a > high else high
                if h <= hmax + 1:  # keep one band above hmax so the tail conditions correctly
                    key = (a, min(h, hmax + 1))
                    new[key] = new.get(key, zero) + mass * p
            key = (0, high)
            new[key] = new.get(key, zero) + mass * q
        table = new
    at_zero = {h: m for (alt, h), m in table.items() if alt == 0}
    total = sum(at_zero.values())
    heights = {}
    for h, m in at_zero.items():
        if h <= hmax:
            heights[h] = heights.get(h, zero) + m / total
    tail = 1 - sum(heights.values())
    return HeightDistribution(DistVector.from_dict(heights), tail)


@dataclass(frozen=True)
class SimulationResult:
    reps: int
    final_counts: dict      # altitude -> hits at time n
    height_counts: dict     # running max -> hits
    resets_total: int
    trace: tuple            # altitudes Y_0..Y_n of the first replica
    trace_resets: tuple     # tick indices where the first replica reset

    def final_freq(self, k: int) -> float:
        return self.final_counts.get(k, 0) / self.reps

    def height_freq(self, h: int) -> float:
        return self.height_counts.get(h, 0) / self.reps


def _simulate_shard(model: StepModel, n: int, reps: int, rng: np.random.Generator):
    jumps = np.array([k for k, _ in model.steps], dtype=np.int64)
    probs = np.array([float(p) for _, p in model.steps] + [float(model.reset_prob)])
    probs /= probs.sum()
    cum = np.cumsum(probs)
    alt = np.zeros(reps, dtype=np.int64)
    high = np.zeros(reps, dtype=np.int64)
    resets = 0
    trace = [0]
    trace_resets = []
    u = rng.random((n, reps))
    for t in range(n):
        choice = np.searchsorted(cum, u[t], side="right")
        is_reset = choice == len(jumps)
        alt = np.where(is_reset, 0, alt + jumps[np.minimum(choice, len(jumps) - 1)])
        high = np.maximum(high, alt)
        resets += int(is_reset.sum())
        trace.append(int(alt[0]))
        if is_reset[0]:
            trace_resets.append(t + 1)
    return alt, high, resets, trace, trace_resets


def simulate(model: StepModel, n: int, reps: int, seed: int,
             threads: int = 1) -> SimulationResult:
    """Monte Carlo oracle; deterministic for a given seed.

    Replicas are sharded; shard s draws from the stream spawned as
    ``SeedSequence(seed).spawn(shards)[s]``, so the merged histograms do not
    depend on scheduling.
    """
    if reps < 1:
        raise ValueError("reps must be >= 1")
    shards = max(1, int(threads))
    seqs = np.random.SeedSequence(seed).spawn(shards)
    base = reps // shards
    sizes = [base + (1 if s < reps % shards else 0) for s in range(shards)]
    outs = []
    if shards == 1:
        outs.append(_simulate_shard(model, n, reps, np.random.default_rng(seqs[0])))
    else:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(max_workers=shards) as pool:
            futs = [pool.submit(_simulate_shard, model, n, sz, np.random.default_rng(sq))
                    for sz, sq in zip(sizes, seqs) if sz > 0]
            outs = [f.result() for f in futs]
    final_counts, height_counts, resets_total = {}, {}, 0
    for alt, high, resets, _, _ in outs:
        vals, cnts = np.unique(alt, return_counts=True)
        for v, c in zip(vals.tolist(), cnts.tolist()):
            final_counts[v] = final_counts.get(v, 0) + c
        vals, cnts = np.unique(high, return_counts=True)
        for v, c in zip(vals.tolist(), cnts.tolist()):
            height_counts[v] = height_counts.get(v, 0) + c
        resets_total += resets
    return SimulationResult(reps, final_counts, height_counts, resets_total,
                            tuple(outs[0][3]), tuple(outs[0][4]))


def normalize_support(model: StepModel) -> StepModel:
    """Bring a model to the normalized form used by the asymptotic analysis:
    0 not in S, gcd of S equal to 1, and max S > 0."""
    steps = model.step_dict()
    q = model.reset_prob
    if 0 in steps:
        q = q + steps.pop(0)
    if not steps:
        raise NormalizationFailed("only the zero step remains")
    if max(steps) <= 0:
        steps = {-k: p for k, p in steps.items()}
    g = math.gcd(*(abs(k) for k in steps))
    if g > 1:
        steps = {k // g: p for k, p in steps.items()}
    return validate_model(steps, q)


def frobenius_reachable(jumps, k: int) -> bool:
    """Is k a nonnegative integer combination of the (positive) jumps?"""
    if k == 0:
        return True
    reach = [False] * (k + 1)
    reach[0] = True
    for v in range(1, k + 1):
        reach[v] = any(v >= j and reach[v - j] for j in jumps)
    return reach[k]


@dataclass(frozen=True)
class LimitAltitude:
    k: int
    limit: object
    bounds_ok: bool
    case: str               # "nonnegative" or "two-sided"
    finite_n: object = None # Pr(Y_n=k) when a finite n was supplied
    tau: float = None       # saddle point of the renormalized step law (two-sided case)


def _tau_saddle(P: LaurentPoly, tol: float = 1e-14) -> float:
    """Unique positive root of P'(tau) = 0 for two-sided step laws, located by
    bisection with a geometrically grown bracket."""
    dP = P.derivative()
    f = lambda u: float(dP(u))
    lo, hi = 1.0, 1.0
    while f(lo) > 0:
        lo /= 2
        if lo < 1e-12:
            raise NormalizationFailed("no sign change toward 0 for the saddle equation")
    while f(hi) < 0:
        hi *= 2
        if hi > 1e12:
            raise NormalizationFailed("no sign change toward infinity for the saddle equation")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if f(mid) < 0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= tol * max(1.0, lo):
            break
    return 0.5 * (lo + hi)


def limit_altitude_check(model: StepModel, k: int, n: int = None,
                         tail_tol: float = 1e-12) -> LimitAltitude:
    """Limit of Pr(Y_n = k) for n -> infinity, with the applicable bound check.

    Nonnegative-step models: the limit is q [u^k] sum_{j<=k} P(u)^j and must
    sit between q (min p_i)^k and q (max p_i)^{k/d} at reachable k.  Two-sided
    models: the limit is q sum_j P(1)^j w_{j,k} truncated once the geometric
    tail drops below ``tail_tol``; the bound check is geometric decay in |k|.
    """
    norm = normalize_support(model)
    P = step_polynomial(norm)
    q = norm.reset_prob
    finite = altitude_dist_formula(model, n, k) if n is not None else None

    if norm.min_step >= 1:
        if k < 0 or not frobenius_reachable([j for j, _ in norm.steps], k):
            return LimitAltitude(k, 0 * q, True, "nonnegative", finite)
        power = LaurentPoly.one(norm.exact)
        coeff_sum = power.coefficient(k)
        for _ in range(k):
            power = (power * P).normalize()
            coeff_sum += power.coefficient(k)
        limit = q * coeff_sum
        pmin = min(p for _, p in norm.steps)
        pmax = max(p for _, p in norm.steps)
        lo = q * pmin**k
        hi = q * float(pmax) ** (k / norm.max_step)
        ok = bool(lo <= limit and float(limit) <= hi * (1 + 1e-12))
        return LimitAltitude(k, limit, ok, "nonnegative", finite)

    # Two-sided: renormalize the step law to mass one, saddle point, then
    # accumulate q * sum_j P(1)^j w_{j,k} with w_{j,k} = [u^k] Ptilde(u)^j.
    mass = float(P.mass())          # P(1) = 1 - q
    Pt = LaurentPoly.from_dict({j: float(p) / mass for j, p in norm.steps})
    tau = _tau_saddle(Pt)
    limit = float(q) * _two_sided_limit_sum(Pt, mass, float(q), k, tail_tol)
    # Geometric-decay probe: the mass at k must dominate the mass one period
    # of jumps further out in the same direction.
    span = norm.max_step if k >= 0 else -norm.min_step
    further = float(q) * _two_sided_limit_sum(Pt, mass, float(q), k + (span if k >= 0 else -span), tail_tol)
    ok = further <= limit * (1 + 1e-9) or limit == 0
    return LimitAltitude(k, limit, ok, "two-sided", finite, tau)


def _two_sided_limit_sum(Pt: LaurentPoly, mass: float, q: float, k: int,
                         tail_tol: float) -> float:
    J = max(abs(k) + 1,
            int(math.ceil(math.log(tail_tol * (1 - mass) / q) / math.log(mass))) + 1)
    power = LaurentPoly.one(False)
    total = power.coefficient(k)
    pj = 1.0
    for _ in range(J):
        power = (power * Pt).normalize()
        pj *= mass
        total += pj * power.coefficient(k)
    return total


def limit_decay_check(model: StepModel, k_values) -> bool:
    """Geometric-decay probe: limit masses along k_values (same sign, growing
    |k|) must not increase."""
    vals = [abs(float(limit_altitude_check(model, k).limit)) for k in k_values]
    pairs = [(a, b) for a, b in zip(vals, vals[1:]) if a > 0]
    return all(b / a < 1.0 + 1e-9 for a, b in pairs)
