"""Populations of m individuals with subset resets, and the soliton wave.

Events are subsets I of {1..m}: everyone in I is replaced by an age-0
individual, everyone else ages by one.  The joint age generating function is
rational with an explicit denominator built from the empty-set, singleton and
full-set rates; rationality is certified numerically by multiplying the
evolved series with that denominator and watching the high-order coefficients
vanish.  Subsets are bitmasks throughout (bit i-1 <-> individual i).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

import numpy as np

from .errors import NonStochastic, ResidualTooLarge, ResourceLimit
from .numeric import as_fraction, is_exact

EXACT_M_CAP = 6
SIMULATE_M_CAP = 12


@dataclass(frozen=True)
class MoranMDModel:
    m: int
    events: tuple            # ((bitmask, probability), ...) sorted by mask
    initial_ages: tuple      # starting age of each individual

    @property
    def exact(self) -> bool:
        return is_exact(*(p for _, p in self.events))

    def full_mask(self) -> int:
        return (1 << self.m) - 1

    def rate(self, mask: int):
        """Denominator rate of subset I: the total probability of events
        J contained in I (the diagonal of the triangular substitution
        system).  For classical models this is the familiar
        p_empty + sum_{i in I} p_i + p_full [I = full]."""
        zero = 0 * sum(p for _, p in self.events)
        r = zero
        for ev_mask, p in self.events:
            if ev_mask & ~mask == 0:
                r = r + p
        return r


def validate_md_model(m: int, event_probs: Mapping[int, object],
                      initial_ages=None) -> MoranMDModel:
    """Check the subset-event law: probabilities over bitmasks summing to 1."""
    if m < 1:
        raise ValueError("m must be >= 1")
    items = [(int(mask), p) for mask, p in event_probs.items() if p != 0]
    for mask, p in items:
        if not 0 <= mask < (1 << m):
            raise ValueError(f"event mask {mask} out of range for m={m}")
        if p < 0:
            raise NonStochastic("negative event probability")
    total = sum(p for _, p in items)
    exact = is_exact(*(p for _, p in items))
    if exact:
        if total != 1:
            raise NonStochastic(f"event probabilities sum to {total}")
    elif abs(float(total) - 1.0) > 1e-12:
        raise NonStochastic(f"event probabilities sum to {total!r}")
    ages = tuple(initial_ages) if initial_ages is not None else (0,) * m
    if len(ages) != m or any(a < 0 for a in ages):
        raise ValueError("initial_ages must be m nonnegative integers")
    return MoranMDModel(m, tuple(sorted(items)), ages)


def classical_md_model(m: int, survive_prob, single_probs, all_prob) -> MoranMDModel:
    """Classical population model: all survive (p), individual i dies (p_i),
    or everyone dies (p_0)."""
    events = {0: survive_prob, (1 << m) - 1: all_prob}
    for i, pi in enumerate(single_probs):
        events[1 << i] = events.get(1 << i, 0) + pi
    events = {k: v for k, v in events.items() if v != 0}
    return validate_md_model(m, events)


@dataclass(frozen=True)
class AgeMeasure:
    n: int
    masses: dict             # age tuple -> probability

    def total(self):
        return sum(self.masses.values())

    def marginal(self, i: int) -> dict:
        out = {}
        for ages, w in self.masses.items():
            out[ages[i]] = out.get(ages[i], 0) + w
        return out

    def eval_monomial(self, x) -> object:
        """sum over age tuples of mass * prod x_i^{age_i}."""
        total = 0
        for ages, w in self.masses.items():
            term = w
            for xi, a in zip(x, ages):
                term = term * xi**a
            total = total + term
        return total

    def max_coordinate_dist(self) -> dict:
        out = {}
        for ages, w in self.masses.items():
            mx = max(ages)
            out[mx] = out.get(mx, 0) + w
        return out


def evolve_measure(model: MoranMDModel, n: int, m_cap: int = EXACT_M_CAP,
                   support_cap: int = 5_000_000) -> AgeMeasure:
    """Exact joint age law after n events: each event resets its subset to
    age 0 and ages everyone else by one."""
    if model.m > m_cap:
        raise ResourceLimit(f"m={model.m} beyond exact cap {m_cap}")
    if n < 0:
        raise ValueError("n must be >= 0")
    one = Fraction(1) if model.exact else 1.0
    measure = {model.initial_ages: one}
    for _ in range(n):
        new = {}
        for ages, w in measure.items():
            for mask, prob in model.events:
                nxt = tuple(0 if (mask >> i) & 1 else a + 1 for i, a in enumerate(ages))
                key = nxt
                cur = new.get(key)
                new[key] = w * prob if cur is None else cur + w * prob
        if len(new) > support_cap:
            raise ResourceLimit(f"age support exceeded {support_cap} tuples")
        measure = new
    return AgeMeasure(n, measure)


@dataclass(frozen=True)
class DenominatorDelta:
    m: int
    factors: tuple           # (rate, mask) per subset; factor = 1 - t*rate*prod_{i not in I} x_i

    def coefficients_in_t(self, x):
        """Expand Delta(t, x) at numeric x: dense coefficient list in t."""
        coeffs = [Fraction(1) if is_exact(*x) else 1.0]
        for rate, mask in self.factors:
            outside = 1
            for i, xi in enumerate(x):
                if not (mask >> i) & 1:
                    outside = outside * xi
            lin = -rate * outside
            nxt = [0 * coeffs[0]] * (len(coeffs) + 1)
            for i, c in enumerate(coeffs):
                nxt[i] += c
                nxt[i + 1] += c * lin
            coeffs = nxt
        return coeffs


def delta_denominator(model: MoranMDModel) -> DenominatorDelta:
    """The 2^m-factor denominator of the joint age generating function."""
    return DenominatorDelta(model.m, tuple((model.rate(mask), mask)
                                           for mask in range(1 << model.m)))


def rationality_check(model: MoranMDModel, x, order: int = None,
                      tol: float = 1e-10) -> float:
    """Certify that Delta(t,x) * sum_n f_n(x) t^n is a polynomial of degree
    below 2^m: every coefficient of t^k for 2^m <= k <= order must vanish.
    Returns the worst residual (exactly zero in rational mode)."""
    two_m = 1 << model.m
    if order is None:
        order = two_m + 8
    if order <= two_m:
        raise ValueError("order must exceed 2^m")
    series = []
    one = Fraction(1) if (model.exact and is_exact(*x)) else 1.0
    measure = {model.initial_ages: one}
    for t in range(order + 1):
        series.append(sum(w * math.prod(xi**a for xi, a in zip(x, ages))
                          for ages, w in measure.items()))
        if t < order:
            new = {}
            for ages, w in measure.items():
                for mask, prob in model.events:
                    nxt = tuple(0 if (mask >> i) & 1 else a + 1 for i, a in enumerate(ages))
                    cur = new.get(nxt)
                    new[nxt] = w * prob if cur is None else cur + w * prob
            measure = new
    delta = delta_denominator(model).coefficients_in_t(x)
    residual = 0.0
    for k in range(two_m, order + 1):
        acc = 0 * series[0]
        for j in range(max(0, k - len(series) + 1), min(k, len(delta) - 1) + 1):
            acc += delta[j] * series[k - j]
        residual = max(residual, abs(float(acc)))
    if residual > tol:
        raise ResidualTooLarge(f"rationality residual {residual:.3g} > {tol}")
    return residual


def age_count_statistics(model: MoranMDModel, n: int, k: int):
    """Expected number of individuals of age k at time n (sum of the
    per-individual marginals; valid for asymmetric event laws too)."""
    measure = evolve_measure(model, n)
    zero = 0 * sum(p for _, p in model.events)
    total = zero
    for i in range(model.m):
        total += measure.marginal(i).get(k, zero)
    return total


def simulate_md(model: MoranMDModel, n: int, reps: int, seed: int,
                m_cap: int = SIMULATE_M_CAP):
    """Monte Carlo for the subset-reset population; deterministic by seed.
    Returns (age_counts, final_ages) where age_counts[(ages...)] counts
    replicas ending in that exact tuple."""
    if model.m > m_cap:
        raise ResourceLimit(f"m={model.m} beyond simulation cap {m_cap}")
    if reps < 1:
        raise ValueError("reps must be >= 1")
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    masks = np.array([mask for mask, _ in model.events], dtype=np.int64)
    probs = np.array([float(p) for _, p in model.events])
    probs /= probs.sum()
    reset = np.array([[(mask >> i) & 1 for i in range(model.m)] for mask in masks],
                     dtype=bool)
    ages = np.tile(np.array(model.initial_ages, dtype=np.int64), (reps, 1))
    for _ in range(n):
        ev = rng.choice(len(masks), size=reps, p=probs)
        ages = np.where(reset[ev], 0, ages + 1)
    counts = {}
    for row in ages:
        key = tuple(int(a) for a in row)
        counts[key] = counts.get(key, 0) + 1
    return counts, ages


# ---------------------------------------------------------------------------
# Soliton wave model.

@dataclass(frozen=True)
class SolitonState:
    """m particles on the integer line; one jumps to the wave front per tick.

    ``particles`` are positions normalized so the front sits at 1; ``urns``
    hold the m-1 gap counts.  Both representations are updated independently
    so they can cross-check each other.
    """
    particles: tuple
    urns: tuple

    @staticmethod
    def initial(m: int) -> "SolitonState":
        if m < 1:
            raise ValueError("m must be >= 1")
        return SolitonState(tuple(range(1, m + 1)), (0,) * (m - 1))

    @property
    def m(self) -> int:
        return len(self.particles)

    @property
    def length(self) -> int:
        """Wave length from the particle representation."""
        return self.particles[-1] - self.particles[0] + 1

    @property
    def length_from_urns(self) -> int:
        return self.m + sum(self.urns)


def soliton_step(state: SolitonState, chosen: int) -> SolitonState:
    """Advance one tick: the particle of rank ``chosen`` (1 = front) jumps
    just left of the front; trailing empty slots drop off the length."""
    m = state.m
    if not 1 <= chosen <= m:
        raise ValueError(f"chosen must be in 1..{m}")
    pos = list(state.particles)
    moved = pos.pop(chosen - 1)
    front = state.particles[0]
    pos.insert(0, front - 1)
    shift = 1 - pos[0]
    pos = tuple(v + shift for v in pos)

    urns = list(state.urns)
    if m > 1:
        if chosen == 1:
            urns[0] += 1
        elif chosen == m:
            urns = [0] + urns[:-1]
        else:
            k = chosen - 1          # zero-based urn index of the vacated slot's merge
            merged = urns[k - 1] + urns[k] + 1
            urns = [0] + urns[:k - 1] + [merged] + urns[k + 1:]
    return SolitonState(pos, tuple(urns))


def soliton_simulate(m: int, steps: int, seed: int):
    """Run the wave for ``steps`` ticks with uniformly chosen particles;
    returns (lengths, states_checked) with lengths[t] = L_t."""
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    state = SolitonState.initial(m)
    lengths = [state.length]
    for _ in range(steps):
        state = soliton_step(state, int(rng.integers(1, m + 1)))
        if state.length != state.length_from_urns:
            raise AssertionError("urn and particle representations disagree")
        lengths.append(state.length)
    return lengths, state


def soliton_model(m: int) -> MoranMDModel:
    """Event law of the soliton wave read as a subset-reset model: singleton
    resets with probability 1/m, initial ages (1, 2, ..., m)."""
    events = {1 << i: Fraction(1, m) for i in range(m)}
    return validate_md_model(m, events, initial_ages=tuple(range(1, m + 1)))


def soliton_gf_check(m: int, order: int = None, tol: float = 1e-12) -> float:
    """Rationality certificate for the soliton generating function (the
    denominator factors specialize to rates |I|/m)."""
    if m > 4:
        raise ResourceLimit("series feasibility cap is m = 4")
    model = soliton_model(m)
    x = tuple(Fraction(1, 2 * i + 3) for i in range(m))
    return rationality_check(model, x, order, tol)


def soliton_length_model(m: int) -> MoranMDModel:
    """Same event law but with ages read as front-relative coordinates
    (initial ages 0..m-1), for which length = 1 + max coordinate."""
    events = {1 << i: Fraction(1, m) for i in range(m)}
    return validate_md_model(m, events, initial_ages=tuple(range(m)))


def soliton_length_distribution(m: int, n: int) -> dict:
    """Exact law of L_n from the measure evolution of the coordinate model."""
    measure = evolve_measure(soliton_length_model(m), n)
    out = {}
    for mx, w in measure.max_coordinate_dist().items():
        out[mx + 1] = out.get(mx + 1, 0) + w
    return out


def find_choice_sequence(lengths) -> tuple | None:
    """Search for a choice sequence reproducing a printed length trace
    (the trace starts at L_0 = m)."""
    m = lengths[0]
    target = list(lengths)

    def extend(state, t, acc):
        if t == len(target) - 1:
            return tuple(acc)
        for choice in range(1, m + 1):
            nxt = soliton_step(state, choice)
            if nxt.length == target[t + 1]:
                found = extend(nxt, t + 1, acc + [choice])
                if found is not None:
                    return found
        return None

    state = SolitonState.initial(m)
    if state.length != target[0]:
        return None
    return extend(state, 0, [])
