"""Pure-Python exhaustive enumeration backend.

Walks every choice sequence (one of the steps, or a reset, at each tick) and
accumulates integer weights per (time, altitude) and (time, running-max).
Weights are products of probability numerators over a common denominator, so
the counts are exact; Python integers make overflow a non-issue here.
"""

from __future__ import annotations


def joint_counts(jumps, numers, reset_numer, n):
    """Return (alt_counts, height_counts): per-time dicts value -> integer weight.

    Probability of value v at time t is counts[t][v] / denom**t where denom is
    the common denominator the numerators were taken over.
    """
    alt_counts = [dict() for _ in range(n + 1)]
    h_counts = [dict() for _ in range(n + 1)]
    choices = list(zip(jumps, numers))

    def visit(t, alt, high, weight):
        row = alt_counts[t]
        row[alt] = row.get(alt, 0) + weight
        row = h_counts[t]
        row[high] = row.get(high, 0) + weight
        if t == n:
            return
        for jump, numer in choices:
            a = alt + jump
            visit(t + 1, a, a if a > high else high, weight * numer)
        visit(t + 1, 0, high, weight * reset_numer)

    visit(0, 0, 0, 1)
    return alt_counts, h_counts
