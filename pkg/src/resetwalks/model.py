"""Walk models and the shared containers every engine operates on.

A walk with resets is parametrized by a finite step set with probabilities
``p_k`` and a reset probability ``q``; at each tick the altitude either jumps
by some ``k`` or drops to zero.  The step law is carried around as a Laurent
polynomial, and distributions over altitudes/heights live in ``DistVector``.
All values are immutable after construction.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from .errors import DegenerateReset, EmptySupport, NonStochastic
from .numeric import FLOAT_MASS_TOL, is_exact, parse_probability, format_probability


@dataclass(frozen=True)
class StepModel:
    """Finite step set with probabilities, plus a reset probability q in (0,1).

    Use :func:`validate_model` (or :func:`moran`) to construct one; the raw
    constructor performs no checking.
    """

    steps: tuple          # ((jump, probability), ...) sorted by jump
    reset_prob: object    # Fraction or float

    @property
    def min_step(self) -> int:
        return self.steps[0][0]

    @property
    def max_step(self) -> int:
        return self.steps[-1][0]

    @property
    def exact(self) -> bool:
        return is_exact(self.reset_prob, *(p for _, p in self.steps))

    @property
    def is_moran(self) -> bool:
        return len(self.steps) == 1 and self.steps[0][0] == 1

    def step_dict(self) -> dict:
        return dict(self.steps)

    def probability(self, jump: int):
        for k, p in self.steps:
            if k == jump:
                return p
        return Fraction(0) if self.exact else 0.0

    def as_float(self) -> "StepModel":
        return StepModel(tuple((k, float(p)) for k, p in self.steps), float(self.reset_prob))

    def to_json(self) -> str:
        obj = {
            "steps": {str(k): format_probability(p) for k, p in self.steps},
            "q": format_probability(self.reset_prob),
        }
        return json.dumps(obj)


def validate_model(steps: Mapping[int, object], reset_prob) -> StepModel:
    """Check stochasticity and build a :class:`StepModel`.

    Exact inputs must satisfy ``q + sum(p_k) == 1`` exactly; float inputs may
    be off by at most ``1e-12`` and are renormalized.
    """
    items = [(int(k), p) for k, p in steps.items() if p != 0]
    if not items:
        raise EmptySupport("step set is empty")
    items.sort()
    exact = is_exact(reset_prob, *(p for _, p in items))
    if any(p < 0 for _, p in items):
        raise NonStochastic("negative step probability")
    if not (0 < reset_prob < 1):
        raise DegenerateReset(f"reset probability {reset_prob!r} outside (0,1)")
    mass = sum(p for _, p in items) + reset_prob
    if exact:
        if mass != 1:
            raise NonStochastic(f"probabilities sum to {mass}, expected 1")
    else:
        if abs(mass - 1.0) > FLOAT_MASS_TOL:
            raise NonStochastic(f"probabilities sum to {mass!r}, expected 1 within {FLOAT_MASS_TOL}")
        items = [(k, float(p) / mass) for k, p in items]
        reset_prob = float(reset_prob) / mass
    return StepModel(tuple(items), reset_prob)


def moran(p) -> StepModel:
    """Moran walk: jump +1 with probability p, reset with probability 1 - p."""
    one = Fraction(1) if is_exact(p) else 1.0
    return validate_model({1: p}, one - p)


def model_from_json(text: str) -> StepModel:
    """Parse the model literal ``{"steps": {"1": "1/2"}, "q": "1/2"}``."""
    obj = json.loads(text)
    steps = {int(k): parse_probability(str(v)) for k, v in obj["steps"].items()}
    q = parse_probability(str(obj["q"]))
    return validate_model(steps, q)


@dataclass(frozen=True)
class LaurentPoly:
    """Laurent polynomial: ``coeffs[i]`` is the coefficient of ``u**(offset+i)``."""

    offset: int
    coeffs: tuple

    @staticmethod
    def from_dict(d: Mapping[int, object]) -> "LaurentPoly":
        nz = {k: v for k, v in d.items() if v != 0}
        if not nz:
            return LaurentPoly(0, (0,))
        lo, hi = min(nz), max(nz)
        zero = Fraction(0) if is_exact(*nz.values()) else 0.0
        return LaurentPoly(lo, tuple(nz.get(k, zero) for k in range(lo, hi + 1)))

    @staticmethod
    def one(exact: bool = True) -> "LaurentPoly":
        return LaurentPoly(0, (Fraction(1),) if exact else (1.0,))

    @property
    def degree(self) -> int:
        return self.offset + len(self.coeffs) - 1

    def coefficient(self, k: int):
        i = k - self.offset
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return 0 * self.coeffs[0]

    def items(self):
        return [(self.offset + i, c) for i, c in enumerate(self.coeffs)]

    def normalize(self) -> "LaurentPoly":
        lo, hi = 0, len(self.coeffs)
        while hi > lo + 1 and self.coeffs[hi - 1] == 0:
            hi -= 1
        while lo < hi - 1 and self.coeffs[lo] == 0:
            lo += 1
        return LaurentPoly(self.offset + lo, self.coeffs[lo:hi])

    def __mul__(self, other: "LaurentPoly") -> "LaurentPoly":
        a, b = self.coeffs, other.coeffs
        out = [0 * (a[0] * b[0])] * (len(a) + len(b) - 1)
        for i, ai in enumerate(a):
            if ai == 0:
                continue
            for j, bj in enumerate(b):
                out[i + j] += ai * bj
        return LaurentPoly(self.offset + other.offset, tuple(out))

    def __add__(self, other: "LaurentPoly") -> "LaurentPoly":
        lo = min(self.offset, other.offset)
        hi = max(self.degree, other.degree)
        zero = 0 * self.coeffs[0]
        out = [zero] * (hi - lo + 1)
        for k, c in self.items():
            out[k - lo] += c
        for k, c in other.items():
            out[k - lo] += c
        return LaurentPoly(lo, tuple(out))

    def scale(self, factor) -> "LaurentPoly":
        return LaurentPoly(self.offset, tuple(c * factor for c in self.coeffs))

    def truncate_above(self, h: int) -> "LaurentPoly":
        """Drop all monomials of degree > h."""
        keep = h - self.offset + 1
        if keep <= 0:
            zero = 0 * self.coeffs[0]
            return LaurentPoly(0, (zero,))
        return LaurentPoly(self.offset, self.coeffs[:keep])

    def __call__(self, u):
        # Horner over the plain-polynomial part, then the offset power.
        acc = self.coeffs[-1]
        for c in reversed(self.coeffs[:-1]):
            acc = acc * u + c
        if self.offset:
            acc = acc * u ** self.offset
        return acc

    def derivative(self) -> "LaurentPoly":
        d = {k: c * k for k, c in self.items() if k != 0}
        if not d:
            return LaurentPoly(0, (0 * self.coeffs[0],))
        return LaurentPoly.from_dict(d)

    def mass(self):
        return sum(self.coeffs)


@dataclass(frozen=True)
class DistVector:
    """Probability mass function on integers, stored densely from ``offset``."""

    offset: int
    masses: tuple

    @staticmethod
    def from_dict(d: Mapping[int, object]) -> "DistVector":
        p = LaurentPoly.from_dict(d)
        return DistVector(p.offset, p.coeffs)

    def probability(self, k: int):
        i = k - self.offset
        if 0 <= i < len(self.masses):
            return self.masses[i]
        return 0 * self.masses[0]

    def items(self):
        return [(self.offset + i, m) for i, m in enumerate(self.masses)]

    def support(self):
        return [k for k, m in self.items() if m != 0]

    def total(self):
        return sum(self.masses)

    def mean(self):
        return sum(k * m for k, m in self.items())

    def variance(self):
        mu = self.mean()
        return sum(k * k * m for k, m in self.items()) - mu * mu

    def cdf(self, k: int):
        return sum(m for j, m in self.items() if j <= k)

    def check(self, tol: float = FLOAT_MASS_TOL) -> "DistVector":
        """Validate nonnegativity and unit mass (exactly in rational mode)."""
        exact = is_exact(*self.masses)
        if any(m < 0 for m in self.masses):
            raise NonStochastic("negative mass")
        total = self.total()
        if exact:
            if total != 1:
                raise NonStochastic(f"mass {total} != 1")
        elif abs(total - 1.0) > tol:
            raise NonStochastic(f"mass {total!r} != 1 within {tol}")
        return self


def step_polynomial(model: StepModel) -> LaurentPoly:
    """The Laurent polynomial P(u) encoding jumps; P(1) = 1 - q."""
    return LaurentPoly.from_dict(model.step_dict())


def drift_moments(model: StepModel):
    """Drift P'(1) and second factorial moment P''(1) of the step law.

    (The drift of the walk conditioned on no reset would be P'(1)/(1-q);
    only the unconditioned P'(1) is exposed here.)
    """
    delta = sum(k * p for k, p in model.steps)
    second = sum(k * (k - 1) * p for k, p in model.steps)
    return delta, second
