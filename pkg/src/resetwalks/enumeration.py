"""Exhaustive enumeration of walks with resets (exact ground truth).

This is the brute-force oracle: it visits every one of the ``(|S|+1)**n``
choice sequences and tallies exact integer weights, so its output is immune to
any clever algebra elsewhere in the package.  A compiled kernel is used when
it was built and the weights fit in 64 bits; otherwise the pure-Python
backend runs the identical traversal.
"""

from __future__ import annotations

import math
from fractions import Fraction

from . import _enumpy
from .errors import ResourceLimit
from .model import DistVector, StepModel
from .numeric import as_fraction

try:
    from . import _enumcore
    HAVE_COMPILED = True
except ImportError:  # pragma: no cover - build-dependent
    _enumcore = None
    HAVE_COMPILED = False

BRANCH_CAP = 10**8
_I64_SAFE = 2**62


def backend_name() -> str:
    return "compiled" if HAVE_COMPILED else "pure-python"


def _integer_weights(model: StepModel):
    probs = [as_fraction(p) for _, p in model.steps] + [as_fraction(model.reset_prob)]
    denom = math.lcm(*(p.denominator for p in probs))
    numers = [int(p * denom) for p in probs]
    return numers[:-1], numers[-1], denom


def joint_distributions(model: StepModel, n: int, branch_cap: int = BRANCH_CAP):
    """Exact altitude and height distributions for every time 0..n.

    Returns ``(alt, height)``, two lists of :class:`DistVector` indexed by
    time.  Raises :class:`ResourceLimit` when the branch count exceeds the
    cap (the caller should fall back to dynamic programming).
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    branches = (len(model.steps) + 1) ** n
    if branches > branch_cap:
        raise ResourceLimit(f"{branches} branches exceed cap {branch_cap}")
    jumps = [k for k, _ in model.steps]
    numers, reset_numer, denom = _integer_weights(model)

    if HAVE_COMPILED and denom**n < _I64_SAFE:
        alt_counts, h_counts = _enumcore.joint_counts(jumps, numers, reset_numer, n)
    else:
        alt_counts, h_counts = _enumpy.joint_counts(jumps, numers, reset_numer, n)

    alt, height = [], []
    scale = 1
    for t in range(n + 1):
        alt.append(DistVector.from_dict({k: Fraction(w, scale) for k, w in alt_counts[t].items()}))
        height.append(DistVector.from_dict({k: Fraction(w, scale) for k, w in h_counts[t].items()}))
        scale *= denom
    return alt, height


def altitude_distribution(model: StepModel, n: int, branch_cap: int = BRANCH_CAP) -> DistVector:
    return joint_distributions(model, n, branch_cap)[0][n]


def height_distribution(model: StepModel, n: int, branch_cap: int = BRANCH_CAP) -> DistVector:
    return joint_distributions(model, n, branch_cap)[1][n]
