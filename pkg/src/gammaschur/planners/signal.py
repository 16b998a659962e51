"""Type-I sample sizing for the averaged |Laplace| signal-detection statistic.

Under the no-signal hypothesis each ``|D(t_i)| / sigma_i`` is
``Gamma(1, sqrt(2))``, so the averaged statistic ``Q(N)`` is the i.i.d.
gamma sum with equal weights ``1/N``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy import special

from .. import dist
from ..errors import Unreachable

NOISE_RATE = math.sqrt(2.0)
MONOTONE_THRESHOLD = 3.0 / (2.0 * math.sqrt(2.0))
MAX_SAMPLES = 10**6


@dataclass(frozen=True)
class SignalPlan:
    threshold_x: float
    delta: float
    min_samples: int
    type1_at_min: float
    monotone_region: bool

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "SignalPlan":
        return cls(**{k: d[k] for k in cls.__dataclass_fields__})


def signal_type1_prob(N: int, x: float) -> float:
    """``Pr(Q(N) >= x)`` when no signal is present."""
    if N < 1 or x <= 0:
        raise ValueError("need N >= 1 and x > 0")
    # N equal weights 1/N collapse to one gamma term of shape N
    conv = dist.make_convolution([(1.0 / N, float(N), NOISE_RATE)])
    return dist.sf(conv, x)


def _type1_many(ns: np.ndarray, x: float) -> np.ndarray:
    return special.gammaincc(ns, ns * NOISE_RATE * x)


def signal_min_samples(x: float, delta: float, max_samples: int = MAX_SAMPLES) -> SignalPlan:
    """Smallest ``N`` with ``Pr(Q(N) >= x) <= delta``.

    Doubling then bisection.  Above ``3/(2 sqrt 2)`` the tail is
    non-increasing in ``N`` so the bisection result is minimal; below it
    every smaller ``N`` is checked explicitly.
    """
    if not 0 < delta < 1 or x <= 0:
        raise ValueError("need 0 < delta < 1 and x > 0")

    def ok(n):
        return signal_type1_prob(n, x) <= delta

    if ok(1):
        n_min = 1
    else:
        lo, hi = 1, 2
        while not ok(hi):
            if hi >= max_samples:
                raise Unreachable(
                    f"Pr(Q(N) >= {x}) stays above {delta} up to N = {max_samples}")
            lo, hi = hi, min(2 * hi, max_samples)
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if ok(mid):
                hi = mid
            else:
                lo = mid
        n_min = hi

    monotone = x > MONOTONE_THRESHOLD
    if not monotone and n_min > 1:
        below = np.nonzero(_type1_many(np.arange(1, n_min, dtype=float), x) <= delta)[0]
        if below.size:
            n_min = int(below[0]) + 1
    return SignalPlan(float(x), float(delta), n_min, signal_type1_prob(n_min, x), monotone)
