"""Sample sizes for the Gaussian trace estimator of an SPSD matrix.

With eigenvalues ``lam`` the estimator ``(1/N) sum_j w_j' A w_j`` is
distributed as ``sum_i lam_i G_i`` with ``G_i ~ Gamma(N/2, N/2)``, so both
relative-error tails are gamma-convolution cdf values.
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass

from .. import dist
from ..dist import WeightVector
from ..errors import TraceMismatch, Unreachable
from ..majorization import RelationKind, is_majorized

log = logging.getLogger(__name__)

MAX_SAMPLES = 10**6


class Side(enum.Enum):
    LOWER = "Lower"     # Pr(estimate <= (1 - eps) tr)
    UPPER = "Upper"     # Pr(estimate >= (1 + eps) tr)


@dataclass(frozen=True)
class TracePlan:
    spectrum: WeightVector
    trace: float
    spectral_norm: float
    epsilon: float
    delta: float
    bound_samples: int
    exact_samples: int
    effective_rank: float

    def to_dict(self) -> dict:
        d = {k: getattr(self, k) for k in self.__dataclass_fields__}
        d["spectrum"] = list(self.spectrum.entries)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "TracePlan":
        fields = {k: d[k] for k in cls.__dataclass_fields__}
        fields["spectrum"] = WeightVector(d["spectrum"])
        return cls(**fields)


def _check(N: int, epsilon: float):
    if N < 1:
        raise ValueError("N must be at least 1")
    if not 0 < epsilon < 1:
        raise ValueError("epsilon must lie in (0, 1)")


def trace_tail(spectrum, N: int, epsilon: float, side: Side = Side.LOWER,
               eval_tolerance: float = dist.DEFAULT_EVAL_TOL) -> float:
    """Probability that the ``N``-probe estimate misses the trace by ``epsilon``."""
    _check(N, epsilon)
    spectrum = spectrum if isinstance(spectrum, WeightVector) else WeightVector(spectrum)
    side = Side(side)
    conv = dist.iid_convolution(spectrum, N / 2, N / 2, eval_tolerance)
    if side is Side.LOWER:
        return dist.cdf(conv, (1 - epsilon) * spectrum.sum)
    return dist.sf(conv, (1 + epsilon) * spectrum.sum)


def trace_bound_samples(trace: float, spectral_norm: float, epsilon: float, delta: float) -> int:
    """Smallest integer ``N > (norm/trace) * (8/eps^2) * ln(1/delta)``."""
    if trace <= 0 or epsilon <= 0 or not 0 < delta < 1:
        raise ValueError("need trace > 0, epsilon > 0 and 0 < delta < 1")
    bound = (spectral_norm / trace) * (8.0 / epsilon**2) * math.log(1.0 / delta)
    nearest = round(bound)
    # a bound that is an integer up to rounding still needs the next one
    if abs(bound - nearest) <= 1e-12 * max(1.0, bound):
        return int(nearest) + 1
    return math.ceil(bound)


def trace_exact_min_samples(spectrum, epsilon: float, delta: float,
                            max_samples: int = MAX_SAMPLES,
                            eval_tolerance: float = dist.DEFAULT_EVAL_TOL) -> TracePlan:
    """Smallest ``N`` for which both tails are at most ``delta``.

    Doubling then bisection, assuming the tails shrink with ``N``; the
    doubling sequence is checked for that and a warning is logged when it
    fails.
    """
    spectrum = spectrum if isinstance(spectrum, WeightVector) else WeightVector(spectrum)
    if spectrum.sum <= 0:
        raise ValueError("spectrum must have positive trace")
    if not 0 < epsilon < 1 or not 0 < delta < 1:
        raise ValueError("need 0 < epsilon < 1 and 0 < delta < 1")

    def tails(n):
        return (trace_tail(spectrum, n, epsilon, Side.LOWER, eval_tolerance),
                trace_tail(spectrum, n, epsilon, Side.UPPER, eval_tolerance))

    def ok(t):
        return max(t) <= delta

    seen = [tails(1)]
    lo, hi = 0, 1
    while not ok(seen[-1]):
        if hi >= max_samples:
            raise Unreachable(f"tails stay above {delta} up to N = {max_samples}")
        lo, hi = hi, min(2 * hi, max_samples)
        seen.append(tails(hi))
    for prev, cur in zip(seen, seen[1:]):
        if cur[0] > prev[0] + 2 * eval_tolerance or cur[1] > prev[1] + 2 * eval_tolerance:
            log.warning("trace tails increased along the doubling sequence; "
                        "the returned N is minimal only within the bisection bracket")
            break
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if ok(tails(mid)):
            hi = mid
        else:
            lo = mid

    trace, norm = spectrum.sum, spectrum.entries[0]
    return TracePlan(spectrum, trace, norm, float(epsilon), float(delta),
                     trace_bound_samples(trace, norm, epsilon, delta), hi, trace / norm)


class Ordering(enum.Enum):
    ORDERED = "Ordered"         # lower tail of spectrum2 <= lower tail of spectrum1
    EQUAL = "Equal"
    INCOMPARABLE = "Incomparable"


@dataclass(frozen=True)
class SkewnessReport:
    ordering: Ordering
    lower_tail_1: float
    lower_tail_2: float
    samples: int
    epsilon: float

    def to_dict(self) -> dict:
        return {"ordering": self.ordering.value, "lower_tail_1": self.lower_tail_1,
                "lower_tail_2": self.lower_tail_2, "samples": self.samples,
                "epsilon": self.epsilon}

    @classmethod
    def from_dict(cls, d: dict) -> "SkewnessReport":
        return cls(Ordering(d["ordering"]), d["lower_tail_1"], d["lower_tail_2"],
                   d["samples"], d["epsilon"])


def skewness_compare(spectrum1, spectrum2, N: int, epsilon: float,
                     eval_tolerance: float = dist.DEFAULT_EVAL_TOL) -> SkewnessReport:
    """Compare lower-tail miss probabilities of two equal-trace spectra.

    When ``spectrum2 ≺ spectrum1`` (the first is more skewed) and
    ``N > 2/epsilon``, the point ``(1 - eps) tr`` lies below the convex
    threshold for shape = rate = N/2, so the more skewed spectrum has the
    larger lower tail.  Both tails are returned in every case.
    """
    _check(N, epsilon)
    s1 = spectrum1 if isinstance(spectrum1, WeightVector) else WeightVector(spectrum1)
    s2 = spectrum2 if isinstance(spectrum2, WeightVector) else WeightVector(spectrum2)
    if not math.isclose(s1.sum, s2.sum, rel_tol=1e-10, abs_tol=0.0):
        raise TraceMismatch(f"traces differ: {s1.sum} vs {s2.sum}")
    t1 = trace_tail(s1, N, epsilon, Side.LOWER, eval_tolerance)
    t2 = trace_tail(s2, N, epsilon, Side.LOWER, eval_tolerance)
    kind = is_majorized(s2.scaled(s1.sum / s2.sum), s1).kind
    if kind is RelationKind.EQUAL:
        ordering = Ordering.EQUAL
    elif kind is RelationKind.STRICT and N > 2.0 / epsilon:
        ordering = Ordering.ORDERED
    else:
        ordering = Ordering.INCOMPARABLE
    return SkewnessReport(ordering, t1, t2, int(N), float(epsilon))
