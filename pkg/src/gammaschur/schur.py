"""Stochastic-order verdicts between weight vectors of i.i.d. gamma sums.

For ``mu ≺ lam`` (or the weak order) the cdf ``P(w; alpha, beta, x)`` of
``sum_i w_i X_i`` satisfies ``P(mu) >= P(lam)`` above a concave threshold
and ``P(mu) <= P(lam)`` below a convex threshold.  Three families of
thresholds are implemented: the sum-based ones (ordinary and weak order,
plus the infinite-sequence limit), the classical max/min-weight ones for
``n >= 3``, and the chi-square ``2s`` bound.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

from . import dist
from .dist import WeightVector
from .errors import NotComparable, TailBoundMissing
from .majorization import RelationKind, is_majorized, is_weakly_majorized


class Relation(enum.Enum):
    MU_GE = "MuGE"          # P(mu) >= P(lambda)
    MU_LE = "MuLE"          # P(mu) <= P(lambda)
    EQUAL = "Equal"
    UNDECIDED = "Undecided"


class Rule(enum.Enum):
    THEOREM1 = "Theorem1"
    COROLLARY2 = "Corollary2"
    COROLLARY3 = "Corollary3"
    BOCK = "Bock"
    BAKIROV = "Bakirov"
    NUMERIC = "Numeric"
    NONE = "None"


@dataclass(frozen=True)
class OrderVerdict:
    relation: Relation
    decided_by: Rule
    concave_threshold: Optional[float] = None
    convex_threshold: Optional[float] = None
    numeric_gap: Optional[float] = None
    gap_error: Optional[float] = None

    def __post_init__(self):
        if self.relation is not Relation.UNDECIDED and self.decided_by is Rule.NONE:
            raise ValueError("a decided verdict must name its rule")

    def to_dict(self) -> dict:
        return {
            "relation": self.relation.value,
            "decided_by": self.decided_by.value,
            "concave_threshold": self.concave_threshold,
            "convex_threshold": self.convex_threshold,
            "numeric_gap": self.numeric_gap,
            "gap_error": self.gap_error,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "OrderVerdict":
        return cls(Relation(d["relation"]), Rule(d["decided_by"]),
                   d.get("concave_threshold"), d.get("convex_threshold"),
                   d.get("numeric_gap"), d.get("gap_error"))


def theorem1_thresholds(n: int, alpha: float, beta: float, s_lambda: float,
                        s_mu: float, weak: bool = False):
    """``(concave, convex)`` thresholds of the sum-based order results.

    ``P(mu) >= P(lam)`` for ``x > concave`` and ``P(mu) <= P(lam)`` for
    ``x < convex``; ``convex`` is None for ``n >= 3`` with ``alpha <= 1``.
    The weak order uses ``s_lambda`` for the concave side and ``s_mu`` for
    the convex side.
    """
    if n < 2:
        raise ValueError("thresholds need n >= 2")
    if not weak and not math.isclose(s_lambda, s_mu, rel_tol=1e-12, abs_tol=0.0):
        raise ValueError("the ordinary order needs equal sums")
    concave = (2 * alpha + 1) * s_lambda / (2 * beta)
    if n == 2:
        convex = alpha * s_mu / beta
    elif alpha > 1:
        convex = (alpha - 1) * s_mu / beta
    else:
        convex = None
    return concave, convex


def bock_thresholds(lam: WeightVector, alpha: float, beta: float, n: Optional[int] = None):
    """Max/min-weight thresholds for ``n >= 3`` and all-positive ``lam``."""
    n = len(lam) if n is None else n
    concave = (n * alpha + 1) * max(lam.entries) / beta
    convex = (n * alpha + 1) * min(lam.entries) / beta
    return concave, convex


def bakirov_threshold(s: float) -> float:
    """Concave threshold ``2s`` for weighted chi-square(1) sums."""
    return 2.0 * s


def _effective_dim(mu: WeightVector, lam: WeightVector) -> int:
    # zero padding leaves P unchanged, so the smallest dimension holding both
    # vectors gives the sharpest convex threshold
    return max(2, mu.nonzero_count, lam.nonzero_count)


def analytic_verdict(mu, lam, alpha: float, beta: float, x: float) -> OrderVerdict:
    """Decide ``P(mu)`` vs ``P(lam)`` at ``x`` from the analytic thresholds.

    Precedence: sum-based thresholds, then the chi-square ``2s`` rule
    (``alpha == beta == 1/2``), then the max/min-weight rule.  Returns an
    ``Undecided`` verdict when no rule fires; never falls back to numerics.
    """
    if x <= 0:
        raise ValueError("x must be positive")
    mu = mu if isinstance(mu, WeightVector) else WeightVector(mu)
    lam = lam if isinstance(lam, WeightVector) else WeightVector(lam)
    strict = is_majorized(mu, lam).kind
    if strict is RelationKind.EQUAL:
        return OrderVerdict(Relation.EQUAL, Rule.THEOREM1, numeric_gap=0.0)

    n = _effective_dim(mu, lam)
    if strict is RelationKind.STRICT:
        weak = False
        rule = Rule.THEOREM1
    elif is_weakly_majorized(mu, lam).kind is RelationKind.WEAK:
        weak = True
        rule = Rule.COROLLARY2
    else:
        raise NotComparable("mu is not majorized, even weakly, by lambda")

    s_mu = mu.sum
    s_lam = lam.sum if weak else mu.sum
    concave, convex = theorem1_thresholds(n, alpha, beta, s_lam, s_mu, weak=weak)
    if x > concave:
        return OrderVerdict(Relation.MU_GE, rule, concave, convex)
    if convex is not None and x < convex:
        return OrderVerdict(Relation.MU_LE, rule, concave, convex)
    if weak:
        return OrderVerdict(Relation.UNDECIDED, Rule.NONE, concave, convex)

    if alpha == 0.5 and beta == 0.5 and x > bakirov_threshold(s_mu):
        return OrderVerdict(Relation.MU_GE, Rule.BAKIROV, bakirov_threshold(s_mu), None)

    if n >= 3 and lam.nonzero_count == n:
        bock_concave, bock_convex = bock_thresholds(lam.padded(n), alpha, beta, n)
        if x > bock_concave:
            return OrderVerdict(Relation.MU_GE, Rule.BOCK, bock_concave, bock_convex)
        if x < bock_convex:
            return OrderVerdict(Relation.MU_LE, Rule.BOCK, bock_concave, bock_convex)
    return OrderVerdict(Relation.UNDECIDED, Rule.NONE, concave, convex)


@dataclass(frozen=True)
class ImprovementReport:
    concave_sharper: bool   # sum-based concave threshold below the max-weight one
    convex_sharper: bool    # sum-based convex threshold above the min-weight one
    bock_applicable: bool

    def to_dict(self) -> dict:
        return {"concave_sharper": self.concave_sharper,
                "convex_sharper": self.convex_sharper,
                "bock_applicable": self.bock_applicable}


def improvement_region(lam, alpha: float, n: int) -> ImprovementReport:
    """Where the sum-based thresholds beat the max/min-weight ones (``n >= 3``).

    ``concave_sharper``: ``max lam > (s/n)(alpha + 1/2)/(alpha + 1/n)``.
    ``convex_sharper``: ``alpha > 1`` and ``min lam < (s/n)(alpha - 1)/(alpha + 1/n)``.
    Both flags are reported even when the max/min rule does not apply
    (some ``lam_i == 0``), in which case the sum-based rule is the only one.
    """
    if n < 3:
        raise ValueError("improvement region is defined for n >= 3")
    lam = lam if isinstance(lam, WeightVector) else WeightVector(lam)
    lam = lam.padded(n)
    s = lam.sum
    concave_sharper = max(lam.entries) > (s / n) * (alpha + 0.5) / (alpha + 1.0 / n)
    convex_sharper = alpha > 1 and min(lam.entries) < (s / n) * (alpha - 1) / (alpha + 1.0 / n)
    bock_applicable = all(v > 0 for v in lam.entries)
    return ImprovementReport(concave_sharper, convex_sharper, bock_applicable)


def compare_numeric(mu, lam, alpha: float, beta: float, x: float,
                    eval_tolerance: float = dist.DEFAULT_EVAL_TOL) -> OrderVerdict:
    """Sign of ``P(mu) - P(lam)`` from certified cdf evaluations."""
    if x <= 0:
        raise ValueError("x must be positive")
    mu = mu if isinstance(mu, WeightVector) else WeightVector(mu)
    lam = lam if isinstance(lam, WeightVector) else WeightVector(lam)
    err = 2 * eval_tolerance
    if is_majorized(mu, lam).kind is RelationKind.EQUAL:
        return OrderVerdict(Relation.EQUAL, Rule.NUMERIC, numeric_gap=0.0, gap_error=err)
    p_mu = dist.cdf(dist.iid_convolution(mu, alpha, beta, eval_tolerance), x)
    p_lam = dist.cdf(dist.iid_convolution(lam, alpha, beta, eval_tolerance), x)
    gap = p_mu - p_lam
    if gap > err:
        relation = Relation.MU_GE
    elif gap < -err:
        relation = Relation.MU_LE
    else:
        relation = Relation.UNDECIDED
    return OrderVerdict(relation, Rule.NUMERIC, numeric_gap=gap, gap_error=err)


# ---------------------------------------------------------------------------
# infinite sequences
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SummableSequence:
    """Nonnegative non-increasing sequence ``term(1), term(2), ...``.

    ``tail(m)`` must bound ``sum_{i > m} term(i)`` from above and tend to 0.
    """

    term: Callable[[int], float]
    tail: Optional[Callable[[int], float]] = None
    name: str = field(default="", compare=False)


@dataclass(frozen=True)
class GeometricSequence:
    """``first * ratio**(i-1)`` for ``i >= 1`` with its exact tail."""

    first: float
    ratio: float

    def __post_init__(self):
        if self.first < 0 or not 0 <= self.ratio < 1:
            raise ValueError("need first >= 0 and 0 <= ratio < 1")

    def term(self, i: int) -> float:
        return self.first * self.ratio ** (i - 1)

    def tail(self, m: int) -> float:
        return self.first * self.ratio**m / (1 - self.ratio)


MAX_PREFIX = 10**6


def _prefix_length(seq, tail_tol: float) -> int:
    m = 1
    while seq.tail(m) > tail_tol:
        m *= 2
        if m > MAX_PREFIX:
            raise TailBoundMissing("declared tail bound does not reach tail_tol")
    return m


def infinite_verdict(mu_seq, lam_seq, alpha: float, beta: float, x: float,
                     tail_tol: float = 1e-12) -> OrderVerdict:
    """Order verdict for ``sum_{i>=1} w_i X_i`` with summable weight sequences.

    Each sequence is truncated where its declared tail drops below
    ``tail_tol``.  The weak order is checked on the common prefix; beyond it
    the dominance is certified only up to ``tail_tol``.  Sums enter the
    thresholds through their certified intervals: the concave rule uses the
    upper end for ``lam``, the convex rule (``alpha > 1``) the lower end for
    ``mu``.
    """
    for seq in (mu_seq, lam_seq):
        if getattr(seq, "tail", None) is None:
            raise TailBoundMissing("both sequences need a certified tail bound")
    if mu_seq == lam_seq:
        return OrderVerdict(Relation.EQUAL, Rule.COROLLARY3, numeric_gap=0.0)

    m = max(_prefix_length(mu_seq, tail_tol), _prefix_length(lam_seq, tail_tol))
    mu_prefix = [mu_seq.term(i) for i in range(1, m + 1)]
    lam_prefix = [lam_seq.term(i) for i in range(1, m + 1)]
    mu_tail, lam_tail = mu_seq.tail(m), lam_seq.tail(m)
    s_mu_lo = math.fsum(mu_prefix)
    s_lam_lo = math.fsum(lam_prefix)
    s_lam_hi = s_lam_lo + lam_tail

    rel = is_weakly_majorized(WeightVector(mu_prefix), WeightVector(lam_prefix))
    beyond = s_mu_lo + mu_tail <= s_lam_lo + tail_tol
    if rel.kind is RelationKind.INCOMPARABLE or not beyond:
        raise NotComparable("mu is not weakly majorized by lambda")

    concave = (2 * alpha + 1) * s_lam_hi / (2 * beta)
    convex = (alpha - 1) * s_mu_lo / beta if alpha > 1 else None
    if x > concave:
        return OrderVerdict(Relation.MU_GE, Rule.COROLLARY3, concave, convex)
    if convex is not None and x < convex:
        return OrderVerdict(Relation.MU_LE, Rule.COROLLARY3, concave, convex)
    return OrderVerdict(Relation.UNDECIDED, Rule.NONE, concave, convex)
