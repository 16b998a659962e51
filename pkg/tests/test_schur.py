import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from gammaschur import dist
from gammaschur.dist import WeightVector
from gammaschur.errors import NotComparable, TailBoundMissing
from gammaschur.schur import (
    GeometricSequence,
    OrderVerdict,
    Relation,
    Rule,
    SummableSequence,
    analytic_verdict,
    bakirov_threshold,
    bock_thresholds,
    compare_numeric,
    improvement_region,
    infinite_verdict,
    theorem1_thresholds,
)
from gammaschur.verify import random_strict_pair


# -- thresholds -------------------------------------------------------------------

@pytest.mark.parametrize("n, a, b, expected", [
    (2, 2.0, 1.0, (2.5, 2.0)),
    (4, 2.0, 1.0, (2.5, 1.0)),
    (3, 0.5, 0.5, (2.0, None)),
])
def test_threshold_examples(n, a, b, expected):
    assert theorem1_thresholds(n, a, b, 1.0, 1.0) == expected


def test_weak_thresholds_use_each_sum():
    concave, convex = theorem1_thresholds(3, 2.0, 1.0, 1.0, 0.7, weak=True)
    assert concave == pytest.approx(2.5)
    assert convex == pytest.approx(0.7)


def test_strict_thresholds_need_equal_sums():
    with pytest.raises(ValueError):
        theorem1_thresholds(3, 2.0, 1.0, 1.0, 0.7)


def test_chi_square_threshold():
    assert bakirov_threshold(1.7) == 3.4
    assert theorem1_thresholds(5, 0.5, 0.5, 1.7, 1.7)[0] == 3.4


@given(st.floats(1e-3, 1e3))
def test_chi_square_coincidence(s):
    assert theorem1_thresholds(3, 0.5, 0.5, s, s)[0] == 2 * s


def test_bock_thresholds():
    lam = WeightVector([0.5, 0.3, 0.2])
    assert bock_thresholds(lam, 1.0, 1.0) == pytest.approx((2.0, 0.8))


# -- analytic verdicts ----------------------------------------------------------

def test_verdict_concave_side():
    v = analytic_verdict((0.5, 0.5), (1, 0), 2, 1, 3)
    assert (v.relation, v.decided_by) == (Relation.MU_GE, Rule.THEOREM1)
    assert (v.concave_threshold, v.convex_threshold) == (2.5, 2.0)


def test_verdict_convex_side_four_vectors():
    v = analytic_verdict((2 / 3, 1 / 3, 0, 0), (1, 0, 0, 0), 2, 1, 0.9)
    assert (v.relation, v.decided_by) == (Relation.MU_LE, Rule.THEOREM1)


def test_verdict_chi_square_case():
    v = analytic_verdict((0.5, 0.5), (0.8, 0.2), 0.5, 0.5, 2.5)
    assert (v.relation, v.decided_by) == (Relation.MU_GE, Rule.THEOREM1)
    assert v.concave_threshold == 2.0


def test_verdict_between_thresholds_is_undecided():
    v = analytic_verdict((0.5, 0.5), (1, 0), 2, 1, 2.2)
    assert v.relation is Relation.UNDECIDED and v.decided_by is Rule.NONE


def test_verdict_equal():
    v = analytic_verdict((0.6, 0.4), (0.4, 0.6), 2, 1, 1.0)
    assert v.relation is Relation.EQUAL


def test_verdict_weak_order():
    v = analytic_verdict((0.4, 0.3), (1, 0), 2, 1, 3.0)
    assert (v.relation, v.decided_by) == (Relation.MU_GE, Rule.COROLLARY2)
    v = analytic_verdict((0.4, 0.3), (1, 0), 2, 1, 0.5)
    assert (v.relation, v.decided_by) == (Relation.MU_LE, Rule.COROLLARY2)


def test_verdict_incomparable():
    with pytest.raises(NotComparable):
        analytic_verdict((1, 0), (0.5, 0.5), 2, 1, 1.0)


def test_verdict_max_weight_rule_fires_between_thresholds():
    mu, lam = (1 / 3, 1 / 3, 1 / 3), (0.36, 0.33, 0.31)
    v = analytic_verdict(mu, lam, 1.0, 1.0, 1.47)     # sum rule needs x > 1.5
    assert (v.relation, v.decided_by) == (Relation.MU_GE, Rule.BOCK)
    assert v.concave_threshold == pytest.approx(1.44)
    assert compare_numeric(mu, lam, 1.0, 1.0, 1.47).relation is Relation.MU_GE


def test_verdict_min_weight_rule_covers_small_shape():
    # n >= 3 with alpha <= 1 has no sum-based convex threshold
    mu, lam = (1 / 3, 1 / 3, 1 / 3), (0.36, 0.33, 0.31)
    v = analytic_verdict(mu, lam, 1.0, 1.0, 1.0)
    assert (v.relation, v.decided_by) == (Relation.MU_LE, Rule.BOCK)
    assert compare_numeric(mu, lam, 1.0, 1.0, 1.0).relation is Relation.MU_LE


def test_verdict_zero_weight_blocks_max_weight_rule():
    v = analytic_verdict((0.4, 0.3, 0.3), (0.5, 0.5, 0.0), 1.0, 1.0, 1.2)
    assert v.relation is Relation.UNDECIDED


def test_verdict_requires_positive_x():
    with pytest.raises(ValueError):
        analytic_verdict((0.5, 0.5), (1, 0), 2, 1, 0.0)


def test_verdict_round_trip():
    v = analytic_verdict((0.5, 0.5), (1, 0), 2, 1, 3)
    assert OrderVerdict.from_dict(v.to_dict()) == v


def test_decided_verdict_needs_rule():
    with pytest.raises(ValueError):
        OrderVerdict(Relation.MU_GE, Rule.NONE)


@given(st.integers(0, 2**32 - 1), st.integers(2, 6), st.floats(0.5, 5), st.floats(0.05, 3))
def test_analytic_and_numeric_never_disagree(seed, n, alpha, xr):
    mu, lam = random_strict_pair(np.random.default_rng(seed), n)
    x = xr * alpha
    a = analytic_verdict(mu, lam, alpha, 1.0, x)
    num = compare_numeric(mu, lam, alpha, 1.0, x)
    opposite = {Relation.MU_GE: Relation.MU_LE, Relation.MU_LE: Relation.MU_GE}
    if a.relation in opposite:
        assert num.relation is not opposite[a.relation]


@given(st.integers(0, 2**32 - 1), st.integers(3, 7), st.floats(0.5, 5))
def test_threshold_ordering(seed, n, alpha):
    mu, lam = random_strict_pair(np.random.default_rng(seed), n)
    concave, convex = theorem1_thresholds(n, alpha, 1.0, lam.sum, mu.sum)
    assert convex is None or convex <= concave


# -- improvement region ---------------------------------------------------------

def test_improvement_examples():
    assert improvement_region((0.8, 0.1, 0.1), 1.0, 3).concave_sharper
    assert not improvement_region((1 / 3, 1 / 3, 1 / 3), 1.0, 3).concave_sharper
    assert improvement_region((0.5, 0.4, 0.1), 2.0, 3).convex_sharper


def test_improvement_flags_zero_entries():
    rep = improvement_region((0.7, 0.3), 2.0, 3)
    assert not rep.bock_applicable
    assert rep.convex_sharper


def test_improvement_needs_three():
    with pytest.raises(ValueError):
        improvement_region((0.5, 0.5), 1.0, 2)


@given(st.lists(st.floats(0.01, 1.0), min_size=3, max_size=8), st.floats(0.5, 5))
def test_improvement_matches_threshold_comparison(w, alpha):
    lam = WeightVector(w)
    n = len(lam)
    rep = improvement_region(lam, alpha, n)
    concave, convex = theorem1_thresholds(n, alpha, 1.0, lam.sum, lam.sum)
    bock_concave, bock_convex = bock_thresholds(lam, alpha, 1.0)
    margin = 1e-9 * bock_concave
    if abs(concave - bock_concave) > margin:
        assert rep.concave_sharper == (concave < bock_concave)
    if alpha > 1 and abs(convex - bock_convex) > margin:
        assert rep.convex_sharper == (convex > bock_convex)


# -- numeric comparison -----------------------------------------------------------

def test_numeric_equal():
    v = compare_numeric((0.5, 0.5), (0.5, 0.5), 2, 1, 2.0)
    assert v.relation is Relation.EQUAL and v.numeric_gap == 0.0


def test_numeric_between_thresholds():
    v = compare_numeric((0.5, 0.5), (1, 0), 2, 1, 2.2)
    expected = dist.cdf(dist.iid_convolution([0.5, 0.5], 2, 1), 2.2) - dist.cdf(
        dist.iid_convolution([1.0], 2, 1), 2.2)
    assert v.relation is Relation.MU_LE and v.decided_by is Rule.NUMERIC
    assert v.numeric_gap == pytest.approx(expected, abs=1e-15)
    assert v.gap_error == 2e-10


def test_numeric_consistent_with_analytic():
    assert compare_numeric((0.5, 0.5), (1, 0), 2, 1, 3).relation is Relation.MU_GE


# -- infinite sequences -----------------------------------------------------------

def test_infinite_concave():
    lam = GeometricSequence(0.5, 0.5)      # 2^-i, sum 1
    mu = GeometricSequence(0.3, 0.7)       # sum 1, flatter
    v = infinite_verdict(mu, lam, 2.0, 1.0, 3.0)
    assert (v.relation, v.decided_by) == (Relation.MU_GE, Rule.COROLLARY3)
    assert v.concave_threshold == pytest.approx(2.5, abs=1e-11)


def test_infinite_convex():
    v = infinite_verdict(GeometricSequence(0.3, 0.7), GeometricSequence(0.5, 0.5), 3.0, 1.0, 1.0)
    assert v.relation is Relation.MU_LE


def test_infinite_identical():
    seq = GeometricSequence(0.5, 0.5)
    assert infinite_verdict(seq, seq, 2.0, 1.0, 1.0).relation is Relation.EQUAL


def test_infinite_small_shape_has_no_convex_rule():
    v = infinite_verdict(GeometricSequence(0.3, 0.7), GeometricSequence(0.5, 0.5), 1.0, 1.0, 0.05)
    assert v.relation is Relation.UNDECIDED and v.convex_threshold is None


def test_infinite_missing_tail():
    seq = SummableSequence(term=lambda i: 2.0**-i)
    with pytest.raises(TailBoundMissing):
        infinite_verdict(seq, GeometricSequence(0.5, 0.5), 2.0, 1.0, 3.0)


def test_infinite_not_dominated():
    with pytest.raises(NotComparable):
        infinite_verdict(GeometricSequence(0.5, 0.5), GeometricSequence(0.3, 0.7), 2.0, 1.0, 3.0)


def test_infinite_threshold_uses_upper_sum():
    lam = SummableSequence(term=lambda i: 2.0**-i, tail=lambda m: 2.0**-m)
    mu = GeometricSequence(0.25, 0.75)
    v = infinite_verdict(mu, lam, 2.0, 1.0, 3.0, tail_tol=1e-6)
    assert v.concave_threshold >= 2.5 * (1 - 2**-20)
    assert math.isfinite(v.convex_threshold)
