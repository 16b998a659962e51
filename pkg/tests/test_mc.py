import math

import numpy as np
import pytest
from scipy import stats

from gammaschur import dist, mc
from gammaschur.mc import McReport


def test_sample_mean_exponential():
    n = 10**5
    draws = mc.sample(dist.make_convolution([(1, 1, 1)]), n, seed=7)
    assert abs(draws.mean() - 1.0) < 4 / math.sqrt(n)


def test_sample_moments_two_terms():
    n = 10**5
    draws = mc.sample(dist.iid_convolution([0.7, 0.3], 1, 1), n, seed=11)
    # mean 1, variance 0.49 + 0.09; bands are 5 standard errors
    assert abs(draws.mean() - 1.0) < 5 * math.sqrt(0.58 / n)
    fourth = 9 * 0.7**4 + 9 * 0.3**4 + 6 * 0.49 * 0.09   # central fourth moment
    assert abs(draws.var() - 0.58) < 5 * math.sqrt((fourth - 0.58**2) / n)


def test_single_draw_reproducible():
    conv = dist.iid_convolution([0.7, 0.3], 1, 1)
    a, b = mc.sample(conv, 1, seed=3), mc.sample(conv, 1, seed=3)
    assert a.shape == (1,) and a[0] == b[0]


def test_sample_sorted_and_seed_dependent():
    conv = dist.iid_convolution([0.5, 0.3, 0.2], 1.5, 2.0)
    a = mc.sample(conv, 1000, seed=1)
    assert np.all(np.diff(a) >= 0)
    assert not np.array_equal(a, mc.sample(conv, 1000, seed=2))


def test_sample_independent_of_workers():
    conv = dist.iid_convolution([0.5, 0.3, 0.2], 0.7, 2.0)
    n = 3 * mc.CHUNK + 17
    np.testing.assert_array_equal(mc.sample(conv, n, 5, workers=1), mc.sample(conv, n, 5, workers=4))


def test_sample_rejects_empty():
    with pytest.raises(ValueError):
        mc.sample(dist.make_convolution([(1, 1, 1)]), 0, seed=1)


@pytest.mark.parametrize("shape", [0.3, 0.8, 1.0, 2.5, 9.0])
def test_sampler_ks(shape):
    n = 10**5
    draws = mc.sample(dist.make_convolution([(1.0, shape, 1.0)]), n, seed=123)
    ks = stats.kstest(draws, stats.gamma(shape).cdf).statistic
    assert ks < 1.628 / math.sqrt(n)       # 1% critical value


def test_dkw_band_value():
    assert mc.dkw_band(10**6, 0.01) == pytest.approx(math.sqrt(math.log(200) / 2e6))


def test_empirical_cdf_counts_strictly_below():
    xs = np.array([1.0, 2.0, 2.0, 3.0])
    np.testing.assert_array_equal(mc.empirical_cdf(xs, [2.0, 2.5]), [0.25, 0.75])


def test_validate_closed_form():
    conv = dist.iid_convolution([0.5, 0.5], 1, 1)
    rep = mc.validate_cdf(conv, 10**6, 2024, mc.default_probes(conv), band_alpha=0.01)
    assert rep.passed
    assert rep.max_abs_gap <= rep.points[0][3] + conv.eval_tolerance
    for x, emp, analytic, band in rep.points:
        assert analytic == pytest.approx(1 - math.exp(-2 * x) * (1 + 2 * x), abs=1e-14)


def test_validate_three_terms():
    conv = dist.iid_convolution([0.6, 0.3, 0.1], 1.7, 2.3)
    assert mc.validate_cdf(conv, 10**6, 99, mc.default_probes(conv)).passed


def test_validate_detects_offset():
    conv = dist.iid_convolution([0.6, 0.3, 0.1], 1.7, 2.3)
    rep = mc.validate_cdf(conv, 10**6, 99, mc.default_probes(conv),
                          cdf_fn=lambda x: dist.cdf(conv, x) + 0.05)
    assert not rep.passed
    assert rep.max_abs_gap > 0.04


def test_validate_rejects_nonpositive_probe():
    conv = dist.make_convolution([(1, 1, 1)])
    with pytest.raises(ValueError):
        mc.validate_cdf(conv, 100, 1, [0.0, 1.0])


def test_report_records_seed_and_sampler():
    conv = dist.make_convolution([(1, 2, 1)])
    rep = mc.validate_cdf(conv, 5000, 42, [0.5, 1.0, 2.0], band_alpha=0.05)
    assert rep.seed == 42 and rep.sampler == mc.SAMPLER and rep.band_alpha == 0.05
    assert McReport.from_dict(rep.to_dict()) == rep
    assert rep.passed == (rep.max_abs_gap <= mc.dkw_band(5000, 0.05) + conv.eval_tolerance)


def test_trace_tail_against_sampling():
    # lower trace tail for (3,2,1), N = 8, eps = 0.1 checked inside the DKW band
    conv = dist.iid_convolution([3, 2, 1], 4.0, 4.0)
    rep = mc.validate_cdf(conv, 10**6, 8, [0.9 * 6.0])
    assert rep.passed
