"""Monte Carlo cross-check of the series cdf with a DKW confidence band."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import dist

SAMPLER = "marsaglia-tsang (numpy standard_gamma), boost U**(1/a) for shape < 1"
CHUNK = 1 << 16


@dataclass(frozen=True)
class McReport:
    sample_count: int
    seed: int
    points: tuple           # ((x, empirical_cdf, analytic_cdf, dkw_band), ...)
    max_abs_gap: float
    passed: bool
    band_alpha: float
    sampler: str = SAMPLER

    def to_dict(self) -> dict:
        return {
            "sample_count": self.sample_count,
            "seed": self.seed,
            "points": [list(p) for p in self.points],
            "max_abs_gap": self.max_abs_gap,
            "pass": self.passed,
            "band_alpha": self.band_alpha,
            "sampler": self.sampler,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "McReport":
        return cls(d["sample_count"], d["seed"], tuple(tuple(p) for p in d["points"]),
                   d["max_abs_gap"], d["pass"], d["band_alpha"], d.get("sampler", SAMPLER))


def _standard_gamma(rng: np.random.Generator, shape: float, size: int) -> np.ndarray:
    # numpy's standard_gamma is Marsaglia-Tsang for shape > 1; below one we
    # boost: Gamma(a) = Gamma(a + 1) * U**(1/a)
    if shape < 1:
        return rng.standard_gamma(shape + 1.0, size) * rng.random(size) ** (1.0 / shape)
    return rng.standard_gamma(shape, size)


def _chunk(conv, seed: int, index: int, size: int) -> np.ndarray:
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))
    out = np.zeros(size)
    for t in conv.terms:
        out += t.scale * _standard_gamma(rng, t.shape, size)
    return out


def sample(conv: dist.GammaConvolution, n_samples: int, seed: int, workers: int = 1) -> np.ndarray:
    """``n_samples`` sorted draws of the weighted gamma sum.

    The stream is cut into fixed-size chunks, each with its own seed
    substream, so the result depends only on ``(seed, n_samples)`` and not
    on ``workers``.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be at least 1")
    sizes = [CHUNK] * (n_samples // CHUNK)
    if n_samples % CHUNK:
        sizes.append(n_samples % CHUNK)
    if workers > 1 and len(sizes) > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(lambda i: _chunk(conv, seed, i, sizes[i]), range(len(sizes))))
    else:
        parts = [_chunk(conv, seed, i, size) for i, size in enumerate(sizes)]
    return np.sort(np.concatenate(parts))


def dkw_band(n_samples: int, band_alpha: float) -> float:
    """Half-width of the uniform DKW band at confidence ``1 - band_alpha``."""
    return math.sqrt(math.log(2.0 / band_alpha) / (2.0 * n_samples))


def empirical_cdf(sorted_samples: np.ndarray, x) -> np.ndarray:
    """Fraction of samples strictly below ``x``."""
    return np.searchsorted(sorted_samples, x, side="left") / sorted_samples.size


def validate_cdf(conv: dist.GammaConvolution, n_samples: int, seed: int, probe_points,
                 band_alpha: float = 0.01, workers: int = 1, cdf_fn=None) -> McReport:
    """Compare the series cdf with the empirical cdf at ``probe_points``.

    Passes when the largest gap is inside the DKW band plus the certified
    evaluation error.  ``cdf_fn`` replaces the analytic cdf (fault injection).
    """
    xs = np.asarray(probe_points, dtype=float)
    if np.any(xs <= 0):
        raise ValueError("probe points must be positive")
    draws = sample(conv, n_samples, seed, workers)
    emp = empirical_cdf(draws, xs)
    analytic = np.asarray(dist.cdf(conv, xs) if cdf_fn is None else cdf_fn(xs), dtype=float)
    band = dkw_band(n_samples, band_alpha)
    gap = float(np.max(np.abs(emp - analytic)))
    points = tuple((float(x), float(e), float(a), band) for x, e, a in zip(xs, emp, analytic))
    return McReport(n_samples, int(seed), points, gap,
                    gap <= band + conv.eval_tolerance, band_alpha)


def default_probes(conv: dist.GammaConvolution, count: int = 25) -> np.ndarray:
    """Probe points spread over the bulk: mean +- 4 standard deviations."""
    mean, sd = conv.mean, math.sqrt(conv.variance)
    lo = max(mean - 4 * sd, 1e-3 * mean)
    return np.linspace(lo, mean + 4 * sd, count)
