"""Sign changes of ``D(x) = P(mu; x) - P(lam; x)`` for majorization-ordered weights.

Grid points where ``|D|`` is within the certified evaluation noise are
treated as inconclusive: they never create or count as a crossing.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import dist
from .dist import WeightVector
from .errors import NotStrictlyMajorized
from .majorization import RelationKind, is_majorized
from .schur import theorem1_thresholds

NOISE_FACTOR = 4.0
MIN_GRID = 16


@dataclass(frozen=True)
class CrossingReport:
    crossings: tuple            # ((x, bracket_width), ...), increasing in x
    scan_range: tuple           # (x_lo, x_hi)
    resolution: int
    min_gap_detected: float
    inconclusive: tuple = ()    # ((x_a, x_b), ...) runs of noise-level grid points

    @property
    def count(self) -> int:
        return len(self.crossings)

    def to_dict(self) -> dict:
        return {
            "crossings": [list(c) for c in self.crossings],
            "scan_range": list(self.scan_range),
            "resolution": self.resolution,
            "min_gap_detected": self.min_gap_detected,
            "inconclusive": [list(c) for c in self.inconclusive],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CrossingReport":
        return cls(tuple(tuple(c) for c in d["crossings"]), tuple(d["scan_range"]),
                   d["resolution"], d["min_gap_detected"],
                   tuple(tuple(c) for c in d.get("inconclusive", [])))


@dataclass(frozen=True)
class CrossingScan:
    """Grid values behind a report, for CSV export."""

    x: np.ndarray
    p_mu: np.ndarray
    p_lambda: np.ndarray

    @property
    def d(self) -> np.ndarray:
        return self.p_mu - self.p_lambda


def default_scan_range(mu, lam, alpha: float, beta: float) -> tuple[float, float]:
    """A range containing both order thresholds of the pair."""
    mu, lam = WeightVector(mu), WeightVector(lam)
    s = lam.sum
    n = max(2, mu.nonzero_count, lam.nonzero_count)
    concave, convex = theorem1_thresholds(n, alpha, beta, s, s)
    x_lo = 0.01 * s if convex is None else min(0.01 * s, 0.5 * convex)
    return x_lo, 2.0 * concave


def _evaluate(conv, xs: np.ndarray, threads: int) -> np.ndarray:
    if threads <= 1 or xs.size < 2 * threads:
        return dist.cdf(conv, xs)
    chunks = np.array_split(xs, threads)
    with ThreadPoolExecutor(threads) as pool:
        parts = list(pool.map(lambda c: dist.cdf(conv, c), chunks))
    return np.concatenate(parts)


def scan(mu, lam, alpha: float, beta: float, x_lo: float, x_hi: float, grid: int,
         eval_tolerance: float = dist.DEFAULT_EVAL_TOL, threads: int = 1) -> CrossingScan:
    """Both cdfs on a geometric grid over ``[x_lo, x_hi]``."""
    conv_mu = dist.iid_convolution(mu, alpha, beta, eval_tolerance)
    conv_lam = dist.iid_convolution(lam, alpha, beta, eval_tolerance)
    return _scan(conv_mu, conv_lam, x_lo, x_hi, grid, threads)


def _scan(conv_mu, conv_lam, x_lo, x_hi, grid, threads) -> CrossingScan:
    xs = np.geomspace(x_lo, x_hi, grid)
    return CrossingScan(xs, _evaluate(conv_mu, xs, threads), _evaluate(conv_lam, xs, threads))


def crossing_points(mu, lam, alpha: float, beta: float, x_lo: float | None = None,
                    x_hi: float | None = None, grid: int = 512,
                    refine_tol: float | None = None,
                    eval_tolerance: float = dist.DEFAULT_EVAL_TOL,
                    threads: int = 1, return_scan: bool = False):
    """Locate every certified sign change of ``P(mu) - P(lam)`` on ``[x_lo, x_hi]``.

    Needs ``mu ≺ lam`` with ``mu`` not a permutation of ``lam``.  Each sign
    change between two conclusive grid points (``|D| > 4 * eval_tolerance``)
    is refined by bisection on ``D`` to width ``refine_tol``.
    """
    mu = mu if isinstance(mu, WeightVector) else WeightVector(mu)
    lam = lam if isinstance(lam, WeightVector) else WeightVector(lam)
    kind = is_majorized(mu, lam).kind
    if kind is not RelationKind.STRICT:
        raise NotStrictlyMajorized(f"need mu ≺ lam strictly, got {kind.value}")
    default_lo, default_hi = default_scan_range(mu, lam, alpha, beta)
    x_lo = default_lo if x_lo is None else x_lo
    x_hi = default_hi if x_hi is None else x_hi
    if not 0 < x_lo < x_hi:
        raise ValueError("need 0 < x_lo < x_hi")
    if grid < MIN_GRID:
        raise ValueError(f"grid must be at least {MIN_GRID}")
    refine_tol = 1e-8 * lam.sum if refine_tol is None else refine_tol

    conv_mu = dist.iid_convolution(mu, alpha, beta, eval_tolerance)
    conv_lam = dist.iid_convolution(lam, alpha, beta, eval_tolerance)
    sc = _scan(conv_mu, conv_lam, x_lo, x_hi, grid, threads)
    d = sc.d
    noise = NOISE_FACTOR * eval_tolerance
    sign = np.where(d > noise, 1, np.where(d < -noise, -1, 0))

    def gap(x):
        return dist.cdf(conv_mu, x) - dist.cdf(conv_lam, x)

    crossings, segment_peaks = [], []
    inconclusive = []
    run_start = None
    last_idx, peak = None, 0.0
    for i, sg in enumerate(sign):
        if sg == 0:
            if run_start is None:
                run_start = i
            continue
        if run_start is not None:
            inconclusive.append((float(sc.x[run_start]), float(sc.x[i - 1])))
            run_start = None
        if last_idx is not None and sign[last_idx] != sg:
            a, b = float(sc.x[last_idx]), float(sc.x[i])
            sa = sign[last_idx]
            while b - a > refine_tol:
                m = 0.5 * (a + b)
                dm = gap(m)
                if dm == 0:
                    a = b = m
                    break
                if (dm > 0) == (sa > 0):
                    a = m
                else:
                    b = m
            crossings.append((0.5 * (a + b), b - a))
            segment_peaks.append(peak)
            peak = 0.0
        peak = max(peak, abs(float(d[i])))
        last_idx = i
    if run_start is not None:
        inconclusive.append((float(sc.x[run_start]), float(sc.x[-1])))
    segment_peaks.append(peak)
    min_gap = min(segment_peaks) if crossings else peak

    report = CrossingReport(tuple(crossings), (float(x_lo), float(x_hi)), grid,
                            float(min_gap), tuple(inconclusive))
    return (report, sc) if return_scan else report
