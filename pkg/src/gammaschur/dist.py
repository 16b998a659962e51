"""Distribution functions of weighted sums of independent gamma variables.

``Y = sum_i w_i X_i`` with ``X_i ~ Gamma(shape_i, rate_i)`` is the gamma
variable of shape ``rho = sum(shape_i)`` and scale ``theta = min_i w_i/rate_i``
with a random extra shape ``K``:  ``Y | K ~ Gamma(rho + K, scale=theta)``.
``K`` is a sum of independent negative binomials, one per term whose scale
exceeds ``theta``.  Its pmf supplies the mixing coefficients of the gamma
series for the pdf and cdf, and a Chernoff bound on ``Pr(K > L)`` certifies
the truncation at ``L`` terms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np
from scipy import optimize, signal, special, stats

from .errors import AllWeightsZero, NegativeWeight, NonpositiveShapeOrRate, SeriesDivergence

DEFAULT_EVAL_TOL = 1e-10
MAX_SERIES_TERMS = 10**6
SCALE_MERGE_RTOL = 1e-12
MODE_TOL_FACTOR = 1e-8

# array cells evaluated per chunk when broadcasting x against series terms
_CHUNK_CELLS = 2_000_000


@dataclass(frozen=True)
class GammaTerm:
    """One summand ``weight * Gamma(shape, rate)``."""

    weight: float
    shape: float
    rate: float

    def __post_init__(self):
        for name in ("weight", "shape", "rate"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise NonpositiveShapeOrRate(f"{name} must be finite, got {value}")
            object.__setattr__(self, name, value)
        if self.shape <= 0 or self.rate <= 0:
            raise NonpositiveShapeOrRate(
                f"shape and rate must be positive, got shape={self.shape}, rate={self.rate}")
        if self.weight < 0:
            raise NegativeWeight(f"weight must be nonnegative, got {self.weight}")

    @property
    def scale(self) -> float:
        return self.weight / self.rate


@dataclass(frozen=True, init=False)
class WeightVector:
    """Nonnegative weights, stored sorted non-increasing."""

    entries: tuple
    sum: float

    def __init__(self, values: Iterable[float]):
        vals = [float(v) for v in values]
        if not vals:
            raise ValueError("weight vector must be nonempty")
        if not all(math.isfinite(v) for v in vals):
            raise ValueError("weights must be finite")
        if min(vals) < 0:
            raise NegativeWeight(f"weights must be nonnegative, got {min(vals)}")
        vals.sort(reverse=True)
        object.__setattr__(self, "entries", tuple(vals))
        object.__setattr__(self, "sum", math.fsum(vals))

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __getitem__(self, i):
        return self.entries[i]

    @property
    def nonzero_count(self) -> int:
        return sum(1 for v in self.entries if v > 0)

    def padded(self, n: int) -> "WeightVector":
        if n <= len(self):
            return self
        return WeightVector(self.entries + (0.0,) * (n - len(self)))

    def scaled(self, c: float) -> "WeightVector":
        return WeightVector(c * v for v in self.entries)

    def to_dict(self) -> dict:
        return {"entries": list(self.entries), "sum": self.sum}

    @classmethod
    def from_dict(cls, d: dict) -> "WeightVector":
        return cls(d["entries"])


@dataclass(frozen=True)
class _Mixture:
    shape: float            # rho, shape of the k = 0 component
    scale: float            # theta, common scale of every component
    weights: np.ndarray     # Pr(K = k), k = 0..L
    tail: float             # certified upper bound on Pr(K > L)

    @property
    def n_terms(self) -> int:
        return self.weights.size


@dataclass(frozen=True)
class GammaConvolution:
    """Validated weighted gamma sum; build it with :func:`make_convolution`."""

    terms: tuple
    total_weight: float
    total_shape: float
    eval_tolerance: float = DEFAULT_EVAL_TOL

    def __post_init__(self):
        if not self.terms:
            raise AllWeightsZero("convolution has no positive-weight terms")
        if any(t.weight <= 0 for t in self.terms):
            raise ValueError("retained terms must have positive weight")
        if not self.eval_tolerance > 0:
            raise ValueError("eval_tolerance must be positive")

    @property
    def mean(self) -> float:
        return math.fsum(t.weight * t.shape / t.rate for t in self.terms)

    @property
    def variance(self) -> float:
        return math.fsum(t.weight**2 * t.shape / t.rate**2 for t in self.terms)

    @property
    def is_single_gamma(self) -> bool:
        return len(self.terms) == 1

    @cached_property
    def mixture(self) -> _Mixture:
        return _build_mixture(self)

    def with_tolerance(self, eval_tolerance: float) -> "GammaConvolution":
        return GammaConvolution(self.terms, self.total_weight, self.total_shape, eval_tolerance)

    def to_dict(self) -> dict:
        return {
            "terms": [[t.weight, t.shape, t.rate] for t in self.terms],
            "total_weight": self.total_weight,
            "total_shape": self.total_shape,
            "eval_tolerance": self.eval_tolerance,
        }


def make_convolution(terms, eval_tolerance: float = DEFAULT_EVAL_TOL,
                     total_weight: float | None = None) -> GammaConvolution:
    """Validate ``(weight, shape, rate)`` triples into a convolution.

    Zero-weight terms are dropped.  Terms whose scales ``weight/rate`` agree to
    a relative 1e-12 are merged by adding shapes, which is exact gamma
    additivity and keeps the series away from near-equal scales.
    """
    parsed = [t if isinstance(t, GammaTerm) else GammaTerm(*t) for t in terms]
    if total_weight is None:
        total_weight = math.fsum(t.weight for t in parsed)
    kept = sorted((t for t in parsed if t.weight > 0), key=lambda t: (-t.scale, -t.shape))
    if not kept:
        raise AllWeightsZero("at least one weight must be positive")

    merged: list[GammaTerm] = []
    for t in kept:
        if merged and abs(merged[-1].scale - t.scale) <= SCALE_MERGE_RTOL * merged[-1].scale:
            head = merged[-1]
            merged[-1] = GammaTerm(head.weight, head.shape + t.shape, head.rate)
        else:
            merged.append(t)
    total_shape = math.fsum(t.shape for t in merged)
    return GammaConvolution(tuple(merged), float(total_weight), total_shape, eval_tolerance)


def iid_convolution(weights, shape: float, rate: float,
                    eval_tolerance: float = DEFAULT_EVAL_TOL) -> GammaConvolution:
    """``sum_i weights[i] * X_i`` with ``X_i`` i.i.d. ``Gamma(shape, rate)``."""
    if not isinstance(weights, WeightVector):
        weights = WeightVector(weights)
    if weights.sum <= 0:
        raise AllWeightsZero("weight vector sums to zero")
    return make_convolution([(w, shape, rate) for w in weights.entries],
                            eval_tolerance=eval_tolerance, total_weight=weights.sum)


# ---------------------------------------------------------------------------
# mixture series
# ---------------------------------------------------------------------------

def _log_tail_bound(q: np.ndarray, a: np.ndarray, m: int) -> float:
    """Log of a Chernoff bound on ``Pr(K >= m)``, K = sum NB(a_i, 1 - q_i)."""
    log_p = np.log1p(-q)
    t_max = -math.log(float(q.max()))

    def objective(t):
        return float(np.sum(a * (log_p - np.log1p(-q * math.exp(t))))) - t * m

    res = optimize.minimize_scalar(objective, bounds=(0.0, t_max * (1 - 1e-9)),
                                   method="bounded", options={"xatol": 1e-9 * t_max})
    # any t in range gives a valid bound, so an inexact minimiser is still safe
    return min(0.0, float(res.fun))


def _truncation_target(tol: float, rho: float, theta: float, n_terms: int) -> float:
    # cdf remainder <= tail; pdf remainder <= tail / (theta * sqrt(2 pi (rho + L)))
    return 0.5 * tol * min(1.0, theta * math.sqrt(2 * math.pi * (rho + n_terms)))


def _convolve(u: np.ndarray, v: np.ndarray, n: int) -> np.ndarray:
    if min(u.size, v.size) > 64:
        out = signal.fftconvolve(u, v)[:n]
    else:
        out = np.convolve(u, v)[:n]
    return np.clip(out, 0.0, None)


def _build_mixture(conv: GammaConvolution) -> _Mixture:
    scales = np.array([t.scale for t in conv.terms])
    shapes = np.array([t.shape for t in conv.terms])
    theta = float(scales.min())
    rho = conv.total_shape
    active = scales > theta
    if not active.any():
        return _Mixture(rho, theta, np.ones(1), 0.0)

    p = theta / scales[active]
    q = (scales[active] - theta) / scales[active]
    a = shapes[active]
    tol = conv.eval_tolerance

    def certified(last_index: int) -> bool:
        target = _truncation_target(tol, rho, theta, last_index)
        with np.errstate(divide="ignore", invalid="ignore"):
            bound = _log_tail_bound(q, a, last_index + 1)
        return bound <= math.log(target)

    with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
        mean_k = float(np.sum(a * q / p))
        sd_k = math.sqrt(float(np.sum(a * q / p**2)))
        # extreme scale ratios overflow here and are caught by the cap below
        lo, hi = 0, max(16, math.ceil(min(mean_k + 10 * sd_k, MAX_SERIES_TERMS)))
    while not certified(hi):
        if hi >= MAX_SERIES_TERMS:
            raise SeriesDivergence(
                f"series needs more than {MAX_SERIES_TERMS} terms for tolerance {tol}; "
                f"scale ratio max/min = {scales.max() / theta:.3g}")
        lo, hi = hi, min(2 * hi, MAX_SERIES_TERMS)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if certified(mid):
            hi = mid
        else:
            lo = mid
    last = hi

    k = np.arange(last + 1)
    pmf = None
    for ai, pi in zip(a, p):
        comp = stats.nbinom.pmf(k, ai, pi)
        pmf = comp if pmf is None else _convolve(pmf, comp, last + 1)
    tail = math.exp(_log_tail_bound(q, a, last + 1))
    return _Mixture(rho, theta, pmf, tail)


def _as_array(x):
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValueError("x must be finite")
    return arr


def _mix(mix: _Mixture, z: np.ndarray, kernel) -> np.ndarray:
    """``sum_k Pr(K=k) * kernel(rho + k, z)`` over flat ``z``."""
    shapes = mix.shape + np.arange(mix.n_terms)
    out = np.empty(z.size)
    step = max(1, _CHUNK_CELLS // mix.n_terms)
    for start in range(0, z.size, step):
        zz = z[start:start + step, None]
        # row-wise sum rather than BLAS so a value does not depend on batching
        out[start:start + step] = np.sum(kernel(shapes[None, :], zz) * mix.weights, axis=1)
    return out


def _gamma_density(a, z):
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.exp(special.xlogy(a - 1, z) - z - special.gammaln(a))


def cdf(conv: GammaConvolution, x):
    """``Pr(Y < x)``; absolute error at most ``conv.eval_tolerance``.

    Accepts a scalar or an array of points.
    """
    arr = _as_array(x)
    flat = np.clip(arr.ravel(), 0.0, None)
    mix = conv.mixture
    z = flat / mix.scale
    if mix.n_terms == 1:
        out = special.gammainc(mix.shape, z)
    else:
        out = _mix(mix, z, special.gammainc)
    out = np.clip(out, 0.0, 1.0).reshape(arr.shape)
    return float(out) if out.ndim == 0 else out


def sf(conv: GammaConvolution, x):
    """``Pr(Y >= x)`` computed without cancellation in the upper tail."""
    arr = _as_array(x)
    flat = np.clip(arr.ravel(), 0.0, None)
    mix = conv.mixture
    z = flat / mix.scale
    if mix.n_terms == 1:
        out = special.gammaincc(mix.shape, z)
    else:
        out = _mix(mix, z, special.gammaincc)
    out = np.where(arr.ravel() <= 0, 1.0, np.clip(out, 0.0, 1.0)).reshape(arr.shape)
    return float(out) if out.ndim == 0 else out


def pdf(conv: GammaConvolution, x):
    """Density of Y; ``inf`` at 0 when the total shape is below one."""
    arr = _as_array(x)
    flat = arr.ravel()
    mix = conv.mixture
    z = np.clip(flat, 0.0, None) / mix.scale
    out = _mix(mix, z, _gamma_density) / mix.scale
    out = np.where(flat < 0, 0.0, out).reshape(arr.shape)
    return float(out) if out.ndim == 0 else out


def pdf_derivative(conv: GammaConvolution, x):
    """First derivative of the density for ``x > 0``, term by term."""
    arr = _as_array(x)
    if np.any(arr <= 0):
        raise ValueError("pdf_derivative needs x > 0")
    mix = conv.mixture
    z = arr.ravel() / mix.scale

    def kernel(a, zz):
        return _gamma_density(a, zz) * ((a - 1) / zz - 1.0)

    out = (_mix(mix, z, kernel) / mix.scale**2).reshape(arr.shape)
    return float(out) if out.ndim == 0 else out


def error_bound(conv: GammaConvolution) -> float:
    """Certified absolute error of :func:`cdf`, :func:`sf` and :func:`pdf`."""
    return conv.eval_tolerance


# ---------------------------------------------------------------------------
# mode
# ---------------------------------------------------------------------------

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def _golden_section_max(f, lo: float, hi: float, tol: float) -> tuple[float, float]:
    """Shrink ``[lo, hi]`` around the maximiser of a unimodal ``f``."""
    x1 = hi - _INV_PHI * (hi - lo)
    x2 = lo + _INV_PHI * (hi - lo)
    f1, f2 = f(x1), f(x2)
    while hi - lo > tol:
        if f1 < f2:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + _INV_PHI * (hi - lo)
            f2 = f(x2)
        else:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - _INV_PHI * (hi - lo)
            f1 = f(x1)
    return lo, hi


def default_mode_tol(conv: GammaConvolution) -> float:
    return MODE_TOL_FACTOR * conv.mean


def mode(conv: GammaConvolution, mode_tol: float | None = None) -> float:
    """Location of the unique maximum of the density on ``[0, inf)``.

    Gamma convolutions are unimodal, so a golden-section bracket followed by
    bisection on the sign of the density slope finds the global maximiser.
    Returns 0 when the density decreases from the origin.
    """
    tol = default_mode_tol(conv) if mode_tol is None else mode_tol
    if conv.is_single_gamma:
        t = conv.terms[0]
        return max(0.0, (t.shape - 1.0) * t.scale)
    if conv.total_shape < 1:
        return 0.0
    if conv.total_shape == 1 and pdf_derivative(conv, tol) <= 0:
        return 0.0

    hi = conv.mean + 12.0 * math.sqrt(conv.variance)
    lo, hi = _golden_section_max(lambda t: pdf(conv, t), 0.0, hi, max(tol, 1e-4 * hi))
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if pdf_derivative(conv, mid) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


# ---------------------------------------------------------------------------
# derivative identity
# ---------------------------------------------------------------------------

def fd_step(x: float) -> float:
    return max(1e-6, 1e-6 * abs(x))


def _central_difference(f, x: float) -> float:
    h = fd_step(x)
    return (f(x + h) - f(x - h)) / (2 * h)


def derivative_identity_residual(base: GammaConvolution, a: float, b: float,
                                 psi_rate: float, x: float) -> float:
    """Residual of the exponential-perturbation density identity at ``x``.

    With ``psi_1, psi_2 ~ Gamma(1, psi_rate)`` independent of ``X = base``::

        f_{X + a psi_1}(x) - f_{X + b psi_2}(x)
            = (b - a) / psi_rate * d/dx f_{X + a psi_1 + b psi_2}(x)

    The derivative is a central finite difference, so the residual is an
    independent check of the series density.
    """
    if x <= 0:
        raise ValueError("x must be positive")
    if a < 0 or b < 0:
        raise NegativeWeight("a and b must be nonnegative")
    tol = base.eval_tolerance
    terms = list(base.terms)
    with_a = make_convolution(terms + [(a, 1.0, psi_rate)], tol)
    with_b = make_convolution(terms + [(b, 1.0, psi_rate)], tol)
    with_ab = make_convolution(terms + [(a, 1.0, psi_rate), (b, 1.0, psi_rate)], tol)
    lhs = pdf(with_a, x) - pdf(with_b, x)
    if a == b:
        return lhs
    slope = _central_difference(lambda t: pdf(with_ab, t), x)
    return lhs - (b - a) / psi_rate * slope
