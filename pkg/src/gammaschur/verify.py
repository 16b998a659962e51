"""Numerical property suites behind ``gamma-schur verify``.

Each suite returns a list of :class:`Check` records; a suite passes when
every check does.  Random configurations come from a seeded generator so
runs are reproducible.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from . import dist, mc
from .crossings import crossing_points, default_scan_range
from .dist import WeightVector
from .majorization import RelationKind, is_majorized
from .planners import signal, trace
from .schur import theorem1_thresholds

SUITES = ("appendix", "theorem1", "bakirov", "crossings", "mc", "planners")

# the four-vector majorization chain used by the chain checks, most skewed first
CHAIN = (
    (1.0, 0.0, 0.0, 0.0),
    (2 / 3, 1 / 3, 0.0, 0.0),
    (3 / 6, 2 / 6, 1 / 6, 0.0),
    (4 / 10, 3 / 10, 2 / 10, 1 / 10),
)


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str

    def __post_init__(self):
        object.__setattr__(self, "passed", bool(self.passed))

    def to_dict(self) -> dict:
        return asdict(self)


# ---------------------------------------------------------------------------
# random inputs
# ---------------------------------------------------------------------------

def random_weights(rng: np.random.Generator, n: int, floor: float = 0.02) -> np.ndarray:
    """Positive weights summing to one, none below ``floor`` times the largest."""
    w = rng.uniform(floor, 1.0, n)
    return w / w.sum()


def random_strict_pair(rng: np.random.Generator, n: int) -> tuple[WeightVector, WeightVector]:
    """``(mu, lam)`` with ``mu ≺ lam`` strictly and ``mu`` not a permutation of ``lam``.

    ``mu = lam @ D`` for a random doubly stochastic ``D`` (a convex mix of
    permutation matrices), which always lands below ``lam``.
    """
    while True:
        lam = random_weights(rng, n)
        k = int(rng.integers(1, 4))
        coef = rng.dirichlet(np.ones(k + 1))
        mu = coef[0] * lam
        for c in coef[1:]:
            mu = mu + c * lam[rng.permutation(n)]
        mu_v, lam_v = WeightVector(mu), WeightVector(lam)
        if is_majorized(mu_v, lam_v).kind is RelationKind.STRICT:
            return mu_v, lam_v


def _fmt(v: float) -> str:
    return f"{v:.3g}"


# ---------------------------------------------------------------------------
# suites
# ---------------------------------------------------------------------------

def suite_appendix(seed: int = 0, cases: int = 20) -> list[Check]:
    rng = np.random.default_rng(seed)
    out = []

    # density vanishes at the origin once the total shape reaches 2
    worst = 0.0
    for _ in range(cases):
        n = int(rng.integers(1, 5))
        conv = dist.iid_convolution(random_weights(rng, n), rng.uniform(2.0 / n, 4.0),
                                    rng.uniform(0.5, 3.0))
        worst = max(worst, float(dist.pdf(conv, 1e-8 * conv.mean)))
    out.append(Check("density_at_origin", worst < 1e-4, f"max pdf near 0 = {_fmt(worst)}"))

    # mode of Y + t*psi strictly increasing in t
    bad = 0
    grid = np.round(np.arange(1, 11) * 0.1, 10)
    for _ in range(cases):
        alpha = rng.uniform(0.6, 4.0)
        n = int(rng.integers(2, 5))
        base = [(w, alpha, alpha) for w in random_weights(rng, n)]
        modes = []
        for t in grid:
            conv = dist.make_convolution(base + [(float(t), 1.0, alpha)])
            modes.append(dist.mode(conv))
        tol = dist.MODE_TOL_FACTOR * max(1.0, max(modes))
        if not all(b - a > 2 * tol for a, b in zip(modes, modes[1:])):
            bad += 1
    out.append(Check("mode_increasing_in_perturbation", bad == 0,
                     f"{bad}/{cases} bases not strictly increasing"))

    # two-point mixtures: mode in [1, (2a+1)/(2a)], extremes at t in {0, 1/2, 1}
    worst = 0.0
    for alpha in (0.5, 1.0, 2.0, 5.0):
        top = (2 * alpha + 1) / (2 * alpha)
        for t in np.linspace(0.0, 1.0, 11):
            terms = [(t, 1 + alpha, alpha), (1 - t, 1 + alpha, alpha)]
            m = dist.mode(dist.make_convolution(terms))
            worst = max(worst, 1.0 - m, m - top)
            if t in (0.0, 1.0):
                worst = max(worst, abs(m - 1.0))
            if t == 0.5:
                worst = max(worst, abs(m - top))
    out.append(Check("two_point_mode_bounds", worst <= 1e-6,
                     f"largest violation {_fmt(worst)}"))

    # extremal modes after adding the two largest / two smallest weights
    bad = 0
    for _ in range(cases):
        alpha = rng.uniform(0.6, 4.0)
        n = int(rng.integers(3, 6))
        nu = np.sort(random_weights(rng, n))[::-1]
        base = [(w, alpha, alpha) for w in nu]
        hi = dist.mode(dist.make_convolution(base + [(nu[0], 1.0, alpha), (nu[1], 1.0, alpha)]))
        if hi > (2 * alpha + 1) / (2 * alpha) + 1e-8:
            bad += 1
        if alpha > 1:
            lo = dist.mode(dist.make_convolution(base + [(nu[-2], 1.0, alpha),
                                                         (nu[-1], 1.0, alpha)]))
            if lo < (alpha - 1) / alpha - 1e-8:
                bad += 1
    out.append(Check("extremal_mode_bounds", bad == 0, f"{bad} violations"))

    # exponential-perturbation density identity
    worst = 0.0
    for _ in range(cases):
        n = int(rng.integers(1, 4))
        base = dist.iid_convolution(random_weights(rng, n), rng.uniform(0.8, 4.0),
                                    rng.uniform(0.5, 3.0))
        a, b = rng.uniform(0.0, 1.0, 2)
        x = rng.uniform(0.3, 2.0) * (base.mean + a + b)
        r = dist.derivative_identity_residual(base, a, b, rng.uniform(0.5, 3.0), x)
        worst = max(worst, abs(r))
    out.append(Check("derivative_identity", worst <= 1e-6, f"max |residual| {_fmt(worst)}"))

    # one local maximum of the density on a fine grid
    bad = 0
    for _ in range(cases):
        n = int(rng.integers(1, 6))
        conv = dist.iid_convolution(random_weights(rng, n), rng.uniform(0.5, 4.0), 1.0)
        if count_local_maxima(conv) != 1:
            bad += 1
    out.append(Check("unimodality", bad == 0, f"{bad}/{cases} densities not unimodal"))
    return out


def count_local_maxima(conv: dist.GammaConvolution, points: int = 400) -> int:
    """Local maxima of the pdf on a grid, ignoring steps within twice the error bound."""
    sd = math.sqrt(conv.variance)
    xs = np.linspace(conv.mean * 1e-3, conv.mean + 10 * sd, points)
    f = dist.pdf(conv, xs)
    noise = 2 * conv.eval_tolerance
    # collapse the sequence into significant up/down moves
    moves, ref = [], f[0]
    for v in f[1:]:
        if v > ref + noise:
            if not moves or moves[-1] != 1:
                moves.append(1)
            ref = v
        elif v < ref - noise:
            if not moves or moves[-1] != -1:
                moves.append(-1)
            ref = v
    peaks = sum(1 for a, b in zip(moves, moves[1:]) if a == 1 and b == -1)
    if moves and moves[0] == -1:
        peaks += 1  # decreasing from the left edge: boundary maximum
    return peaks


def threshold_cases(seed: int, cases: int, convex: bool):
    """Random strict pairs and the evaluation point just past a threshold."""
    rng = np.random.default_rng(seed)
    for _ in range(cases):
        n = int(rng.integers(2, 9))
        alpha = rng.uniform(1.0, 5.0) if convex else rng.uniform(0.5, 5.0)
        if convex and alpha == 1.0:
            alpha = np.nextafter(1.0, 2.0)
        mu, lam = random_strict_pair(rng, n)
        concave_t, convex_t = theorem1_thresholds(n, alpha, 1.0, lam.sum, mu.sum)
        x = 0.95 * convex_t if convex else 1.05 * concave_t
        yield mu, lam, float(alpha), x


def _cdf_gap(mu, lam, alpha, x):
    p_mu = dist.cdf(dist.iid_convolution(mu, alpha, 1.0), x)
    p_lam = dist.cdf(dist.iid_convolution(lam, alpha, 1.0), x)
    return p_mu - p_lam


def suite_theorem1(seed: int = 1, cases: int = 100) -> list[Check]:
    tol = 4 * dist.DEFAULT_EVAL_TOL
    gaps = [_cdf_gap(*c) for c in threshold_cases(seed, cases, convex=False)]
    out = [Check("concave_side", min(gaps) >= -tol,
                 f"min P(mu)-P(lam) above threshold = {_fmt(min(gaps))}")]
    gaps = [_cdf_gap(*c) for c in threshold_cases(seed + 1, cases, convex=True)]
    out.append(Check("convex_side", max(gaps) <= tol,
                     f"max P(mu)-P(lam) below threshold = {_fmt(max(gaps))}"))
    chain = [dist.cdf(dist.iid_convolution(v, 2.0, 1.0), 0.9) for v in CHAIN]
    steps = [a - b for a, b in zip(chain, chain[1:])]
    out.append(Check("four_vector_chain", min(steps) >= -tol,
                     "cdf at x=0.9: " + ", ".join(_fmt(c) for c in chain)))
    return out


def suite_bakirov(seed: int = 2, cases: int = 100) -> list[Check]:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for s in rng.uniform(0.01, 100.0, cases):
        concave, _ = theorem1_thresholds(3, 0.5, 0.5, s, s)
        worst = max(worst, abs(concave - 2 * s) / (2 * s))
    return [Check("chi_square_threshold_is_2s", worst <= 2.2e-16,
                  f"max relative deviation {_fmt(worst)}")]


def suite_crossings(seed: int = 3, cases: int = 50) -> list[Check]:
    rng = np.random.default_rng(seed)
    none_found, n2_not_one = 0, 0
    for i in range(cases):
        n = 2 if i % 3 == 0 else int(rng.integers(2, 7))
        alpha = float(rng.uniform(0.5, 5.0))
        mu, lam = random_strict_pair(rng, n)
        x_lo, x_hi = default_scan_range(mu, lam, alpha, 1.0)
        if n >= 3 and alpha <= 1:
            x_lo = 1e-3 * lam.sum
        rep = crossing_points(mu, lam, alpha, 1.0, x_lo, x_hi)
        if rep.count == 0:
            none_found += 1
        if n == 2 and rep.count != 1:
            n2_not_one += 1
    return [Check("at_least_one_crossing", none_found == 0, f"{none_found}/{cases} pairs without"),
            Check("unique_crossing_n2", n2_not_one == 0, f"{n2_not_one} n=2 pairs not unique")]


def mc_configs(seed: int, count: int):
    rng = np.random.default_rng(seed)
    for _ in range(count):
        n = int(rng.integers(1, 7))
        yield (dist.iid_convolution(random_weights(rng, n), float(rng.uniform(0.5, 5.0)),
                                    float(rng.uniform(0.5, 4.0))),
               int(rng.integers(0, 2**63)))


def suite_mc(seed: int = 4, cases: int = 20, n_samples: int = 10**6,
             workers: int = 1) -> list[Check]:
    reports = [mc.validate_cdf(conv, n_samples, s, mc.default_probes(conv),
                               band_alpha=0.01, workers=workers)
               for conv, s in mc_configs(seed, cases)]
    failures = sum(not r.passed for r in reports)
    worst = max(r.max_abs_gap / r.points[0][3] for r in reports)
    return [Check("dkw_band", failures <= 1,
                  f"{failures}/{cases} outside band; worst gap/band {_fmt(worst)}")]


def random_spectrum(rng: np.random.Generator) -> np.ndarray:
    n = int(rng.integers(1, 9))
    return np.sort(rng.uniform(0.05, 1.0, n) ** 2)[::-1]


def suite_planners(seed: int = 5, cases: int = 50) -> list[Check]:
    rng = np.random.default_rng(seed)
    out = []
    tol = 4 * dist.DEFAULT_EVAL_TOL

    probs = [signal.signal_type1_prob(N, 1.5) for N in range(1, 51)]
    rises = max(b - a for a, b in zip(probs, probs[1:]))
    out.append(Check("signal_chain", rises <= tol, f"largest increase {_fmt(rises)}"))

    plan = signal.signal_min_samples(1.5, 0.01)
    brute = next(N for N in range(1, 10**4) if signal.signal_type1_prob(N, 1.5) <= 0.01)
    out.append(Check("signal_min_samples", plan.min_samples == brute,
                     f"planner {plan.min_samples}, linear scan {brute}"))

    worst = 0.0
    for _ in range(cases):
        spectr = WeightVector(random_spectrum(rng))
        N = trace.trace_bound_samples(spectr.sum, spectr.entries[0], 0.25, 0.01)
        t = max(trace.trace_tail(spectr, N, 0.25, trace.Side.LOWER),
                trace.trace_tail(spectr, N, 0.25, trace.Side.UPPER))
        worst = max(worst, t)
    out.append(Check("trace_bound_sufficient", worst <= 0.01,
                     f"largest tail at bound N = {_fmt(worst)}"))

    eps, N = 0.25, 10
    reports = [trace.skewness_compare(a, b, N, eps) for a, b in zip(CHAIN, CHAIN[1:])]
    ordered = all(r.ordering is trace.Ordering.ORDERED and r.lower_tail_2 <= r.lower_tail_1
                  for r in reports)
    tails = [reports[0].lower_tail_1] + [r.lower_tail_2 for r in reports]
    out.append(Check("skewness_chain", ordered,
                     f"lower tails N={N}: " + ", ".join(_fmt(t) for t in tails)))
    return out


def run_suite(name: str, seed: int | None = None, workers: int = 1) -> list[Check]:
    """Run one named suite, or every suite for ``"all"``."""
    if name == "all":
        return [c for s in SUITES for c in run_suite(s, seed, workers)]
    fn = {
        "appendix": suite_appendix,
        "theorem1": suite_theorem1,
        "bakirov": suite_bakirov,
        "crossings": suite_crossings,
        "mc": suite_mc,
        "planners": suite_planners,
    }.get(name)
    if fn is None:
        raise ValueError(f"unknown suite {name!r}")
    kwargs = {} if seed is None else {"seed": seed}
    if name == "mc":
        kwargs["workers"] = workers
    return [Check(f"{name}.{c.name}", c.passed, c.detail) for c in fn(**kwargs)]
