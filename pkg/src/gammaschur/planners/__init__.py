"""Experimental-design planners: signal detection and trace estimation."""

from .signal import SignalPlan, signal_min_samples, signal_type1_prob
from .spectrum import Spectrum, ingest_spectrum, jacobi_eigenvalues, parse_spectrum
from .trace import (
    Ordering,
    Side,
    SkewnessReport,
    TracePlan,
    skewness_compare,
    trace_bound_samples,
    trace_exact_min_samples,
    trace_tail,
)
