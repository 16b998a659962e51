"""Distribution functions, modes and Schur-order comparisons of weighted gamma sums."""

from .dist import (
    GammaConvolution,
    GammaTerm,
    WeightVector,
    cdf,
    derivative_identity_residual,
    iid_convolution,
    make_convolution,
    mode,
    pdf,
    sf,
)
from .errors import GammaSchurError
from .majorization import (
    MajorizationRelation,
    RelationKind,
    is_majorized,
    is_weakly_majorized,
    t_transform_chain,
)
from .schur import (
    OrderVerdict,
    Relation,
    Rule,
    analytic_verdict,
    compare_numeric,
    improvement_region,
    infinite_verdict,
    theorem1_thresholds,
)
from .crossings import CrossingReport, crossing_points
from .mc import McReport, sample, validate_cdf

__version__ = "0.1.0"
