"""Revenue of bundled vs separate posted prices for i.i.d. additive buyers."""

from .analysis import (
    ConstantsCertificate,
    Segment,
    build_table,
    bundle_ratio,
    constants,
    figure_data,
    segment_boundary,
    segment_minimum,
)
from .distcore import (
    BernoulliFamily,
    DiscreteDistribution,
    TailQuery,
    binomial_cdf,
    convolve_iid,
    h,
    poisson_cdf,
)
from .errors import (
    BracketingError,
    CapacityError,
    DegenerateDistributionError,
    DomainError,
    StructureError,
)
from .revenue import RatioResult, RevenueQuote, brev, brev_at_price, myerson_price, srev
from .verifier import CheckResult, VerificationReport, build_tight_witness, run_suite

__version__ = "0.1.0"

__all__ = [
    "BernoulliFamily", "BracketingError", "CapacityError", "CheckResult",
    "ConstantsCertificate", "DegenerateDistributionError", "DiscreteDistribution",
    "DomainError", "RatioResult", "RevenueQuote", "Segment", "StructureError",
    "TailQuery", "VerificationReport", "binomial_cdf", "brev", "brev_at_price",
    "build_table", "build_tight_witness", "bundle_ratio", "constants",
    "convolve_iid", "figure_data", "h", "myerson_price", "poisson_cdf",
    "run_suite", "segment_boundary", "segment_minimum", "srev",
]
