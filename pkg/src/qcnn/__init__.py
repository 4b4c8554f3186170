"""Small convolutional QC classifiers versus statistical limit rules."""

from .analytic import (
    GridSpec,
    Scenario,
    StatQCFunction,
    decision_limit,
    p_accept_closed,
    p_reject_closed,
    stat_reject,
)
from .numerics import RngState, RngStream, erf, erf_inv, erfc, erfc_inv, std_normal

__version__ = "0.1.0"

__all__ = [
    "GridSpec", "Scenario", "StatQCFunction", "decision_limit", "p_accept_closed",
    "p_reject_closed", "stat_reject", "RngState", "RngStream", "erf", "erf_inv",
    "erfc", "erfc_inv", "std_normal", "__version__",
]
