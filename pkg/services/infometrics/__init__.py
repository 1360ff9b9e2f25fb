# Information Metrics Package
from .estimators import (
    InvalidCutError,
    approximation_report,
    decompose_at_cut,
    hartley_total,
    hartley_total_per_pixel,
    integer_total,
    percent_of_volume,
    recompute_integer_total,
    shannon_total,
    shannon_total_per_pixel,
)
