# Approximation Package
from .expansion import (
    ApproxStep,
    ExpansionError,
    UncoveredLevelError,
    compact_sequence,
    convexity_report,
    expand,
    optimal_steps,
    render,
)
from .curves import CURVE_SPLITTER_ORDER, compact_curve, curve, to_csv
