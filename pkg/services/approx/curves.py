"""
E / sigma curves: optimal partitions against each hierarchy's greedy expansion,
one row per cluster count k.
"""
import logging
from typing import Iterable, Optional

import pandas as pd

from clustering import build_hierarchy
from image_io import Image, histogram

from .expansion import compact_sequence, expand, optimal_steps

logger = logging.getLogger("PixInfoApprox")

CURVE_SPLITTER_ORDER = ("otsu", "merge", "balanced")
CSV_FLOAT_FORMAT = "%.9g"


def _ordered(splitters: Iterable[str]):
    requested = set(splitters)
    unknown = requested - set(CURVE_SPLITTER_ORDER)
    if unknown:
        raise ValueError(f"unknown splitters {sorted(unknown)}; expected a subset of {CURVE_SPLITTER_ORDER}")
    return [name for name in CURVE_SPLITTER_ORDER if name in requested]


def curve(img: Image, splitters: Iterable[str], k_max: Optional[int] = None) -> pd.DataFrame:
    """Columns ``k, E_opt, sigma_opt`` then ``E_<s>, sigma_<s>`` per splitter (otsu, merge, balanced)."""
    h = histogram(img)
    k_max = h.g if k_max is None else min(k_max, h.g)

    table = pd.DataFrame({"k": range(1, k_max + 1)})
    optimal = optimal_steps(h, k_max)
    table["E_opt"] = [float(step.energy) for step in optimal]
    table["sigma_opt"] = [step.sigma for step in optimal]
    for name in _ordered(splitters):
        steps = expand(build_hierarchy(h, name), k_max)
        table[f"E_{name}"] = [float(step.energy) for step in steps]
        table[f"sigma_{name}"] = [step.sigma for step in steps]
    logger.info("Curve table: %d rows, methods=%s", len(table), ["opt", *_ordered(splitters)])
    return table


def compact_curve(img: Image, splitters: Iterable[str]) -> pd.DataFrame:
    """``splitter, depth, k, E, sigma`` for the per-depth partition sequence of each hierarchy."""
    h = histogram(img)
    rows = []
    for name in _ordered(splitters):
        for depth, step in enumerate(compact_sequence(build_hierarchy(h, name))):
            rows.append({
                "splitter": name,
                "depth": depth,
                "k": step.k,
                "E": float(step.energy),
                "sigma": step.sigma,
            })
    return pd.DataFrame(rows, columns=["splitter", "depth", "k", "E", "sigma"])


def to_csv(table: pd.DataFrame, path: Optional[str] = None) -> Optional[str]:
    """Write *table* with 9 significant digits; returns the text when *path* is None."""
    return table.to_csv(path, index=False, float_format=CSV_FLOAT_FORMAT, lineterminator="\n")
