"""
Information totals in bits.

Hartley: N * log2(g) with g the number of distinct occupied levels (or
clusters of an approximation). Shannon: -sum count * log2(count / N).
Integer: sum over pixels of the number of non-uniform clusters holding the
pixel, read off the Hu digit strings.
"""
import logging
import math
from typing import List, Optional, Sequence, Tuple

import numpy as np

from clustering import Hierarchy, HierarchyNode, build_hierarchy
from image_io import Histogram, Image, histogram
from invariant import HuTable, MissingLevelError, encode
from schemas import InfoReport

logger = logging.getLogger("PixInfoMetrics")


class InvalidCutError(ValueError):
    """Raised when a node set is not a full antichain of the hierarchy."""


def hartley_total(n: int, g: int) -> float:
    if n < 1 or g < 1:
        raise ValueError(f"n and g must be >= 1, got n={n}, g={g}")
    return n * math.log2(g)


def _shannon_from_counts(counts: Sequence[int]) -> float:
    c = np.asarray(counts, dtype=np.float64)
    total = c.sum()
    return float(-(c * np.log2(c / total)).sum()) + 0.0


def shannon_total(h: Histogram) -> float:
    """Per-level summation form."""
    return _shannon_from_counts(list(h.counts.values()))


def shannon_total_per_pixel(img: Image) -> float:
    """Per-pixel summation form: -sum over pixels of log2 p(pixel)."""
    binned = np.bincount(img.pixels.ravel(), minlength=img.maxval + 1)
    p = binned[img.pixels.ravel()] / img.n_pixels
    return float(-np.log2(p).sum()) + 0.0


def hartley_total_per_pixel(img: Image) -> float:
    """Per-pixel summation form: every pixel carries log2 g bits."""
    g = int(np.count_nonzero(np.bincount(img.pixels.ravel())))
    return float(np.full(img.n_pixels, math.log2(g)).sum())


def integer_total(h: Histogram, table: HuTable) -> int:
    missing = [level for level in h.levels if level not in table.codes]
    if missing:
        raise MissingLevelError(f"levels {missing[:10]} have no code in the table")
    return sum(count * table.bits_of(level) for level, count in h.counts.items())


def _cut_cover(hier: Hierarchy, cut: Sequence[HierarchyNode]) -> None:
    known = {id(node) for node in hier.nodes()}
    foreign = [node for node in cut if id(node) not in known]
    if foreign:
        raise InvalidCutError(f"{len(foreign)} cut node(s) do not belong to the hierarchy")
    seen = {}
    for node in cut:
        for level in hier.levels_of(node):
            if level in seen:
                raise InvalidCutError(
                    f"level {level} is covered twice (not an antichain): {seen[level]} and {node}"
                )
            seen[level] = node
    uncovered = [level for level in hier.histogram.levels if level not in seen]
    if uncovered:
        raise InvalidCutError(f"levels {uncovered[:10]} are not covered by the cut")


def decompose_at_cut(hier: Hierarchy, cut: Sequence[HierarchyNode]) -> Tuple[int, List[int]]:
    """Split Q into Q0 (the approximation) and Q_i (each cut cluster as its own image).

    Q0 counts, per pixel, the non-uniform strict ancestors of its cut node;
    Q_i counts the non-uniform clusters strictly inside cut node i. Every
    strict ancestor of a node has been split, so that count is the node depth.
    """
    _cut_cover(hier, cut)
    counts = hier.histogram.counts
    q0 = 0
    parts: List[int] = []
    for node in cut:
        q_i = 0
        for level in hier.levels_of(node):
            q0 += counts[level] * node.depth
            q_i += counts[level] * (hier.leaf_for_level(level).depth - node.depth)
        parts.append(q_i)
    return q0, parts


def percent_of_volume(q_bits: float, img: Image, volume_bits: Optional[int] = None) -> float:
    """Share of the image's storage volume: 8 bits per pixel up to maxval 255, else 16."""
    if q_bits < 0:
        raise ValueError(f"q_bits must be >= 0, got {q_bits}")
    bits = volume_bits or (8 if img.maxval <= 255 else 16)
    return 100.0 * q_bits / (img.n_pixels * bits)


def approximation_report(
    hier: Hierarchy,
    cut: Sequence[HierarchyNode],
    img: Image,
    volume_bits: Optional[int] = None,
) -> InfoReport:
    """Estimates for the k-cluster approximation, the clusters treated as indivisible."""
    q0, _ = decompose_at_cut(hier, cut)
    k = len(cut)
    n = hier.histogram.total
    q_hartley = hartley_total(n, k)
    q_shannon = _shannon_from_counts([node.stats.n for node in cut])
    return InfoReport(
        k=k,
        n_pixels=n,
        g=k,
        q_hartley=q_hartley,
        q_shannon=q_shannon,
        q_integer=q0,
        pct_hartley=percent_of_volume(q_hartley, img, volume_bits),
        pct_shannon=percent_of_volume(q_shannon, img, volume_bits),
        pct_integer=percent_of_volume(q0, img, volume_bits),
        splitter=hier.splitter,
    )


def recompute_integer_total(rendered: Image, splitter: str) -> int:
    """Integer total of a rendered approximation with its hierarchy rebuilt from scratch.

    Rounded means may collide or shift, so this is reported next to Q0, never
    compared against it.
    """
    h = histogram(rendered)
    total = integer_total(h, encode(build_hierarchy(h, splitter)))
    logger.debug("Recomputed integer total %d for %s on %s", total, splitter, rendered)
    return total
