"""
Hierarchical (quasioptimal) and optimal piecewise-constant approximations.

``expand`` walks a hierarchy greedily: starting from the root it always
splits the frontier node with the largest squared-error decrease, so each
cut refines the previous one by exactly one split.
"""
from __future__ import annotations

import heapq
import itertools
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from clustering import ClusterStats, Hierarchy, HierarchyNode, OptimalQuantizer
from image_io import Histogram, Image

logger = logging.getLogger("PixInfoApprox")


class ExpansionError(ValueError):
    """Raised when more clusters are requested than the hierarchy has leaves."""


class UncoveredLevelError(ValueError):
    """Raised when an image level falls outside every cluster of an approximation."""


@dataclass(frozen=True)
class ApproxStep:
    """One k-cluster approximation; ``cut`` is None for the non-hierarchical optimum."""

    k: int
    clusters: Tuple[ClusterStats, ...]
    energy: Fraction
    sigma: float
    cut: Optional[Tuple[HierarchyNode, ...]] = None

    @property
    def means(self) -> Tuple[Fraction, ...]:
        return tuple(c.mean for c in self.clusters)


def _sigma(energy: Fraction, n: int) -> float:
    return math.sqrt(energy / n)


def _step_from_cut(k: int, cut: Sequence[HierarchyNode], energy: Fraction, n: int) -> ApproxStep:
    ordered = tuple(sorted(cut, key=lambda node: node.stats.lo))
    return ApproxStep(
        k=k,
        clusters=tuple(node.stats for node in ordered),
        energy=energy,
        sigma=_sigma(energy, n),
        cut=ordered,
    )


def expand(hier: Hierarchy, k_max: Optional[int] = None) -> List[ApproxStep]:
    """Approximations with 1..k_max clusters, each the best single split of the previous one."""
    g = hier.histogram.g
    k_max = g if k_max is None else k_max
    if not (1 <= k_max <= g):
        raise ExpansionError(f"k_max={k_max} must be in [1, g={g}]")

    n = hier.histogram.total
    energy = hier.root.squared_error
    frontier: List[HierarchyNode] = [hier.root]
    tiebreak = itertools.count()
    # max-heap on delta_e, ties to the node with the smallest lo
    heap: List[Tuple[Fraction, int, int, HierarchyNode]] = []

    def push(node: HierarchyNode) -> None:
        if node.split is not None:
            heapq.heappush(heap, (-node.split.delta_e, node.stats.lo, next(tiebreak), node))

    push(hier.root)
    steps = [_step_from_cut(1, frontier, energy, n)]
    for k in range(2, k_max + 1):
        _, _, _, node = heapq.heappop(heap)
        frontier.remove(node)
        frontier.extend((node.split.low, node.split.high))
        energy -= node.split.delta_e
        push(node.split.low)
        push(node.split.high)
        steps.append(_step_from_cut(k, frontier, energy, n))
    logger.debug("Expanded %s hierarchy to k=%d, E=%s", hier.splitter, k_max, float(energy))
    return steps


def compact_sequence(hier: Hierarchy) -> List[ApproxStep]:
    """The 1, 2, 4, 8 ... partitions behind the Hu digits: one cut per tree depth."""
    n = hier.histogram.total
    steps = []
    for depth in range(hier.depth + 1):
        cut = hier.level_cut(depth)
        energy = sum((node.squared_error for node in cut), Fraction(0))
        steps.append(_step_from_cut(len(cut), cut, energy, n))
    return steps


def optimal_steps(h: Histogram, k_max: Optional[int] = None) -> List[ApproxStep]:
    quantizer = OptimalQuantizer(h, k_max)
    steps = []
    for k in range(1, quantizer.k_max + 1):
        clusters, energy = quantizer.partition(k)
        steps.append(ApproxStep(k=k, clusters=tuple(clusters), energy=energy, sigma=_sigma(energy, h.total)))
    return steps


def render(img: Image, step: ApproxStep) -> Image:
    """Replace each pixel by its cluster mean, rounded half-up."""
    lut = np.full(img.maxval + 1, -1, dtype=np.int64)
    for c in step.clusters:
        lut[c.lo: c.hi + 1] = (2 * c.s + c.n) // (2 * c.n)
    out = lut[img.pixels]
    if (out < 0).any():
        uncovered = sorted(set(img.pixels[out < 0].tolist()))
        raise UncoveredLevelError(f"levels {uncovered[:10]} are outside the approximation's clusters")
    return Image(img.width, img.height, img.maxval, out)


def convexity_report(energies: Sequence[Union[Fraction, int, float]]) -> List[int]:
    """1-based indices i in 2..len-1 where E_i > (E_{i-1} + E_{i+1}) / 2."""
    values = [Fraction(e) for e in energies]
    return [
        i + 1
        for i in range(1, len(values) - 1)
        if 2 * values[i] > values[i - 1] + values[i + 1]
    ]
