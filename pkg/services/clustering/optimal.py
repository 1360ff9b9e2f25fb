"""
Optimal 1D quantizer (oracle).

Dynamic program over the occupied levels: D[k][i] is the least squared error
of splitting levels i..g-1 into k contiguous clusters. The scan over the end
of the first cluster is vectorized in float64; every row whose minimum is not
clearly unique is re-decided with exact ``Fraction`` costs, so the chosen
partition is exactly optimal and, among optimal ones, has the
lexicographically smallest boundary list.
"""
import logging
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

import numpy as np

from image_io import Histogram

from .stats import ClusterStats, stats_of_interval

logger = logging.getLogger("PixInfoOptimal")

# Float cost error, in ulps of the centred total squared sum.
# Candidates within twice the accumulated bound of the row minimum are compared exactly.
_ERROR_ULPS = 8


class PartitionError(ValueError):
    """Raised when more clusters are requested than there are occupied levels."""


class OptimalQuantizer:
    """
    Shared DP tables for every k up to *k_max*.
    Build once, then call ``partition(k)`` for any k.
    """

    def __init__(self, h: Histogram, k_max: Optional[int] = None):
        g = h.g
        k_max = g if k_max is None else k_max
        if not (1 <= k_max <= g):
            raise PartitionError(f"k_max={k_max} must be in [1, g={g}]")
        self.h = h
        self.k_max = k_max
        self._exact_memo: Dict[Tuple[int, int], Fraction] = {}
        self._cost_memo: Dict[Tuple[int, int], Fraction] = {}

        cum_n, cum_s, cum_ss = h.prefix_sums()
        # Centre on the integer mean before leaving exact arithmetic; the float
        # costs then lose precision relative to the spread, not the intensity.
        m = cum_s[g] // cum_n[g]
        n = np.array(cum_n, dtype=np.float64)
        s = np.array([cs - m * cn for cs, cn in zip(cum_s, cum_n)], dtype=np.float64)
        ss = np.array(
            [css - 2 * m * cs + m * m * cn for css, cs, cn in zip(cum_ss, cum_s, cum_n)],
            dtype=np.float64,
        )
        i = np.arange(g)[:, None]
        j = np.arange(g)[None, :]
        with np.errstate(divide="ignore", invalid="ignore"):
            cn = n[j + 1] - n[i]
            cs = s[j + 1] - s[i]
            cost = (ss[j + 1] - ss[i]) - cs * cs / cn
        cost = np.where(j >= i, np.maximum(cost, 0.0), np.inf)
        # Every float cost is within a few ulps of the centred total; a sum of k costs within k times that.
        error_bound = _ERROR_ULPS * np.finfo(np.float64).eps * (float(ss[g]) + 1.0)

        self._choice = np.zeros((k_max + 1, g), dtype=np.int64)
        self._choice[1, :] = g - 1
        prev = cost[:, g - 1].copy()
        for k in range(2, k_max + 1):
            tail = np.full(g, np.inf)
            tail[: g - 1] = prev[1:]
            total = cost + tail[None, :]
            feasible = np.arange(g) <= g - k
            best = np.where(feasible, total.min(axis=1), np.inf)
            window = best + 2 * k * error_bound
            near = (total <= window[:, None]) & feasible[:, None]
            choice = near.argmax(axis=1)
            for row in np.flatnonzero(near.sum(axis=1) > 1):
                choice[row] = self._resolve_exact(k, int(row), np.flatnonzero(near[row]))
            self._choice[k, :] = choice
            prev = np.where(feasible, total[np.arange(g), choice], np.inf)
        logger.debug("Optimal DP built for g=%d, k_max=%d", g, k_max)

    def _cost(self, i: int, j: int) -> Fraction:
        key = (i, j)
        if key not in self._cost_memo:
            n, s, ss = self.h.sums(i, j + 1)
            self._cost_memo[key] = Fraction(ss * n - s * s, n)
        return self._cost_memo[key]

    def _exact(self, k: int, i: int) -> Fraction:
        """Exact value of the DP entry D[k][i] along the recorded choices."""
        chain = []
        while (k, i) not in self._exact_memo and k > 1:
            j = int(self._choice[k, i])
            chain.append((k, i, j))
            k, i = k - 1, j + 1
        if (k, i) in self._exact_memo:
            value = self._exact_memo[(k, i)]
        else:
            value = self._cost(i, self.h.g - 1)
            self._exact_memo[(k, i)] = value
        for kk, ii, jj in reversed(chain):
            value = self._cost(ii, jj) + value
            self._exact_memo[(kk, ii)] = value
        return value

    def _resolve_exact(self, k: int, i: int, candidates) -> int:
        best_j, best = None, None
        for j in candidates:
            j = int(j)
            value = self._cost(i, j) + self._exact(k - 1, j + 1)
            if best is None or value < best:
                best_j, best = j, value
        return best_j

    def partition(self, k: int) -> Tuple[List[ClusterStats], Fraction]:
        if not (1 <= k <= self.k_max):
            raise PartitionError(f"k={k} must be in [1, {self.k_max}] (g={self.h.g})")
        levels = self.h.levels
        clusters: List[ClusterStats] = []
        i = 0
        for kk in range(k, 0, -1):
            j = int(self._choice[kk, i]) if kk > 1 else self.h.g - 1
            clusters.append(stats_of_interval(self.h, levels[i], levels[j]))
            i = j + 1
        energy = sum((c.squared_error for c in clusters), Fraction(0))
        return clusters, energy


def optimal_partition(h: Histogram, k: int) -> Tuple[List[ClusterStats], Fraction]:
    """Least-squared-error partition of the occupied levels into k intervals."""
    if not (1 <= k <= h.g):
        raise PartitionError(f"k={k} must be in [1, g={h.g}]")
    return OptimalQuantizer(h, k).partition(k)
