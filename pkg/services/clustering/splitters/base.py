import logging
from abc import ABC, abstractmethod
from fractions import Fraction
from typing import List, Tuple

from image_io import Histogram

from ..stats import ClusterStats

_base_logger = logging.getLogger("PixInfoSplitter")


class UniformClusterError(ValueError):
    """Raised when a split is requested for a cluster with a single occupied level."""


class Splitter(ABC):
    """
    Abstract Base Class for the binary cluster-splitting rules.
    Enforces a standard interface for threshold selection so hierarchy
    construction never depends on a concrete rule.
    """

    name: str = "unknown"

    def prepare(self, h: Histogram) -> "Splitter":
        """Return the splitter to use for every node of *h*'s hierarchy.

        Rules that need a global pass over the histogram (merge) override this.
        """
        return self

    def threshold(self, h: Histogram, c: ClusterStats) -> int:
        """
        Split *c* into [lo, t] and [t+1, hi].
        Picks the best-scoring candidate; ties go to the smallest t.
        """
        best_t, best_score = None, None
        for t, score in self.scores(h, c):
            if best_score is None or score > best_score:
                best_t, best_score = t, score
        _base_logger.debug("%s split [%d, %d] at t=%s", self.name, c.lo, c.hi, best_t)
        return best_t

    @abstractmethod
    def scores(self, h: Histogram, c: ClusterStats) -> List[Tuple[int, Fraction]]:
        """
        Candidate thresholds of *c* with their scores (higher is better), in
        increasing t. Only the largest occupied level of each distinct lower part
        is listed, which is the smallest t producing that split.
        """


def candidate_splits(h: Histogram, c: ClusterStats):
    """Yield (t, n_low, s_low) for every distinct two-way split of *c*."""
    if c.is_uniform:
        raise UniformClusterError(f"cluster [{c.lo}, {c.hi}] is uniform and cannot be split")
    i, j = h.index_range(c.lo, c.hi)
    for k in range(i + 1, j):
        n_low, s_low, _ = h.sums(i, k)
        yield h.levels[k - 1], n_low, s_low
