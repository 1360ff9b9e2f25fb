from fractions import Fraction
from typing import List, Tuple

from image_io import Histogram

from ..stats import ClusterStats
from .base import Splitter, candidate_splits


class BalancedSplitter(Splitter):
    """
    Pixel-count balancing split.
    Minimizes |n_low - n_high| and ignores intensities entirely, which makes
    the resulting integer estimate track the Shannon total.
    """

    name = "balanced"

    def scores(self, h: Histogram, c: ClusterStats) -> List[Tuple[int, Fraction]]:
        return [
            (t, Fraction(-abs(2 * n_low - c.n)))
            for t, n_low, _ in candidate_splits(h, c)
        ]


def split_balanced(h: Histogram, c: ClusterStats) -> int:
    return BalancedSplitter().threshold(h, c)
