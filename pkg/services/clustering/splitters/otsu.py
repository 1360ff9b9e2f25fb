from fractions import Fraction
from typing import List, Tuple

from image_io import Histogram

from ..stats import ClusterStats
from .base import Splitter, candidate_splits


class OtsuSplitter(Splitter):
    """
    Histogram Otsu thresholding.
    Picks the threshold with the maximal decrease of the total squared error,
    i.e. the maximal between-class scatter of the two parts.
    """

    name = "otsu"

    def scores(self, h: Histogram, c: ClusterStats) -> List[Tuple[int, Fraction]]:
        out = []
        for t, n_low, s_low in candidate_splits(h, c):
            n_high, s_high = c.n - n_low, c.s - s_low
            diff = n_high * s_low - n_low * s_high
            out.append((t, Fraction(diff * diff, c.n * n_low * n_high)))
        return out


def split_otsu(h: Histogram, c: ClusterStats) -> int:
    return OtsuSplitter().threshold(h, c)
