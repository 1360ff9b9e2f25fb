"""
Exact cluster statistics over intensity intervals.

All squared errors are ``fractions.Fraction`` built from integer sums, so
comparisons between candidate splits or merges never depend on rounding.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from image_io import Histogram


class EmptyIntervalError(ValueError):
    """Raised when an interval holds no occupied level."""


@dataclass(frozen=True)
class ClusterStats:
    """Inclusive level interval [lo, hi] with pixel count, sum and sum of squares."""

    lo: int
    hi: int
    n: int
    s: int
    ss: int

    @property
    def mean(self) -> Fraction:
        return Fraction(self.s, self.n)

    @property
    def squared_error(self) -> Fraction:
        """E_c = ss - s^2 / n."""
        return Fraction(self.ss * self.n - self.s * self.s, self.n)

    @property
    def is_uniform(self) -> bool:
        # Zero variance iff every pixel sits on one level.
        return self.ss * self.n == self.s * self.s

    def merged(self, other: "ClusterStats") -> "ClusterStats":
        return ClusterStats(
            lo=min(self.lo, other.lo),
            hi=max(self.hi, other.hi),
            n=self.n + other.n,
            s=self.s + other.s,
            ss=self.ss + other.ss,
        )


def stats_of_interval(h: Histogram, lo: int, hi: int) -> ClusterStats:
    """Sum n, s, ss over the occupied levels in [lo, hi]."""
    if lo > hi:
        raise EmptyIntervalError(f"empty interval [{lo}, {hi}]")
    i, j = h.index_range(lo, hi)
    if i >= j:
        raise EmptyIntervalError(f"no occupied level in [{lo}, {hi}]")
    n, s, ss = h.sums(i, j)
    return ClusterStats(lo=lo, hi=hi, n=n, s=s, ss=ss)


def delta_e_merge(a: ClusterStats, b: ClusterStats) -> Fraction:
    """Ward increment n_a*n_b/(n_a+n_b) * (mu_a - mu_b)^2 = E(a+b) - E(a) - E(b)."""
    diff = a.s * b.n - b.s * a.n
    return Fraction(diff * diff, a.n * b.n * (a.n + b.n))
