"""
Grayscale image and intensity histogram types.

The histogram is the sole input of every clustering step, so it also keeps
exact integer prefix sums (count, sum, sum of squares) over its occupied
levels; interval statistics are then O(log g).
"""
from __future__ import annotations

import bisect
from dataclasses import dataclass, field
from itertools import accumulate
from typing import Dict, List, Mapping, Optional, Tuple

import numpy as np


@dataclass(frozen=True, eq=False)
class Image:
    """Row-major grayscale raster; ``pixels`` has shape (height, width)."""

    width: int
    height: int
    maxval: int
    pixels: np.ndarray

    def __post_init__(self) -> None:
        if self.width < 1 or self.height < 1:
            raise ValueError(f"Image dimensions must be positive, got {self.width}x{self.height}")
        if not (1 <= self.maxval <= 65535):
            raise ValueError(f"Image.maxval must be in [1, 65535], got {self.maxval}")
        pixels = np.asarray(self.pixels, dtype=np.int64).reshape(self.height, self.width)
        if pixels.size and (pixels.min() < 0 or pixels.max() > self.maxval):
            raise ValueError(
                f"Pixel values must lie in [0, {self.maxval}], "
                f"got range [{pixels.min()}, {pixels.max()}]"
            )
        pixels = pixels.copy()
        pixels.setflags(write=False)
        object.__setattr__(self, "pixels", pixels)

    @classmethod
    def from_sequence(cls, width: int, height: int, maxval: int, pixels) -> "Image":
        return cls(width=width, height=height, maxval=maxval, pixels=np.asarray(pixels))

    @property
    def n_pixels(self) -> int:
        return self.width * self.height

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Image):
            return NotImplemented
        return (
            self.width == other.width
            and self.height == other.height
            and self.maxval == other.maxval
            and np.array_equal(self.pixels, other.pixels)
        )

    def __repr__(self) -> str:
        return f"Image({self.width}x{self.height}, maxval={self.maxval})"


@dataclass(frozen=True)
class Histogram:
    """Per-level pixel counts; only occupied levels are stored."""

    maxval: int
    counts: Dict[int, int]
    total: int

    levels: Tuple[int, ...] = field(init=False, repr=False, compare=False)
    _cum_n: List[int] = field(init=False, repr=False, compare=False)
    _cum_s: List[int] = field(init=False, repr=False, compare=False)
    _cum_ss: List[int] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if any(int(c) < 0 for c in self.counts.values()):
            raise ValueError("Histogram counts must be non-negative")
        counts = {int(v): int(c) for v, c in sorted(self.counts.items()) if int(c) > 0}
        if any(v < 0 or v > self.maxval for v in counts):
            raise ValueError(f"Histogram levels must lie in [0, {self.maxval}]")
        if sum(counts.values()) != self.total or self.total < 1:
            raise ValueError(
                f"Histogram total {self.total} must be positive and equal the sum of counts"
            )
        levels = tuple(counts)
        object.__setattr__(self, "counts", counts)
        object.__setattr__(self, "levels", levels)
        object.__setattr__(self, "_cum_n", [0, *accumulate(counts[v] for v in levels)])
        object.__setattr__(self, "_cum_s", [0, *accumulate(counts[v] * v for v in levels)])
        object.__setattr__(self, "_cum_ss", [0, *accumulate(counts[v] * v * v for v in levels)])

    @classmethod
    def from_counts(cls, counts: Mapping[int, int], maxval: Optional[int] = None) -> "Histogram":
        counts = {int(v): int(c) for v, c in counts.items() if int(c) > 0}
        if maxval is None:
            maxval = max(255, max(counts, default=0))
        return cls(maxval=maxval, counts=counts, total=sum(counts.values()))

    @property
    def g(self) -> int:
        """Number of occupied levels."""
        return len(self.levels)

    def index_range(self, lo: int, hi: int) -> Tuple[int, int]:
        """Half-open range [i, j) of occupied-level indices inside [lo, hi]."""
        return bisect.bisect_left(self.levels, lo), bisect.bisect_right(self.levels, hi)

    def sums(self, i: int, j: int) -> Tuple[int, int, int]:
        """(n, s, ss) over occupied indices [i, j)."""
        return (
            self._cum_n[j] - self._cum_n[i],
            self._cum_s[j] - self._cum_s[i],
            self._cum_ss[j] - self._cum_ss[i],
        )

    def prefix_sums(self) -> Tuple[List[int], List[int], List[int]]:
        """Cumulative (n, s, ss) over occupied levels, each of length g + 1."""
        return list(self._cum_n), list(self._cum_s), list(self._cum_ss)

    def levels_between(self, lo: int, hi: int) -> Tuple[int, ...]:
        i, j = self.index_range(lo, hi)
        return self.levels[i:j]

    def restrict(self, lo: int, hi: int) -> "Histogram":
        """Sub-histogram of the occupied levels inside [lo, hi]."""
        kept = {v: self.counts[v] for v in self.levels_between(lo, hi)}
        return Histogram(maxval=self.maxval, counts=kept, total=sum(kept.values()))


def histogram(img: Image) -> Histogram:
    """Count pixels per intensity level."""
    binned = np.bincount(img.pixels.ravel(), minlength=img.maxval + 1)
    occupied = np.flatnonzero(binned)
    counts = {int(v): int(binned[v]) for v in occupied}
    return Histogram(maxval=img.maxval, counts=counts, total=img.n_pixels)


def negate(img: Image) -> Image:
    """Negative image: p -> maxval - p."""
    return Image(img.width, img.height, img.maxval, img.maxval - img.pixels)


def duplicate(img: Image, m: int) -> Image:
    """Scale the image by repeating every pixel m times along its row."""
    if m < 1:
        raise ValueError(f"Duplication factor must be >= 1, got {m}")
    return Image(img.width * m, img.height, img.maxval, np.repeat(img.pixels, m, axis=1))
