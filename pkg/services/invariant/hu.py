"""
Compact invariant representation Hu.

Every occupied level gets a pseudo-ternary digit string: one digit per
top-down iteration of the hierarchy, 0 for the lower-mean child, 2 for the
higher-mean child, 1 once the level's cluster is uniform. The numeric value
is the base-2 expansion of those digits. Digit strings are the canonical
form; values alone lose leading zeros, so the table keeps its depth T.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from clustering import Hierarchy, HierarchyNode
from image_io import Image

logger = logging.getLogger("PixInfoInvariant")


class HuDecodeError(ValueError):
    """Raised when a value does not replay to zero in the given number of steps."""


class MissingLevelError(KeyError):
    """Raised when an image level has no code in the table."""


@dataclass(frozen=True)
class DigitString:
    digits: Tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "digits", tuple(int(d) for d in self.digits))
        if any(d not in (0, 1, 2) for d in self.digits):
            raise ValueError(f"digits must be in {{0, 1, 2}}, got {self.digits}")

    @classmethod
    def parse(cls, text: str) -> "DigitString":
        return cls(tuple(int(ch) for ch in text))

    def __len__(self) -> int:
        return len(self.digits)

    def __str__(self) -> str:
        return "".join(str(d) for d in self.digits)


def value(d: DigitString) -> int:
    """Pseudo-ternary value sum(d_j * 2^(T-1-j)), exact."""
    v = 0
    for digit in d.digits:
        v = 2 * v + digit
    return v


def replay(v: int, depth: int) -> DigitString:
    """Recover the digit string of *v* by running exactly *depth* reduction steps.

    Odd values emit 1 and continue with (v-1)/2; even values emit v mod 4
    and continue with 2*(v // 4). The prefix before the first 1 only holds
    even digits, so its value is even and v mod 4 is the last even digit.
    """
    if v < 0 or depth < 0:
        raise HuDecodeError(f"value and depth must be non-negative, got v={v}, T={depth}")
    current = v
    emitted: List[int] = []
    for _ in range(depth):
        if current % 2:
            emitted.append(1)
            current = (current - 1) // 2
        else:
            emitted.append(current % 4)
            current = 2 * (current // 4)
    if current != 0:
        raise HuDecodeError(f"value {v} leaves residue {current} after {depth} steps")
    return DigitString(tuple(reversed(emitted)))


def pixel_bits(d: DigitString) -> int:
    """Integer information of a pixel: the number of even digits."""
    return sum(1 for digit in d.digits if digit != 1)


def negate_digits(d: DigitString) -> DigitString:
    return DigitString(tuple(2 - digit for digit in d.digits))


@dataclass(frozen=True)
class HuTable:
    depth: int
    codes: Dict[int, DigitString]
    splitter: str = ""

    def value_of(self, level: int) -> int:
        try:
            return value(self.codes[level])
        except KeyError:
            raise MissingLevelError(f"level {level} has no code in the table") from None

    def bits_of(self, level: int) -> int:
        try:
            return pixel_bits(self.codes[level])
        except KeyError:
            raise MissingLevelError(f"level {level} has no code in the table") from None

    def dump_lines(self) -> List[str]:
        """``level<TAB>digits<TAB>value<TAB>bits`` per occupied level, ascending."""
        return [
            f"{level}\t{code}\t{value(code)}\t{pixel_bits(code)}"
            for level, code in sorted(self.codes.items())
        ]


def _encode(hier: Hierarchy, stop: Iterable[HierarchyNode], depth: int) -> HuTable:
    stop_ids = {id(node) for node in stop}
    codes: Dict[int, DigitString] = {}
    stack: List[Tuple[HierarchyNode, Tuple[int, ...]]] = [(hier.root, ())]
    while stack:
        node, prefix = stack.pop()
        if node.split is None or id(node) in stop_ids:
            code = DigitString(prefix + (1,) * (depth - len(prefix)))
            for level in hier.levels_of(node):
                codes[level] = code
            continue
        stack.append((node.split.high, prefix + (2,)))
        stack.append((node.split.low, prefix + (0,)))
    return HuTable(depth=depth, codes=codes, splitter=hier.splitter)


def encode(hier: Hierarchy) -> HuTable:
    """Digit strings of every occupied level, length T = hierarchy depth."""
    table = _encode(hier, stop=(), depth=hier.depth)
    logger.debug("Encoded %d levels with T=%d (%s)", len(table.codes), table.depth, hier.splitter)
    return table


def encode_at_cut(hier: Hierarchy, cut: Sequence[HierarchyNode]) -> HuTable:
    """Hu of a piecewise-constant approximation: the cut's clusters are treated as uniform."""
    depth = max((node.depth for node in cut), default=0)
    return _encode(hier, stop=cut, depth=depth)


def validate_table(table: HuTable) -> List[str]:
    """Common length, absorbing 1 and isotone values; returns the violations found."""
    problems: List[str] = []
    previous: Optional[Tuple[int, int]] = None
    for level, code in sorted(table.codes.items()):
        if len(code) != table.depth:
            problems.append(f"level {level}: length {len(code)} != T={table.depth}")
        digits = code.digits
        if 1 in digits and any(d != 1 for d in digits[digits.index(1):]):
            problems.append(f"level {level}: even digit after the first 1 in '{code}'")
        v = value(code)
        if previous is not None and v <= previous[1]:
            problems.append(
                f"levels {previous[0]} < {level} but values {previous[1]} >= {v} (not isotone)"
            )
        previous = (level, v)
    return problems


def hu_image(img: Image, table: HuTable, maxval_out: int = 255) -> Image:
    """Replace each pixel by its Hu value, rescaled linearly onto [0, maxval_out].

    Rounding is half-up; the map is non-decreasing in the value, so pixel
    order is preserved.
    """
    present = np.flatnonzero(np.bincount(img.pixels.ravel(), minlength=img.maxval + 1))
    missing = [int(v) for v in present if int(v) not in table.codes]
    if missing:
        raise MissingLevelError(f"levels {missing[:10]} have no code in the table")

    values = {int(v): table.value_of(int(v)) for v in present}
    v_min, v_max = min(values.values()), max(values.values())
    span = v_max - v_min
    lut = np.zeros(img.maxval + 1, dtype=np.int64)
    for level, v in values.items():
        lut[level] = 0 if span == 0 else (2 * (v - v_min) * maxval_out + span) // (2 * span)
    return Image(img.width, img.height, maxval_out, lut[img.pixels])
