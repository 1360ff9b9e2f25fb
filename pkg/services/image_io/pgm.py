"""
PGM (PNM P2/P5) reader and writer.

Header comments (``#`` to end of line) are accepted anywhere before the
raster. Binary samples are one byte for maxval <= 255, otherwise two bytes
big-endian.
"""
import logging
import os
from typing import List, Tuple

import numpy as np

from .image import Image

logger = logging.getLogger("PixInfoPGM")

_WHITESPACE = b" \t\r\n\v\f"


class PGMFormatError(ValueError):
    """Raised on malformed headers, truncated rasters or out-of-range samples."""


def _header_tokens(data: bytes, count: int, pos: int) -> Tuple[List[int], int]:
    """Read *count* integer header tokens starting at *pos*.

    Returns the tokens and the offset just past the last token.
    """
    tokens: List[int] = []
    n = len(data)
    while len(tokens) < count:
        while pos < n and data[pos] in _WHITESPACE:
            pos += 1
        if pos < n and data[pos] == ord("#"):
            while pos < n and data[pos] not in b"\r\n":
                pos += 1
            continue
        start = pos
        while pos < n and data[pos] not in _WHITESPACE and data[pos] != ord("#"):
            pos += 1
        if start == pos:
            raise PGMFormatError("malformed header: unexpected end of file")
        word = data[start:pos]
        if not word.isdigit():
            raise PGMFormatError(f"malformed header: expected integer, got {word!r}")
        tokens.append(int(word))
    return tokens, pos


def read_pgm(data: bytes) -> Image:
    """Parse a P2 (ASCII) or P5 (binary) graymap."""
    magic = data[:2]
    if magic not in (b"P2", b"P5"):
        raise PGMFormatError(f"malformed header: unknown magic {magic!r}")
    (width, height, maxval), pos = _header_tokens(data, 3, 2)
    if width < 1 or height < 1:
        raise PGMFormatError(f"malformed header: dimensions must be positive, got {width}x{height}")
    if not (1 <= maxval <= 65535):
        raise PGMFormatError(f"malformed header: maxval must be in [1, 65535], got {maxval}")
    expected = width * height

    if magic == b"P5":
        if pos >= len(data) or data[pos] not in _WHITESPACE:
            raise PGMFormatError("malformed header: missing whitespace before raster")
        raster = data[pos + 1:]
        dtype = np.dtype(np.uint8) if maxval <= 255 else np.dtype(">u2")
        needed = expected * dtype.itemsize
        if len(raster) < needed:
            raise PGMFormatError(
                f"truncated pixel data: need {needed} bytes, got {len(raster)}"
            )
        samples = np.frombuffer(raster[:needed], dtype=dtype).astype(np.int64)
    else:
        body = b"\n".join(line.split(b"#", 1)[0] for line in data[pos:].splitlines())
        words = body.split()
        if len(words) < expected:
            raise PGMFormatError(
                f"truncated pixel data: need {expected} samples, got {len(words)}"
            )
        if len(words) > expected:
            raise PGMFormatError(
                f"unexpected trailing data: need {expected} samples, got {len(words)}"
            )
        bad = next((w for w in words if not w.isdigit()), None)
        if bad is not None:
            word = bad.decode(errors="replace")
            raise PGMFormatError(f"malformed pixel data: sample {word!r} is not a non-negative integer")
        samples = np.array([int(w) for w in words], dtype=np.int64)

    if samples.size and samples.max() > maxval:
        raise PGMFormatError(f"pixel value {int(samples.max())} exceeds maxval {maxval}")
    logger.debug("Read %s PGM %dx%d maxval=%d", magic.decode(), width, height, maxval)
    return Image(width=width, height=height, maxval=maxval, pixels=samples)


def write_pgm(img: Image, mode: str = "binary") -> bytes:
    """Serialize *img* as P5 (``binary``) or P2 (``ascii``)."""
    if mode == "ascii":
        rows = "\n".join(" ".join(str(int(p)) for p in row) for row in img.pixels)
        return f"P2\n{img.width} {img.height}\n{img.maxval}\n{rows}\n".encode("ascii")
    if mode != "binary":
        raise ValueError(f"mode must be 'ascii' or 'binary', got '{mode}'")
    dtype = np.dtype(np.uint8) if img.maxval <= 255 else np.dtype(">u2")
    header = f"P5\n{img.width} {img.height}\n{img.maxval}\n".encode("ascii")
    return header + img.pixels.astype(dtype).tobytes()


def read_pgm_file(path: str) -> Image:
    with open(path, "rb") as fh:
        return read_pgm(fh.read())


def write_pgm_file(path: str, img: Image, mode: str = "binary") -> str:
    parent = os.path.dirname(path)
    if parent:
        os.makedirs(parent, exist_ok=True)
    with open(path, "wb") as fh:
        fh.write(write_pgm(img, mode))
    logger.info("Wrote %s (%dx%d, maxval=%d)", path, img.width, img.height, img.maxval)
    return path
