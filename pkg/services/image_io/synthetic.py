"""
Deterministic synthetic test images.

Stand-ins for natural photographs in acceptance runs: every generator draws
from ``numpy.random.default_rng(seed)`` so the same (descriptor, seed, size)
always yields the same raster.
"""
import logging
import math
from typing import Callable, Dict, Optional, Tuple

import numpy as np

from schemas import GeneratorSpec, SchemaValidationError

from .image import Image

logger = logging.getLogger("PixInfoSynthetic")


class GeneratorError(SchemaValidationError):
    """Raised when generator parameters are out of range for the requested image."""


def _near_square(total: int) -> Tuple[int, int]:
    """(width, height) with width * height == total and height <= width, as square as possible."""
    height = int(math.isqrt(total))
    while total % height:
        height -= 1
    return total // height, height


def _constant(params: Dict, size: Tuple[int, int], rng: np.random.Generator) -> Image:
    width, height = size
    maxval = int(params.get("maxval", 255))
    return Image(width, height, maxval, np.full((height, width), int(params["value"])))


def _ramp(params: Dict, size: Tuple[int, int], rng: np.random.Generator) -> Image:
    width, height = size
    maxval = int(params.get("maxval", 255))
    levels = int(params["levels"])
    column_level = (np.arange(width) * levels) // width
    if levels > 1:
        values = (column_level * maxval) // (levels - 1)
    else:
        values = np.zeros(width, dtype=np.int64)
    return Image(width, height, maxval, np.tile(values, (height, 1)))


def _two_gaussians(params: Dict, size: Tuple[int, int], rng: np.random.Generator) -> Image:
    width, height = size
    maxval = int(params.get("maxval", 255))
    n = width * height
    first = rng.random(n) < float(params["mix"])
    centers = np.where(first, float(params["mu1"]), float(params["mu2"]))
    samples = rng.normal(centers, float(params["sigma"]))
    values = np.clip(np.rint(samples), 0, maxval).astype(np.int64)
    return Image(width, height, maxval, values.reshape(height, width))


def _histogram_exact(params: Dict, size: Tuple[int, int], rng: np.random.Generator) -> Image:
    counts: Dict[int, int] = {int(k): int(v) for k, v in params["counts"].items() if int(v) > 0}
    total = sum(counts.values())
    width, height = size
    if width * height != total:
        raise GeneratorError(
            f"histogram_exact needs width*height == {total}, got {width}x{height}"
        )
    top = max(counts)
    maxval = int(params.get("maxval", 255 if top <= 255 else 65535))
    if top > maxval:
        raise GeneratorError(f"histogram_exact level {top} exceeds maxval {maxval}")
    levels = np.array(sorted(counts), dtype=np.int64)
    flat = np.repeat(levels, [counts[v] for v in levels.tolist()])
    return Image(width, height, maxval, rng.permutation(flat).reshape(height, width))


_GENERATORS: Dict[str, Callable[[Dict, Tuple[int, int], np.random.Generator], Image]] = {
    "constant": _constant,
    "ramp": _ramp,
    "two_gaussians": _two_gaussians,
    "histogram_exact": _histogram_exact,
}


def synthesize(
    spec: GeneratorSpec,
    seed: int = 0,
    size: Optional[Tuple[int, int]] = None,
) -> Image:
    """Generate the image described by *spec*.

    *size* defaults to 256x256; for ``histogram_exact`` it defaults to the most
    square shape holding exactly the requested pixel total.
    """
    try:
        spec = GeneratorSpec.from_dict(spec.to_dict())
    except SchemaValidationError as exc:
        raise GeneratorError(str(exc)) from exc

    if size is None:
        if spec.kind == "histogram_exact":
            size = _near_square(sum(spec.params["counts"].values()))
        else:
            size = (256, 256)
    if size[0] < 1 or size[1] < 1:
        raise GeneratorError(f"image size must be positive, got {size[0]}x{size[1]}")

    rng = np.random.default_rng(seed)
    img = _GENERATORS[spec.kind](spec.params, size, rng)
    logger.info("Synthesized %s image %s with seed=%d", spec.kind, img, seed)
    return img
