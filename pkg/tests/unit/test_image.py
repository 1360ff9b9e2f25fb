"""
Unit tests for services/image_io/image.py

Every estimator and clustering step reads the histogram and its prefix sums,
so an off-by-one here silently corrupts all downstream bit counts.
"""
import numpy as np
import pytest
from image_io import Histogram, Image, duplicate, histogram, negate


# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------

def make_image(pixels, width=None, maxval=255):
    pixels = np.asarray(pixels)
    if pixels.ndim == 1:
        pixels = pixels.reshape(1, -1)
    height, w = pixels.shape
    return Image(width or w, height, maxval, pixels)


# ---------------------------------------------------------------------------
# Image
# ---------------------------------------------------------------------------

class TestImage:
    def test_pixels_are_read_only(self):
        img = make_image([0, 1, 2, 3])
        with pytest.raises(ValueError):
            img.pixels[0, 0] = 9

    def test_reshapes_flat_sequence(self):
        img = Image.from_sequence(2, 2, 255, [0, 0, 1, 3])
        assert img.pixels.shape == (2, 2)
        assert img.n_pixels == 4

    def test_sample_above_maxval_raises(self):
        with pytest.raises(ValueError, match="Pixel values"):
            Image.from_sequence(2, 1, 7, [0, 8])

    def test_negative_sample_raises(self):
        with pytest.raises(ValueError, match="Pixel values"):
            Image.from_sequence(2, 1, 7, [-1, 0])

    def test_zero_width_raises(self):
        with pytest.raises(ValueError, match="dimensions"):
            Image(0, 1, 255, np.zeros((1, 0)))

    def test_maxval_out_of_range_raises(self):
        with pytest.raises(ValueError, match="maxval"):
            Image.from_sequence(1, 1, 70000, [0])

    def test_equality_compares_pixels(self):
        assert make_image([1, 2]) == make_image([1, 2])
        assert make_image([1, 2]) != make_image([2, 1])
        assert make_image([1, 2], maxval=255) != make_image([1, 2], maxval=3)


# ---------------------------------------------------------------------------
# Histogram
# ---------------------------------------------------------------------------

class TestHistogram:
    def test_counts_occupied_levels_only(self):
        h = histogram(make_image([0, 0, 1, 3]))
        assert h.counts == {0: 2, 1: 1, 3: 1}
        assert h.levels == (0, 1, 3)
        assert h.g == 3
        assert h.total == 4

    def test_constant_image_has_one_level(self):
        h = histogram(make_image([7] * 5))
        assert h.g == 1 and h.counts == {7: 5}

    def test_from_counts_drops_zero_counts(self):
        h = Histogram.from_counts({0: 2, 2: 0, 5: 1})
        assert h.levels == (0, 5)
        assert h.maxval == 255

    def test_from_counts_widens_maxval_for_16_bit_levels(self):
        assert Histogram.from_counts({1000: 1}).maxval == 1000

    def test_negative_count_raises(self):
        with pytest.raises(ValueError, match="non-negative"):
            Histogram.from_counts({0: 2, 1: -1})

    def test_total_mismatch_raises(self):
        with pytest.raises(ValueError, match="total"):
            Histogram(maxval=255, counts={0: 2}, total=3)

    def test_sums_over_interval(self):
        h = Histogram.from_counts({0: 2, 1: 1, 3: 1})
        i, j = h.index_range(1, 3)
        assert (i, j) == (1, 3)
        # n = 2, s = 1 + 3, ss = 1 + 9
        assert h.sums(i, j) == (2, 4, 10)

    def test_index_range_ignores_unoccupied_bounds(self):
        h = Histogram.from_counts({0: 2, 1: 1, 3: 1})
        assert h.levels_between(2, 2) == ()
        assert h.levels_between(2, 200) == (3,)

    def test_prefix_sums_lengths(self):
        h = Histogram.from_counts({0: 2, 1: 1, 3: 1})
        cum_n, cum_s, cum_ss = h.prefix_sums()
        assert cum_n == [0, 2, 3, 4]
        assert cum_s == [0, 0, 1, 4]
        assert cum_ss == [0, 0, 1, 10]

    def test_restrict_keeps_maxval(self):
        h = Histogram.from_counts({0: 2, 1: 1, 3: 1}, maxval=7)
        sub = h.restrict(1, 3)
        assert sub.counts == {1: 1, 3: 1}
        assert sub.maxval == 7
        assert sub.total == 2


# ---------------------------------------------------------------------------
# negate / duplicate
# ---------------------------------------------------------------------------

class TestTransforms:
    def test_negate_maps_to_maxval_minus_p(self):
        assert negate(make_image([0, 1, 3], maxval=3)).pixels.tolist() == [[3, 2, 0]]

    def test_negate_is_an_involution(self):
        img = make_image([0, 10, 200])
        assert negate(negate(img)) == img

    def test_duplicate_repeats_along_rows(self):
        img = duplicate(make_image([[1, 2], [3, 4]]), 2)
        assert img.width == 4 and img.height == 2
        assert img.pixels.tolist() == [[1, 1, 2, 2], [3, 3, 4, 4]]

    def test_duplicate_scales_histogram_counts(self):
        img = make_image([0, 0, 1, 3])
        assert histogram(duplicate(img, 5)).counts == {0: 10, 1: 5, 3: 5}

    def test_duplicate_factor_below_one_raises(self):
        with pytest.raises(ValueError, match="factor"):
            duplicate(make_image([0]), 0)
