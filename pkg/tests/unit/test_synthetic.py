"""
Unit tests for services/image_io/synthetic.py

The check battery and the acceptance runs use synthetic images only, so each
generator must be deterministic in its seed and honour its exact histogram.
"""
import numpy as np
import pytest
from image_io import GeneratorError, histogram, synthesize
from schemas import GeneratorSpec


def spec(text):
    return GeneratorSpec.from_string(text)


class TestSynthesize:
    def test_constant_image(self):
        img = synthesize(spec("constant:5"), size=(4, 3))
        assert (img.width, img.height) == (4, 3)
        assert histogram(img).counts == {5: 12}

    def test_default_size_is_256_square(self):
        img = synthesize(spec("constant:0"))
        assert (img.width, img.height) == (256, 256)

    def test_ramp_has_requested_levels(self):
        img = synthesize(spec("ramp:4"), size=(8, 2))
        assert histogram(img).levels == (0, 85, 170, 255)
        assert histogram(img).counts[0] == 4

    def test_histogram_exact_reproduces_counts(self):
        img = synthesize(spec("histogram_exact:0=2,1=1,3=1"))
        assert histogram(img).counts == {0: 2, 1: 1, 3: 1}
        assert (img.width, img.height) == (2, 2)

    def test_histogram_exact_near_square_shape(self):
        img = synthesize(spec("histogram_exact:10=3,20=4"))
        assert (img.width, img.height) == (7, 1)

    def test_histogram_exact_size_mismatch_raises(self):
        with pytest.raises(GeneratorError, match="width\\*height"):
            synthesize(spec("histogram_exact:0=2,1=1,3=1"), size=(3, 3))

    def test_histogram_exact_16_bit_levels_widen_maxval(self):
        img = synthesize(GeneratorSpec.from_dict({
            "kind": "histogram_exact", "params": {"counts": {0: 1, 4000: 1}},
        }))
        assert img.maxval == 65535

    def test_two_gaussians_is_seed_deterministic(self):
        a = synthesize(spec("two_gaussians:80,170,20,0.5"), seed=7, size=(32, 32))
        b = synthesize(spec("two_gaussians:80,170,20,0.5"), seed=7, size=(32, 32))
        c = synthesize(spec("two_gaussians:80,170,20,0.5"), seed=8, size=(32, 32))
        assert a == b
        assert a != c

    def test_two_gaussians_is_bimodal(self):
        img = synthesize(spec("two_gaussians:60,190,8,0.5"), seed=1, size=(64, 64))
        values = img.pixels.ravel()
        assert np.count_nonzero(values < 125) > 1000
        assert np.count_nonzero(values > 125) > 1000

    def test_non_positive_size_raises(self):
        with pytest.raises(GeneratorError, match="size"):
            synthesize(spec("constant:1"), size=(0, 5))
