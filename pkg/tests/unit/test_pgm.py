"""
Unit tests for services/image_io/pgm.py

PGM is the only file format the CLI reads and writes, so malformed input must
fail loudly with PGMFormatError instead of yielding a wrong raster.
"""
import numpy as np
import pytest
from image_io import Image, PGMFormatError, read_pgm, read_pgm_file, write_pgm, write_pgm_file


def make_image(width, height, maxval, pixels):
    return Image.from_sequence(width, height, maxval, pixels)


# ---------------------------------------------------------------------------
# Reading
# ---------------------------------------------------------------------------

class TestReadPGM:
    def test_reads_ascii(self):
        img = read_pgm(b"P2\n2 2\n3\n0 0\n1 3\n")
        assert (img.width, img.height, img.maxval) == (2, 2, 3)
        assert img.pixels.tolist() == [[0, 0], [1, 3]]

    def test_reads_binary(self):
        img = read_pgm(b"P5\n4 1\n255\n" + bytes([0, 0, 1, 3]))
        assert img.pixels.tolist() == [[0, 0, 1, 3]]

    def test_reads_16_bit_big_endian(self):
        img = read_pgm(b"P5 2 1 1000\n" + bytes([0x03, 0xE8, 0x00, 0x01]))
        assert img.pixels.tolist() == [[1000, 1]]

    def test_comments_anywhere_in_header(self):
        data = b"P2\n# made by hand\n2 # width\n1\n# maxval next\n7\n5 6\n"
        assert read_pgm(data).pixels.tolist() == [[5, 6]]

    def test_unknown_magic_raises(self):
        with pytest.raises(PGMFormatError, match="magic"):
            read_pgm(b"P6\n1 1\n255\n\x00\x00\x00")

    def test_non_integer_header_raises(self):
        with pytest.raises(PGMFormatError, match="expected integer"):
            read_pgm(b"P2\nwide 1\n255\n0\n")

    def test_missing_header_field_raises(self):
        with pytest.raises(PGMFormatError, match="malformed header"):
            read_pgm(b"P2\n2 2")

    def test_zero_maxval_raises(self):
        with pytest.raises(PGMFormatError, match="maxval"):
            read_pgm(b"P2\n1 1\n0\n0\n")

    def test_truncated_binary_raises(self):
        with pytest.raises(PGMFormatError, match="truncated"):
            read_pgm(b"P5\n2 2\n255\n" + bytes([1, 2, 3]))

    def test_truncated_ascii_raises(self):
        with pytest.raises(PGMFormatError, match="truncated"):
            read_pgm(b"P2\n2 2\n255\n1 2 3\n")

    def test_trailing_ascii_samples_raise(self):
        with pytest.raises(PGMFormatError, match="trailing"):
            read_pgm(b"P2\n1 1\n255\n1 2\n")

    def test_sample_above_maxval_raises(self):
        with pytest.raises(PGMFormatError, match="exceeds maxval"):
            read_pgm(b"P2\n2 1\n3\n0 4\n")

    def test_negative_ascii_sample_raises(self):
        with pytest.raises(PGMFormatError, match="non-negative"):
            read_pgm(b"P2 1 1 5 -1")

    def test_signed_or_fractional_ascii_sample_raises(self):
        for body in (b"+3", b"2.5", b"0x1"):
            with pytest.raises(PGMFormatError, match="malformed pixel data"):
                read_pgm(b"P2\n1 1\n5\n" + body + b"\n")


# ---------------------------------------------------------------------------
# Writing
# ---------------------------------------------------------------------------

class TestWritePGM:
    def test_ascii_layout(self):
        img = make_image(2, 2, 3, [0, 0, 1, 3])
        assert write_pgm(img, mode="ascii") == b"P2\n2 2\n3\n0 0\n1 3\n"

    def test_binary_layout(self):
        img = make_image(2, 1, 255, [7, 200])
        assert write_pgm(img) == b"P5\n2 1\n255\n" + bytes([7, 200])

    def test_16_bit_binary_uses_two_bytes(self):
        img = make_image(1, 1, 65535, [258])
        assert write_pgm(img).endswith(bytes([0x01, 0x02]))

    def test_unknown_mode_raises(self):
        with pytest.raises(ValueError, match="mode"):
            write_pgm(make_image(1, 1, 255, [0]), mode="hex")

    def test_written_binary_reads_back_identically(self):
        rng = np.random.default_rng(3)
        img = make_image(5, 3, 4095, rng.integers(0, 4096, size=15))
        assert read_pgm(write_pgm(img)) == img

    @pytest.mark.parametrize("mode", ["ascii", "binary"])
    @pytest.mark.parametrize("maxval", [1, 3, 255, 1023])
    def test_random_images_round_trip(self, mode, maxval):
        rng = np.random.default_rng(maxval)
        for _ in range(20):
            width, height = (int(d) for d in rng.integers(1, 65, size=2))
            img = make_image(width, height, maxval, rng.integers(0, maxval + 1, size=width * height))
            assert read_pgm(write_pgm(img, mode=mode)) == img

    def test_file_helpers_create_parent_dirs(self, tmp_path):
        img = make_image(2, 2, 255, [0, 64, 128, 255])
        path = write_pgm_file(str(tmp_path / "nested" / "x.pgm"), img, mode="ascii")
        assert read_pgm_file(path) == img

    def test_missing_file_raises_os_error(self, tmp_path):
        with pytest.raises(OSError):
            read_pgm_file(str(tmp_path / "absent.pgm"))
