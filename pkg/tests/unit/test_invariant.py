"""
Unit tests for services/invariant/hu.py

The digit strings are the canonical invariant representation: the encoding is
checked against hand traces, replayed from its numeric values over a random
battery, and shown to be unchanged by pixel duplication and increasing
relabeling, and complemented by negation.
"""
import numpy as np
import pytest
from clustering import build_hierarchy, get_splitter, stats_of_interval
from image_io import Histogram, Image, duplicate, histogram, negate
from invariant import (
    DigitString,
    HuDecodeError,
    HuTable,
    MissingLevelError,
    encode,
    encode_at_cut,
    hu_image,
    negate_digits,
    pixel_bits,
    replay,
    validate_table,
    value,
)

SPLITTER_NAMES = ["otsu", "balanced", "merge"]


# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------

def make_hist(counts, maxval=None):
    return Histogram.from_counts(counts, maxval)


def ds(text):
    return DigitString.parse(text)


def codes_of(table):
    return {level: str(code) for level, code in table.codes.items()}


def random_hist(rng, max_g=64, max_count=1000, top=256):
    g = int(rng.integers(1, max_g + 1))
    levels = np.sort(rng.choice(top, size=g, replace=False))
    return make_hist({int(v): int(rng.integers(1, max_count + 1)) for v in levels})


def image_from_hist(h):
    flat = np.repeat(np.array(h.levels), [h.counts[v] for v in h.levels])
    return Image(flat.size, 1, h.maxval, flat)


def merge_tie_free(h):
    """True when every merge is strictly the cheapest adjacent pair."""
    clusters = [stats_of_interval(h, v, v) for v in h.levels]
    while len(clusters) > 1:
        costs = [
            clusters[i].merged(clusters[i + 1]).squared_error
            - clusters[i].squared_error - clusters[i + 1].squared_error
            for i in range(len(clusters) - 1)
        ]
        best = min(costs)
        if costs.count(best) > 1:
            return False
        i = costs.index(best)
        clusters[i:i + 2] = [clusters[i].merged(clusters[i + 1])]
    return True


def tie_free(h, splitter):
    if splitter == "merge":
        return merge_tie_free(h)
    rule = get_splitter(splitter)
    for node in build_hierarchy(h, splitter).nodes():
        if node.split is not None:
            scores = [score for _, score in rule.scores(h, node.stats)]
            if scores.count(max(scores)) > 1:
                return False
    return True


# ---------------------------------------------------------------------------
# Worked examples
# ---------------------------------------------------------------------------

class TestEncode:
    def test_otsu_worked_example(self):
        table = encode(build_hierarchy(make_hist({0: 2, 1: 1, 3: 1}), "otsu"))
        assert table.depth == 2
        assert codes_of(table) == {0: "00", 1: "02", 3: "21"}
        assert [table.value_of(v) for v in (0, 1, 3)] == [0, 2, 5]

    def test_balanced_worked_example(self):
        table = encode(build_hierarchy(make_hist({0: 2, 1: 1, 3: 1}), "balanced"))
        assert codes_of(table) == {0: "01", 1: "20", 3: "22"}
        assert [table.value_of(v) for v in (0, 1, 3)] == [1, 4, 6]

    def test_constant_image_has_empty_code(self):
        table = encode(build_hierarchy(make_hist({7: 10}), "otsu"))
        assert table.depth == 0
        assert codes_of(table) == {7: ""}
        assert table.value_of(7) == 0
        assert table.bits_of(7) == 0

    def test_dump_lines(self):
        table = encode(build_hierarchy(make_hist({0: 2, 1: 1, 3: 1}), "otsu"))
        assert table.dump_lines() == ["0\t00\t0\t2", "1\t02\t2\t2", "3\t21\t5\t1"]

    def test_missing_level_raises(self):
        table = encode(build_hierarchy(make_hist({0: 2, 1: 1, 3: 1}), "otsu"))
        with pytest.raises(MissingLevelError):
            table.value_of(2)


class TestEncodeAtCut:
    def test_cut_nodes_become_uniform(self):
        hier = build_hierarchy(make_hist({0: 2, 1: 1, 3: 1}), "otsu")
        table = encode_at_cut(hier, [hier.root.split.low, hier.root.split.high])
        assert table.depth == 1
        assert codes_of(table) == {0: "0", 1: "0", 3: "2"}

    def test_root_cut_is_all_uniform(self):
        hier = build_hierarchy(make_hist({0: 2, 1: 1, 3: 1}), "otsu")
        table = encode_at_cut(hier, [hier.root])
        assert table.depth == 0
        assert set(codes_of(table).values()) == {""}

    def test_leaf_cut_equals_full_encoding(self):
        hier = build_hierarchy(make_hist({0: 2, 1: 1, 3: 1, 9: 4}), "balanced")
        assert codes_of(encode_at_cut(hier, hier.leaves())) == codes_of(encode(hier))


# ---------------------------------------------------------------------------
# Digit arithmetic
# ---------------------------------------------------------------------------

class TestDigits:
    def test_parse_rejects_other_digits(self):
        with pytest.raises(ValueError):
            ds("03")

    def test_value_is_base_two_expansion(self):
        assert value(ds("21")) == 5
        assert value(ds("1111")) == 15
        assert value(ds("")) == 0

    def test_replay_examples(self):
        assert str(replay(5, 2)) == "21"
        assert str(replay(1, 2)) == "01"
        assert str(replay(0, 3)) == "000"

    def test_replay_residue_raises(self):
        with pytest.raises(HuDecodeError, match="residue"):
            replay(8, 2)

    def test_replay_negative_raises(self):
        with pytest.raises(HuDecodeError):
            replay(-1, 2)

    def test_pixel_bits(self):
        assert pixel_bits(ds("21")) == 1
        assert pixel_bits(ds("00")) == 2
        assert pixel_bits(ds("111")) == 0

    def test_negate_digits(self):
        assert str(negate_digits(ds("21"))) == "01"
        assert str(negate_digits(ds("00"))) == "22"
        assert str(negate_digits(ds("111"))) == "111"


# ---------------------------------------------------------------------------
# Table validation
# ---------------------------------------------------------------------------

class TestValidateTable:
    def test_encoded_tables_are_valid(self):
        table = encode(build_hierarchy(make_hist({0: 2, 1: 1, 3: 1}), "otsu"))
        assert validate_table(table) == []

    def test_even_digit_after_one_is_reported(self):
        table = HuTable(depth=2, codes={0: ds("00"), 1: ds("12")})
        assert any("after the first 1" in p for p in validate_table(table))

    def test_length_mismatch_is_reported(self):
        table = HuTable(depth=2, codes={0: ds("0"), 1: ds("21")})
        assert any("length" in p for p in validate_table(table))

    def test_non_isotone_values_are_reported(self):
        table = HuTable(depth=2, codes={0: ds("20"), 1: ds("02")})
        assert any("isotone" in p for p in validate_table(table))


# ---------------------------------------------------------------------------
# Randomized battery
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("splitter", SPLITTER_NAMES)
class TestBattery:
    def test_round_trip_and_definition_oracle(self, splitter):
        rng = np.random.default_rng(2024)
        for _ in range(200):
            h = random_hist(rng)
            hier = build_hierarchy(h, splitter)
            table = encode(hier)
            for level, code in table.codes.items():
                assert replay(value(code), table.depth) == code
                assert pixel_bits(code) == hier.non_uniform_ancestors(level)
            assert validate_table(table) == []

    def test_duplication_leaves_codes_unchanged(self, splitter):
        rng = np.random.default_rng(7)
        for _ in range(30):
            img = image_from_hist(random_hist(rng, max_g=24, max_count=20))
            expected = codes_of(encode(build_hierarchy(histogram(img), splitter)))
            for m in (2, 5):
                scaled = histogram(duplicate(img, m))
                assert codes_of(encode(build_hierarchy(scaled, splitter))) == expected

    def test_increasing_affine_relabel_leaves_codes_unchanged(self, splitter):
        rng = np.random.default_rng(8)
        for _ in range(30):
            h = random_hist(rng, max_g=24, max_count=50, top=64)
            a, b = int(rng.integers(2, 4)), int(rng.integers(0, 40))
            relabeled = make_hist({a * v + b: c for v, c in h.counts.items()})
            original = [str(encode(build_hierarchy(h, splitter)).codes[v]) for v in h.levels]
            moved = encode(build_hierarchy(relabeled, splitter))
            assert [str(moved.codes[a * v + b]) for v in h.levels] == original

    def test_negation_complements_digits(self, splitter):
        rng = np.random.default_rng(9)
        checked = 0
        for _ in range(60):
            img = image_from_hist(random_hist(rng, max_g=16, max_count=30))
            h = histogram(img)
            if not tie_free(h, splitter):
                continue
            flipped = encode(build_hierarchy(histogram(negate(img)), splitter))
            table = encode(build_hierarchy(h, splitter))
            for level, code in table.codes.items():
                assert flipped.codes[img.maxval - level] == negate_digits(code)
            checked += 1
        assert checked >= 5


# ---------------------------------------------------------------------------
# hu_image
# ---------------------------------------------------------------------------

class TestHuImage:
    def test_worked_example(self):
        img = Image.from_sequence(4, 1, 255, [0, 0, 1, 3])
        table = encode(build_hierarchy(histogram(img), "otsu"))
        assert hu_image(img, table).pixels.tolist() == [[0, 0, 102, 255]]

    def test_constant_image_maps_to_zero(self):
        img = Image.from_sequence(3, 1, 255, [9, 9, 9])
        table = encode(build_hierarchy(histogram(img), "balanced"))
        assert hu_image(img, table).pixels.tolist() == [[0, 0, 0]]

    def test_two_levels_map_to_extremes(self):
        img = Image.from_sequence(3, 1, 255, [0, 3, 3])
        for splitter in SPLITTER_NAMES:
            table = encode(build_hierarchy(histogram(img), splitter))
            assert sorted(set(hu_image(img, table).pixels.ravel().tolist())) == [0, 255]

    def test_preserves_pixel_order(self):
        rng = np.random.default_rng(10)
        img = image_from_hist(random_hist(rng, max_g=40))
        out = hu_image(img, encode(build_hierarchy(histogram(img), "otsu")))
        src, dst = img.pixels.ravel(), out.pixels.ravel()
        order = np.argsort(src, kind="stable")
        assert np.all(np.diff(dst[order]) >= 0)

    def test_missing_level_raises(self):
        img = Image.from_sequence(2, 1, 255, [0, 5])
        table = encode(build_hierarchy(make_hist({0: 1, 1: 1}), "otsu"))
        with pytest.raises(MissingLevelError):
            hu_image(img, table)
