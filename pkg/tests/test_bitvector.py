import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rdfcsa.bitvector import BitVector, SelectSampler


def brute(bits):
    ones = [i + 1 for i, b in enumerate(bits) if b]
    ranks = np.concatenate(([0], np.cumsum(bits)))
    return ones, ranks


def check_against_scan(bits):
    bv = BitVector(bits)
    ones, ranks = brute(bits)
    for i in range(0, len(bits) + 1):
        assert bv.rank1(i) == ranks[i]
    for j, pos in enumerate(ones, 1):
        assert bv.select1(j) == pos
    for j in range(0, len(bits) + 1):
        later = [p for p in ones if p > j]
        assert bv.selectnext1(j) == (later[0] if later else None)


def test_docstring_example():
    bv = BitVector([1, 0, 1, 1, 0, 1, 0, 0])
    assert (bv.rank1(4), bv.select1(2), bv.selectnext1(1)) == (3, 3, 3)
    assert bv.ones == 4 and len(bv) == 8


@pytest.mark.parametrize("length", [1, 31, 32, 33, 255, 256, 257, 1000, 4097])
def test_boundaries_random(length):
    rng = np.random.default_rng(length)
    for density in (0.02, 0.5, 0.97):
        check_against_scan((rng.random(length) < density).astype(np.uint8).tolist())


def test_all_zero_and_all_one():
    check_against_scan([0] * 600)
    check_against_scan([1] * 600)
    assert BitVector([0] * 10).selectnext1(0) is None


def test_block_counter_fits_a_byte():
    # the largest in-superblock offset is 7 full blocks of ones = 224
    bv = BitVector([1] * 512)
    _, blocks = bv.directory()
    assert blocks.max() == 224


def test_select_sample_positions():
    bv = BitVector([1] * 1000)
    s = SelectSampler(bv)
    assert list(s.sones) == [0, 256, 512, 768]


def test_selectnext_chain_equals_next_select():
    rng = random.Random(5)
    bits = [1 if rng.random() < 0.1 else 0 for _ in range(5000)]
    bv = BitVector(bits)
    for j in range(1, bv.ones):
        assert bv.selectnext1(bv.select1(j)) == bv.select1(j + 1)


def test_from_positions_and_words_roundtrip():
    bv = BitVector.from_positions([3, 64, 300], 400)
    assert bv.to_numpy().nonzero()[0].tolist() == [2, 63, 299]
    again = BitVector.from_words(bv.words(), 400, directory=bv.directory())
    assert again == bv and again.rank1(400) == 3


def test_errors():
    with pytest.raises(ValueError):
        BitVector([0, 2])
    with pytest.raises(ValueError):
        BitVector.from_positions([0], 5)
    bv = BitVector([1, 0])
    with pytest.raises(IndexError):
        bv[3]
    with pytest.raises(ValueError):
        BitVector.from_words(bv.words(), 2, directory=(np.zeros(2, np.uint32), np.zeros(16, np.uint8)))


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(0, 1), min_size=1, max_size=700))
def test_property_rank_select_inverse(bits):
    bv = BitVector(bits)
    for j in range(1, bv.ones + 1):
        p = bv.select1(j)
        assert bits[p - 1] == 1 and bv.rank1(p) == j
