import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rdfcsa.psi import (COMPRESSED, MAX_CODE_LEN, PLAIN, PsiError, PsiSegment,
                        canonical_codes, huffman_lengths, tokenize, unzigzag, zigzag)


def test_zigzag():
    assert [zigzag(g) for g in (0, 1, -1, 2, -2)] == [0, 1, 2, 3, 4]
    assert all(unzigzag(zigzag(g)) == g for g in range(-50, 50))


def test_tokenize_runs_gaps_and_samples():
    samples, periods = tokenize([1, 2, 3, 4, 8, 7, 9, 10, 11, 12], 4)
    assert samples == [1, 8, 11]
    # run of three +1, then -1 / +2 / single +1, then single +1
    assert periods == [[7], [4, 6, 2], [2]]


def test_huffman_lengths_and_canonical_codes():
    lengths = huffman_lengths({5: 10, 3: 10, 7: 1, 2: 3})
    assert lengths == {5: 1, 3: 2, 2: 3, 7: 3}
    assert canonical_codes(lengths) == {5: 0, 3: 2, 2: 6, 7: 7}
    assert huffman_lengths({9: 4}) == {9: 1}


def test_code_length_limit():
    fib = {k: f for k, f in enumerate([1, 1, 2, 3, 5, 8, 13, 21, 34, 55, 89, 144, 233, 377, 610,
                                       987, 1597, 2584, 4181, 6765, 10946, 17711, 28657,
                                       46368, 75025, 121393, 196418, 317811])}
    lengths = huffman_lengths(fib)
    assert max(lengths.values()) <= MAX_CODE_LEN
    assert sum(2.0 ** -ln for ln in lengths.values()) <= 1.0


@pytest.mark.parametrize("t_psi", [1, 2, 4, 8, 32, 512])
def test_roundtrip_permutation(t_psi):
    rng = random.Random(t_psi)
    vals = list(range(1, 3001))
    rng.shuffle(vals)
    vals[100:400] = sorted(vals[100:400])
    seg = PsiSegment.build(vals, COMPRESSED, t_psi)
    assert seg.to_list() == vals
    for i in rng.sample(range(1, 3001), 200):
        assert seg.access(i) == vals[i - 1]
    for _ in range(50):
        l = rng.randint(1, 3000)
        r = rng.randint(l - 1, 3000)
        assert seg.decode_range(l, r) == vals[l - 1:r]


def test_serialization_roundtrip_both_modes():
    rng = random.Random(3)
    vals = [rng.randint(1, 500) for _ in range(500)]
    for mode in (COMPRESSED, PLAIN):
        seg = PsiSegment.build(vals, mode, 16)
        back = PsiSegment.from_bytes(seg.to_bytes())
        assert back.to_list() == vals and back.to_bytes() == seg.to_bytes()


def test_plain_width_arithmetic():
    for n in (1, 2, 3, 1000, 1024, 1025):
        seg = PsiSegment.build(list(range(1, n + 1)), PLAIN)
        width = (n - 1).bit_length()
        assert seg.payload_bits() == n * width
        assert len(seg.to_bytes()) == 13 + 1 + -(-n * width // 8)


def test_identity_is_one_run_token_per_period():
    seg = PsiSegment.build(list(range(1, 10001)), COMPRESSED, 512)
    # 19 full periods share one code bit; the short last period escapes
    assert seg.stream_bits == 28
    assert seg.to_list() == list(range(1, 10001))


def test_rejects_bad_input():
    with pytest.raises(PsiError):
        PsiSegment.build([], COMPRESSED)
    with pytest.raises(PsiError):
        PsiSegment.build([0, 1], COMPRESSED)
    with pytest.raises(PsiError):
        PsiSegment.build([1, 2], "zip")
    seg = PsiSegment.build([2, 1, 3, 5, 4], COMPRESSED, 2)
    with pytest.raises(IndexError):
        seg.access(6)
    with pytest.raises(PsiError):
        PsiSegment.from_bytes(seg.to_bytes()[:-1])
    with pytest.raises(PsiError):
        PsiSegment.from_bytes(b"\x07" + seg.to_bytes()[1:])


@settings(max_examples=80, deadline=None)
@given(st.lists(st.integers(1, 40), min_size=1, max_size=40).flatmap(
    lambda xs: st.tuples(st.just([min(x, len(xs)) for x in xs]), st.integers(1, 9))))
def test_property_any_values_roundtrip(case):
    vals, t_psi = case
    seg = PsiSegment.from_bytes(PsiSegment.build(vals, COMPRESSED, t_psi).to_bytes())
    assert [seg.access(i) for i in range(1, len(vals) + 1)] == vals
    assert seg.decode_range(1, len(vals)) == vals
