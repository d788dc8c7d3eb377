import pytest

from rdfcsa.dictionary import Dictionary, IngestError, dict_build, load, read_ntriples, read_tsv


def test_four_set_ids():
    d, ts = dict_build([("b", "knows", "a"), ("a", "knows", "c"), ("a", "age", '"3"')])
    assert d.so_terms == ["a"] and d.s_terms == ["b"] and d.o_terms == ['"3"', "c"]
    assert d.encode("a", "S") == d.encode("a", "O") == 1
    assert d.encode("b", "S") == 2 and d.encode("c", "O") == 3
    assert d.encode("age", "P") == 1 and d.encode("knows", "P") == 2
    assert d.encode("zzz", "S") is None and d.encode("b", "O") is None
    assert (d.n_s, d.n_p, d.n_o) == (2, 2, 3) and ts.n == 3
    assert d.decode_triple((2, 2, 1)) == ("b", "knows", "a")
    with pytest.raises(IndexError):
        d.decode(4, "O")


def test_bytewise_utf8_order():
    d, _ = dict_build([("é", "p", "x"), ("z", "p", "x")])
    assert d.s_terms == ["z", "é"]


def test_serialization_roundtrip():
    d, _ = dict_build([("a", "p", "b"), ("b", "p", "ü")])
    assert Dictionary.from_bytes(d.to_bytes()) == d


def test_tsv_reader_errors_carry_line_number():
    assert list(read_tsv(["a\tb\tc\n", "\n", "d\te\tf"])) == [("a", "b", "c"), ("d", "e", "f")]
    with pytest.raises(IngestError) as err:
        list(read_tsv(["a\tb\tc", "a\tb"]))
    assert err.value.line_no == 2
    with pytest.raises(IngestError):
        list(read_tsv(["a\t\tc"]))


def test_ntriples_subset():
    lines = ['# comment', '<http://x/a> <http://x/p> "hi there"@en .',
             '_:b1 <http://x/p> "4"^^<http://x/int> .', '']
    assert list(read_ntriples(lines)) == [
        ("<http://x/a>", "<http://x/p>", '"hi there"@en'),
        ("_:b1", "<http://x/p>", '"4"^^<http://x/int>')]
    with pytest.raises(IngestError) as err:
        list(read_ntriples(["<a> <b> <c>"]))
    assert err.value.line_no == 1


def test_empty_input():
    with pytest.raises(IngestError, match="no triples"):
        dict_build([])


def test_load(tmp_path):
    f = tmp_path / "d.nt"
    f.write_text("<s> <p> <o> .\n<o> <p> <s> .\n", encoding="utf-8")
    d, ts = load(f, "ntriples-subset")
    assert d.n_so == 2 and ts.n == 2
