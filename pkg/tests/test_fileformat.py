import struct

import pytest

from rdfcsa import fileformat
from rdfcsa.core import Rdfcsa
from rdfcsa.fileformat import (SECTIONS, ChecksumError, IndexFormatError, header_size, pack,
                               pack_sections, read_index, unpack, unpack_sections, write_index)
from rdfcsa.psi import PsiSegment
from rdfcsa.query import resolve


def test_roundtrip_with_dictionary(tmp_path, medium):
    d, ts, idx = medium
    path = tmp_path / "m.idx"
    size = write_index(path, idx, d)
    assert size == path.stat().st_size
    idx2, d2 = read_index(path)
    assert d2 == d
    assert idx2.extract_all() == idx.extract_all() == ts.as_tuples()
    assert (idx2.mode, idx2.t_psi, idx2.alphabet) == (idx.mode, idx.t_psi, idx.alphabet)
    t = ts.as_tuples()[9]
    for tp in [(t[0], None, None), (None, t[1], t[2]), (t[0], None, t[2])]:
        assert resolve(idx2, tp) == resolve(idx, tp)


def test_bytes_are_deterministic(medium):
    d, ts, _ = medium
    a = pack(Rdfcsa.build(ts, t_psi=8), d)
    b = pack(Rdfcsa.build(ts, t_psi=8), d)
    assert a == b


def test_header_fields(desk_index):
    buf = pack(desk_index)
    magic, version, flags, n, n_s, n_p, n_o, t_psi, count = struct.unpack_from("<8sHH4QIH", buf)
    assert magic == b"RDFCSA1\0" and version == 1 and count == len(SECTIONS)
    assert (n, n_s, n_p, n_o, t_psi) == (10, 5, 6, 5, 4)
    assert flags & fileformat.FLAG_DIRECTORIES and not flags & fileformat.FLAG_DICTIONARY
    sizes = fileformat.section_sizes(buf)
    assert sum(sizes.values()) == len(buf)


def test_directories_can_be_omitted(desk_index):
    with_dirs = pack(desk_index)
    without = pack(desk_index, directories=False)
    assert len(without) < len(with_dirs)
    idx, _ = unpack(without)
    assert idx.extract_all() == desk_index.extract_all()
    assert idx.d[0].directory()[1].tolist() == desk_index.d[0].directory()[1].tolist()


def test_every_single_bit_flip_in_sections_is_detected(desk_index):
    buf = bytearray(pack(desk_index))
    for byte in range(header_size(), len(buf) - 4):
        for bit in range(8):
            buf[byte] ^= 1 << bit
            with pytest.raises(ChecksumError):
                unpack_sections(bytes(buf))
            buf[byte] ^= 1 << bit


def test_structural_errors(desk_index):
    buf = pack(desk_index)
    with pytest.raises(IndexFormatError, match="magic"):
        unpack(b"XXXXXXXX" + buf[8:])
    with pytest.raises(IndexFormatError, match="version"):
        unpack(buf[:8] + struct.pack("<H", 9) + buf[10:])
    with pytest.raises(IndexFormatError, match="short"):
        unpack(buf[:20])
    with pytest.raises(IndexFormatError):
        unpack(buf + b"\0")


def test_repacked_corruption_passes_crc_but_breaks_cycle(desk_index):
    meta, sections = unpack_sections(pack(desk_index))
    vals = desk_index.psi_range(0, 1, 10)
    vals[0], vals[1] = vals[1], vals[0]
    sections = dict(sections, psi_s=PsiSegment.build(vals, "compressed", 4).to_bytes())
    idx, _ = unpack(pack_sections(meta, sections))
    assert idx.check_cyclic() == [1, 2]
