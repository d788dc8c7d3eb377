"""Versioned binary index file.

Layout (all integers little-endian):

    magic "RDFCSA1\\0" | version u16 | flags u16 | n, n_s, n_p, n_o u64 |
    t_psi u32 | section count u16 | (offset u64, length u64) per section |
    sections ... | CRC-32 of the section bytes u32

flags: bits 0-1 build mode, bit 2 dictionary present, bit 3 rank/select
directories embedded (otherwise rebuilt on load).
"""

import struct
import zlib

import numpy as np

from .bitvector import BitVector
from .core import BUILD_MODES, Rdfcsa
from .dictionary import Dictionary
from .psi import PsiSegment

MAGIC = b"RDFCSA1\0"
VERSION = 1
SECTIONS = ("dictionary", "D_s", "D_p_select", "D_p_rank", "D_o",
            "psi_s", "psi_p", "psi_o", "ids_s", "ids_p", "ids_o")

FLAG_DICTIONARY = 1 << 2
FLAG_DIRECTORIES = 1 << 3

_HEAD = struct.Struct("<8sHH4QIH")
_ENTRY = struct.Struct("<QQ")
_TRAILER = struct.Struct("<I")


class IndexFormatError(ValueError):
    pass


class ChecksumError(IndexFormatError):
    pass


def header_size():
    return _HEAD.size + _ENTRY.size * len(SECTIONS)


# -- bitvectors -------------------------------------------------------------------


def _bitvector_bytes(bv, directories):
    if bv is None:
        return b""
    words = bv.words()
    out = [struct.pack("<QB", bv.len, 1 if directories else 0),
           words.astype("<u4").tobytes()]
    if directories:
        sb, blocks = bv.directory()
        out.append(struct.pack("<I", len(sb)))
        out.append(sb.astype("<u4").tobytes())
        out.append(blocks.tobytes())
    return b"".join(out)


def _bitvector_from(buf, with_select=True):
    if not buf:
        return None
    length, has_dir = struct.unpack_from("<QB", buf, 0)
    off = 9
    nwords = max(1, -(-length // 32))
    words = np.frombuffer(buf, dtype="<u4", count=nwords, offset=off)
    off += 4 * nwords
    directory = None
    if has_dir:
        (n_sb,) = struct.unpack_from("<I", buf, off)
        off += 4
        sb = np.frombuffer(buf, dtype="<u4", count=n_sb, offset=off)
        off += 4 * n_sb
        blocks = np.frombuffer(buf, dtype=np.uint8, count=n_sb * 8, offset=off)
        directory = (sb, blocks)
    return BitVector.from_words(words, length, with_select=with_select, directory=directory)


# -- whole index ------------------------------------------------------------------


def encode_sections(idx, dictionary=None, directories=True):
    """Section name -> bytes for an index."""
    d_s, d_p, d_o = idx.d
    sel = np.asarray(idx.d_p_select, dtype="<u4")
    return {
        "dictionary": dictionary.to_bytes() if dictionary is not None else b"",
        "D_s": _bitvector_bytes(d_s, directories),
        "D_p_select": struct.pack("<I", len(sel)) + sel.tobytes(),
        "D_p_rank": _bitvector_bytes(d_p, directories),
        "D_o": _bitvector_bytes(d_o, directories),
        "psi_s": idx.segments[0].to_bytes(),
        "psi_p": idx.segments[1].to_bytes(),
        "psi_o": idx.segments[2].to_bytes(),
        "ids_s": _bitvector_bytes(idx.present[0], directories),
        "ids_p": _bitvector_bytes(idx.present[1], directories),
        "ids_o": _bitvector_bytes(idx.present[2], directories),
    }


def pack(idx, dictionary=None, directories=True):
    """Complete file contents as bytes."""
    sections = encode_sections(idx, dictionary, directories)
    flags = BUILD_MODES.index(idx.mode)
    if dictionary is not None:
        flags |= FLAG_DICTIONARY
    if directories:
        flags |= FLAG_DIRECTORIES
    meta = dict(flags=flags, n=idx.n, n_s=idx.n_s, n_p=idx.n_p, n_o=idx.n_o, t_psi=idx.t_psi)
    return pack_sections(meta, sections)


def pack_sections(meta, sections):
    off = header_size()
    table = []
    body = []
    for name in SECTIONS:
        raw = sections[name]
        table.append(_ENTRY.pack(off, len(raw)))
        body.append(raw)
        off += len(raw)
    payload = b"".join(body)
    head = _HEAD.pack(MAGIC, VERSION, meta["flags"], meta["n"], meta["n_s"], meta["n_p"],
                      meta["n_o"], meta["t_psi"], len(SECTIONS))
    return head + b"".join(table) + payload + _TRAILER.pack(zlib.crc32(payload))


def unpack_sections(buf, check=True):
    """(meta, {name: bytes}) after validating structure and CRC."""
    if len(buf) < header_size() + _TRAILER.size:
        raise IndexFormatError("file too short for an index header")
    magic, version, flags, n, n_s, n_p, n_o, t_psi, count = _HEAD.unpack_from(buf, 0)
    if magic != MAGIC:
        raise IndexFormatError("bad magic bytes")
    if version != VERSION:
        raise IndexFormatError(f"unsupported format version {version}")
    if count != len(SECTIONS):
        raise IndexFormatError(f"expected {len(SECTIONS)} sections, found {count}")
    end = len(buf) - _TRAILER.size
    sections = {}
    prev_end = header_size()
    for k, name in enumerate(SECTIONS):
        off, length = _ENTRY.unpack_from(buf, _HEAD.size + k * _ENTRY.size)
        if off < prev_end or off + length > end:
            raise IndexFormatError(f"section {name} overlaps or lies outside the file")
        sections[name] = buf[off:off + length]
        prev_end = off + length
    if prev_end != end:
        raise IndexFormatError("unaccounted bytes between sections and trailer")
    (crc,) = _TRAILER.unpack_from(buf, end)
    if check and zlib.crc32(buf[header_size():end]) != crc:
        raise ChecksumError("section checksum mismatch")
    if flags & 3 >= len(BUILD_MODES):
        raise IndexFormatError("bad build mode flag")
    meta = dict(flags=flags, n=n, n_s=n_s, n_p=n_p, n_o=n_o, t_psi=t_psi)
    return meta, sections


def unpack(buf, check=True):
    """(Rdfcsa, Dictionary or None) from file contents."""
    meta, sec = unpack_sections(bytes(buf), check)
    try:
        d_s = _bitvector_from(sec["D_s"])
        d_p = _bitvector_from(sec["D_p_rank"], with_select=False)
        d_o = _bitvector_from(sec["D_o"])
        segs = [PsiSegment.from_bytes(sec[name]) for name in ("psi_s", "psi_p", "psi_o")]
        present = [_bitvector_from(sec[name]) for name in ("ids_s", "ids_p", "ids_o")]
        (k,) = struct.unpack_from("<I", sec["D_p_select"], 0)
        sel = np.frombuffer(sec["D_p_select"], dtype="<u4", count=k, offset=4)
    except (struct.error, ValueError) as exc:
        raise IndexFormatError(f"malformed section: {exc}") from exc
    n = meta["n"]
    if any(bv is None or bv.len != n for bv in (d_s, d_p, d_o)) or any(s.n != n for s in segs):
        raise IndexFormatError("section lengths disagree with n")
    idx = Rdfcsa(n, meta["n_s"], meta["n_p"], meta["n_o"], d_s, d_p, d_o, *segs,
                 present=present, t_psi=meta["t_psi"], mode=BUILD_MODES[meta["flags"] & 3])
    if not np.array_equal(idx.d_p_select, sel.astype(np.int64)):
        raise IndexFormatError("D_p select array disagrees with D_p")
    dictionary = Dictionary.from_bytes(sec["dictionary"]) if meta["flags"] & FLAG_DICTIONARY else None
    return idx, dictionary


def write_index(path, idx, dictionary=None, directories=True):
    data = pack(idx, dictionary, directories)
    with open(path, "wb") as fh:
        fh.write(data)
    return len(data)


def read_index(path, check=True):
    with open(path, "rb") as fh:
        return unpack(fh.read(), check)


def section_sizes(buf):
    """name -> byte length, plus 'header' and 'trailer'."""
    _, sec = unpack_sections(bytes(buf), check=False)
    sizes = {name: len(raw) for name, raw in sec.items()}
    sizes["header"] = header_size()
    sizes["trailer"] = _TRAILER.size
    return sizes
