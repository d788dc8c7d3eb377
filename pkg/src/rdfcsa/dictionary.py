"""Four-set term dictionary (SO, S, P, O) and dataset ingestion.

Terms that occur both as subject and object form SO and take ids
[1, |SO|] in both roles.  Subject-only terms take [|SO|+1, |SO|+|S|],
object-only terms [|SO|+1, |SO|+|O|], predicates [1, |P|].  Each set is
sorted bytewise (UTF-8).
"""

import re
import struct
from bisect import bisect_left

from .core import O, P, S, TripleSet, role_of


class IngestError(ValueError):
    """Malformed input; carries the 1-based line number."""

    def __init__(self, line_no, message):
        super().__init__(f"line {line_no}: {message}" if line_no else message)
        self.line_no = line_no


def _sort_key(term):
    return term.encode("utf-8")


class Dictionary:
    def __init__(self, so_terms, s_terms, p_terms, o_terms):
        self.so_terms = list(so_terms)
        self.s_terms = list(s_terms)
        self.p_terms = list(p_terms)
        self.o_terms = list(o_terms)
        self._keys = [[_sort_key(t) for t in ts]
                      for ts in (self.so_terms, self.s_terms, self.p_terms, self.o_terms)]

    @classmethod
    def from_terms(cls, subjects, predicates, objects):
        subjects, objects = set(subjects), set(objects)
        so = subjects & objects
        srt = lambda ts: sorted(ts, key=_sort_key)  # noqa: E731
        return cls(srt(so), srt(subjects - so), srt(set(predicates)), srt(objects - so))

    @property
    def n_so(self):
        return len(self.so_terms)

    @property
    def n_s(self):
        return len(self.so_terms) + len(self.s_terms)

    @property
    def n_p(self):
        return len(self.p_terms)

    @property
    def n_o(self):
        return len(self.so_terms) + len(self.o_terms)

    def size(self, role):
        return (self.n_s, self.n_p, self.n_o)[role_of(role)]

    @staticmethod
    def _find(terms, keys, term):
        key = _sort_key(term)
        k = bisect_left(keys, key)
        return k if k < len(keys) and keys[k] == key else None

    def encode(self, term, role):
        """Id of ``term`` in ``role``, or None when the term is unknown there."""
        role = role_of(role)
        if role == P:
            k = self._find(self.p_terms, self._keys[2], term)
            return None if k is None else k + 1
        k = self._find(self.so_terms, self._keys[0], term)
        if k is not None:
            return k + 1
        own = 1 if role == S else 3
        terms = self.s_terms if role == S else self.o_terms
        k = self._find(terms, self._keys[own], term)
        return None if k is None else self.n_so + k + 1

    def decode(self, ident, role):
        role = role_of(role)
        if not 1 <= ident <= self.size(role):
            raise IndexError(f"id {ident} outside [1, {self.size(role)}] for role {'SPO'[role]}")
        if role == P:
            return self.p_terms[ident - 1]
        if ident <= self.n_so:
            return self.so_terms[ident - 1]
        return (self.s_terms if role == S else self.o_terms)[ident - self.n_so - 1]

    def encode_triple(self, s, p, o):
        return self.encode(s, S), self.encode(p, P), self.encode(o, O)

    def decode_triple(self, triple):
        return tuple(self.decode(v, r) for r, v in zip((S, P, O), triple))

    def __eq__(self, other):
        return (isinstance(other, Dictionary) and self.so_terms == other.so_terms
                and self.s_terms == other.s_terms and self.p_terms == other.p_terms
                and self.o_terms == other.o_terms)

    # -- serialization --------------------------------------------------------

    def to_bytes(self):
        """Four u64 counts, then four blocks of u32 length-prefixed UTF-8 terms."""
        sets = (self.so_terms, self.s_terms, self.p_terms, self.o_terms)
        out = [struct.pack("<4Q", *(len(ts) for ts in sets))]
        for ts in sets:
            for t in ts:
                raw = t.encode("utf-8")
                out.append(struct.pack("<I", len(raw)))
                out.append(raw)
        return b"".join(out)

    @classmethod
    def from_bytes(cls, buf):
        counts = struct.unpack_from("<4Q", buf, 0)
        off = 32
        sets = []
        for c in counts:
            ts = []
            for _ in range(c):
                (ln,) = struct.unpack_from("<I", buf, off)
                off += 4
                ts.append(bytes(buf[off:off + ln]).decode("utf-8"))
                off += ln
            sets.append(ts)
        return cls(*sets)


def dict_build(raw_triples):
    """(Dictionary, TripleSet) from an iterable of (s, p, o) term triples."""
    raw = [tuple(t) for t in raw_triples]
    if not raw:
        raise IngestError(None, "no triples in input")
    d = Dictionary.from_terms((t[0] for t in raw), (t[1] for t in raw), (t[2] for t in raw))
    ids = [d.encode_triple(*t) for t in raw]
    return d, TripleSet.from_triples(ids, d.n_s, d.n_p, d.n_o)


# -- readers ----------------------------------------------------------------------


def read_tsv(lines):
    """Triples from tab-separated lines; blank lines are skipped."""
    for no, line in enumerate(lines, 1):
        line = line.rstrip("\r\n")
        if not line.strip():
            continue
        fields = line.split("\t")
        if len(fields) != 3 or not all(fields):
            raise IngestError(no, f"expected three nonempty tab-separated fields, got {len(fields)}")
        yield tuple(fields)


_NT_TERM = r'(<[^>\s]*>|_:\S+|"(?:[^"\\]|\\.)*"(?:@[A-Za-z0-9-]+|\^\^<[^>\s]*>)?)'
_NT_LINE = re.compile(rf"^\s*{_NT_TERM}\s+{_NT_TERM}\s+{_NT_TERM}\s*\.\s*$")


def read_ntriples(lines):
    """Reduced N-Triples: IRIs, blank nodes and literals, one triple per line.

    Terms are kept verbatim.  Comment and blank lines are skipped.
    """
    for no, line in enumerate(lines, 1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        m = _NT_LINE.match(stripped)
        if not m:
            raise IngestError(no, "not a subject/predicate/object line ending in ' .'")
        yield m.group(1), m.group(2), m.group(3)


READERS = {"tsv": read_tsv, "ntriples-subset": read_ntriples}


def load(path, fmt="tsv"):
    """(Dictionary, TripleSet) for a file in one of ``READERS``."""
    with open(path, encoding="utf-8") as fh:
        return dict_build(READERS[fmt](fh))
