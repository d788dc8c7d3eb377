"""Index construction and the self-index layout.

Triples are sorted in SPO order, shifted into disjoint alphabets and
concatenated into T[1, 3n].  The suffix array of T yields three regions of
length n (subjects, predicates, objects); D marks symbol changes and Psi maps
each position to the position of the next component.  Psi on the object
region is redirected to the subject of the same triple, so that following
Psi three times returns to the start.  Only D and Psi are kept.
"""

import logging
from dataclasses import dataclass
from functools import cmp_to_key

import numpy as np

from .bitvector import BitVector
from .psi import COMPRESSED, PLAIN, PsiSegment

log = logging.getLogger(__name__)

S, P, O = 0, 1, 2
ROLES = (S, P, O)
ROLE_NAMES = "SPO"

COMPRESSED_MODE = "compressed"
HYBRID_MODE = "hybrid"
ADAPTIVE_MODE = "adaptive"
BUILD_MODES = (COMPRESSED_MODE, HYBRID_MODE, ADAPTIVE_MODE)
ADAPTIVE_THRESHOLD = 0.85


class BuildError(ValueError):
    pass


def role_of(name):
    """'S'/'P'/'O' (any case) or an int role -> int role."""
    if isinstance(name, str):
        return ROLE_NAMES.index(name.upper())
    if name in ROLES:
        return name
    raise ValueError(f"unknown role {name!r}")


@dataclass
class TripleSet:
    """Deduplicated integer triples with declared alphabet sizes."""

    triples: np.ndarray
    n_s: int
    n_p: int
    n_o: int
    duplicates_removed: int = 0

    @classmethod
    def from_triples(cls, triples, n_s=None, n_p=None, n_o=None):
        arr = np.asarray(list(triples) if not isinstance(triples, np.ndarray) else triples,
                         dtype=np.int64)
        if arr.size == 0:
            raise BuildError("triple set is empty")
        arr = arr.reshape(-1, 3)
        if arr.min() < 1:
            raise BuildError("triple components must be >= 1")
        maxima = arr.max(axis=0)
        sizes = []
        for declared, seen, name in zip((n_s, n_p, n_o), maxima, ("n_s", "n_p", "n_o")):
            if declared is None:
                declared = int(seen)
            elif seen > declared:
                raise BuildError(f"component value {int(seen)} exceeds {name}={declared}")
            sizes.append(int(declared))
        uniq = np.unique(arr, axis=0)
        return cls(uniq, *sizes, duplicates_removed=len(arr) - len(uniq))

    @property
    def n(self):
        return len(self.triples)

    @property
    def gaps(self):
        return (0, self.n_s, self.n_s + self.n_p)

    def as_tuples(self):
        return [tuple(int(x) for x in row) for row in self.triples]


def build_text(ts):
    """T[1, 3n] as a 0-indexed int64 array (gaps already added)."""
    return (ts.triples + np.asarray(ts.gaps, dtype=np.int64)).ravel()


def suffix_array(text):
    """Suffix array (0-based starts) of ``text`` by prefix doubling.

    ``text`` must end with a unique maximal sentinel so no suffix is a
    prefix of another.
    """
    text = np.asarray(text, dtype=np.int64)
    m = text.size
    _, rank = np.unique(text, return_inverse=True)
    rank = rank.astype(np.int64)
    k = 1
    while True:
        second = np.full(m, -1, dtype=np.int64)
        if k < m:
            second[: m - k] = rank[k:]
        order = np.lexsort((second, rank))
        r1, r2 = rank[order], second[order]
        new_group = np.empty(m, dtype=bool)
        new_group[0] = True
        new_group[1:] = (r1[1:] != r1[:-1]) | (r2[1:] != r2[:-1])
        new_rank = np.empty(m, dtype=np.int64)
        new_rank[order] = np.cumsum(new_group) - 1
        rank = new_rank
        if new_group.all():
            return order
        k <<= 1


def suffix_array_reference(text):
    """Comparison sort of all suffixes; slow, independent cross-check."""
    text = [int(x) for x in text]
    m = len(text)

    def cmp(a, b):
        while a < m and b < m:
            if text[a] != text[b]:
                return -1 if text[a] < text[b] else 1
            a += 1
            b += 1
        return (a < m) - (b < m)

    return np.asarray(sorted(range(m), key=cmp_to_key(cmp)), dtype=np.int64)


@dataclass
class Construction:
    """Intermediate arrays of a build, in global 1-based coordinates.

    Only used for inspection and tests; ``Rdfcsa`` keeps none of it.
    """

    text: np.ndarray      # T[1..3n] at index 0..3n-1
    sa: np.ndarray        # A[1..3n] as 1-based text positions
    d: np.ndarray         # D[1..3n] bits
    psi_orig: np.ndarray  # Psi before the circular fix, 1-based targets
    psi: np.ndarray       # Psi after the circular fix


def construct(ts, sa_builder=suffix_array):
    """Run steps (1)-(7) of the build and return the global arrays."""
    n = ts.n
    text = build_text(ts)
    sentinel = ts.n_s + ts.n_p + ts.n_o + 1
    sa0 = sa_builder(np.concatenate((text, [sentinel])))
    if sa0[-1] != 3 * n:
        raise BuildError("sentinel suffix did not sort last")
    sa = sa0[:-1] + 1
    inv = np.empty(3 * n + 2, dtype=np.int64)
    inv[sa] = np.arange(1, 3 * n + 1)
    nxt = sa + 1
    nxt[nxt > 3 * n] = 1
    psi_orig = inv[nxt]
    lead = text[sa - 1]
    d = np.ones(3 * n, dtype=np.uint8)
    d[1:] = lead[1:] != lead[:-1]
    psi = psi_orig.copy()
    obj = psi[2 * n:]
    psi[2 * n:] = np.where(obj == 1, n, obj - 1)
    return Construction(text, sa, d, psi_orig, psi)


class Rdfcsa:
    """The self-index: per-region D bitmaps and Psi segments.

    Region coordinates are 1-based positions in [1, n].  ``psi(S, i)`` maps a
    subject position to a predicate position, ``psi(P, j)`` a predicate
    position to an object position and ``psi(O, k)`` back to the subject.
    """

    def __init__(self, n, n_s, n_p, n_o, d_s, d_p, d_o, psi_s, psi_p, psi_o,
                 present=(None, None, None), t_psi=32, mode=COMPRESSED_MODE):
        self.n, self.n_s, self.n_p, self.n_o = n, n_s, n_p, n_o
        self.gaps = (0, n_s, n_s + n_p)
        self.t_psi = t_psi
        self.mode = mode
        self.d = (d_s, d_p, d_o)
        self.d_p_select = np.flatnonzero(d_p.to_numpy()).astype(np.int64) + 1
        self._dp_sel = [int(x) for x in self.d_p_select]
        self.segments = (psi_s, psi_p, psi_o)
        # present[r]: bitmap over ids of role r, or None when every id occurs
        self.present = tuple(present)
        self.alphabet = (n_s, n_p, n_o)

    # -- construction ---------------------------------------------------------

    @classmethod
    def build(cls, ts, mode=COMPRESSED_MODE, t_psi=32, sa_builder=suffix_array):
        if mode not in BUILD_MODES:
            raise BuildError(f"unknown build mode {mode!r}")
        if ts.n == 0:
            raise BuildError("cannot index an empty triple set")
        c = construct(ts, sa_builder)
        n = ts.n
        psi = c.psi
        regions = (psi[:n] - n, psi[n:2 * n] - 2 * n, psi[2 * n:])
        for r, vals in zip(ROLES, regions):
            if vals.min() < 1 or vals.max() > n:
                raise BuildError(f"Psi region {ROLE_NAMES[r]} escaped its target range")
        ds = [BitVector(c.d[r * n:(r + 1) * n], with_select=(r != P)) for r in ROLES]
        segs = [_encode_segment(vals, r, mode, t_psi) for r, vals in zip(ROLES, regions)]
        present = []
        for r, size in zip(ROLES, (ts.n_s, ts.n_p, ts.n_o)):
            ids = np.unique(ts.triples[:, r])
            present.append(None if len(ids) == size else BitVector.from_positions(ids, size))
        return cls(n, ts.n_s, ts.n_p, ts.n_o, *ds, *segs, present=present,
                   t_psi=t_psi, mode=mode)

    # -- primitive access -----------------------------------------------------

    def psi(self, role, i):
        return self.segments[role].access(i)

    def psi_range(self, role, l, r):
        return self.segments[role].decode_range(l, r)

    def id_of_rank(self, role, k):
        """k-th distinct id occurring in ``role``."""
        pres = self.present[role]
        return k if pres is None else pres.select1(k)

    def rank_of_id(self, role, ident):
        """Ordinal of ``ident`` among the ids occurring in ``role``, or None."""
        if not 1 <= ident <= self.alphabet[role]:
            return None
        pres = self.present[role]
        if pres is None:
            return ident
        return pres.rank1(ident) if pres[ident] else None

    def symbol(self, role, i):
        """Id of the component stored at region position i."""
        return self.id_of_rank(role, self.d[role].rank1(i))

    def distinct(self, role):
        return self.d[role].ones

    def symbol_range(self, role, ident):
        """(l, r) region interval holding ``ident``, or None if absent."""
        k = self.rank_of_id(role, ident)
        if k is None:
            return None
        if role == P:
            sel = self._dp_sel
            if k > len(sel):
                return None
            l = sel[k - 1]
            r = sel[k] - 1 if k < len(sel) else self.n
            return l, r
        d = self.d[role]
        if k > d.ones:
            return None
        l = d.select1(k)
        nxt = d.selectnext1(l)
        return l, (self.n if nxt is None else nxt - 1)

    # -- extraction -----------------------------------------------------------

    def extract_triple(self, i):
        """The i-th triple in SPO order (i is a subject-region position)."""
        if not 1 <= i <= self.n:
            raise IndexError(f"triple position {i} outside [1, {self.n}]")
        s = self.symbol(S, i)
        j = self.psi(S, i)
        p = self.symbol(P, j)
        k = self.psi(P, j)
        return s, p, self.symbol(O, k)

    def symbols(self, role):
        """Ids of every position of a region, as a numpy array."""
        ranks = np.cumsum(self.d[role].to_numpy(), dtype=np.int64)
        pres = self.present[role]
        if pres is None:
            return ranks
        ids = np.flatnonzero(pres.to_numpy()) + 1
        return ids[ranks - 1]

    def extract_all(self):
        """All triples in SPO order, from one sequential decode of Psi_s and Psi_p."""
        a = np.asarray(self.psi_range(S, 1, self.n), dtype=np.int64)
        b = np.asarray(self.psi_range(P, 1, self.n), dtype=np.int64)
        s = self.symbols(S)
        p = self.symbols(P)[a - 1]
        o = self.symbols(O)[b[a - 1] - 1]
        return list(zip(s.tolist(), p.tolist(), o.tolist()))

    # -- checks ---------------------------------------------------------------

    def check_cyclic(self):
        """Positions i with psi_o[psi_p[psi_s[i]]] != i (empty when sound)."""
        n = self.n
        a = np.asarray(self.psi_range(S, 1, n))
        b = np.asarray(self.psi_range(P, 1, n))
        c = np.asarray(self.psi_range(O, 1, n))
        for arr in (a, b, c):
            if arr.min() < 1 or arr.max() > n:
                return [int(i) + 1 for i in np.flatnonzero((arr < 1) | (arr > n))]
        back = c[b[a - 1] - 1]
        return [int(i) + 1 for i in np.flatnonzero(back != np.arange(1, n + 1))]

    def check_monotone(self):
        """(role, l, r) symbol intervals on which Psi is not strictly increasing."""
        bad = []
        for role in ROLES:
            vals = np.asarray(self.psi_range(role, 1, self.n))
            starts = np.flatnonzero(self.d[role].to_numpy())
            bounds = np.append(starts, self.n)
            rising = np.diff(vals) > 0
            for lo, hi in zip(bounds[:-1], bounds[1:]):
                if hi - lo > 1 and not rising[lo:hi - 1].all():
                    bad.append((role, int(lo) + 1, int(hi)))
        return bad

    def __repr__(self):
        return (f"Rdfcsa(n={self.n}, n_s={self.n_s}, n_p={self.n_p}, n_o={self.n_o}, "
                f"mode={self.mode!r}, t_psi={self.t_psi})")


def _encode_segment(values, role, mode, t_psi):
    if mode == HYBRID_MODE:
        return PsiSegment.build(values, PLAIN if role != P else COMPRESSED, t_psi)
    seg = PsiSegment.build(values, COMPRESSED, t_psi)
    if mode == ADAPTIVE_MODE:
        plain = PsiSegment.build(values, PLAIN, t_psi)
        if len(seg.to_bytes()) > ADAPTIVE_THRESHOLD * len(plain.to_bytes()):
            log.debug("region %s stored plain", ROLE_NAMES[role])
            return plain
    return seg


def build(ts, mode=COMPRESSED_MODE, t_psi=32):
    return Rdfcsa.build(ts, mode=mode, t_psi=t_psi)
