"""Plain bitmaps with rank/select directories.

Positions are 1-indexed in every public method: ``rank1(i)`` counts ones in
``B[1..i]``, ``select1(j)`` returns the position of the j-th one.

Layout: bits are packed LSB-first into 32-bit words.  Superblock counters
(32-bit) hold the number of ones before each 256-bit superblock, block
counters (8-bit) hold the ones between the start of the enclosing superblock
and the start of each 32-bit block.  A block counter is read at block start,
so it never exceeds 7 * 32 = 224 and fits a byte.
"""

from array import array
from bisect import bisect_right

import numpy as np

SUPERBLOCK = 256
BLOCK = 32
BLOCKS_PER_SUPERBLOCK = SUPERBLOCK // BLOCK
SAMPLE_RATE = 256

BYTE_POPCOUNT = [bin(b).count("1") for b in range(256)]
# BYTE_SELECT[b * 8 + k]: offset (0..7) of the (k+1)-th set bit of byte b.
BYTE_SELECT = [0] * (256 * 8)
for _b in range(256):
    _k = 0
    for _off in range(8):
        if _b >> _off & 1:
            BYTE_SELECT[_b * 8 + _k] = _off
            _k += 1
# PREFIX_MASK[k]: bits 0..k set.
PREFIX_MASK = [(2 << k) - 1 for k in range(32)]


class SelectSampler:
    """Positions of every 256th one, used to narrow the select search."""

    def __init__(self, bv):
        self.ones_count = bv.ones
        ones_pos = np.flatnonzero(bv.to_numpy()) + 1
        sampled = ones_pos[SAMPLE_RATE - 1 :: SAMPLE_RATE]
        # sones[k] = position of the (256k)-th one; sones[0] = 0 as lower fence
        self.sones = array("I", [0])
        self.sones.extend(int(p) for p in sampled)

    def overhead_bits(self):
        return 32 * len(self.sones)


class BitVector:
    """Immutable bitmap supporting rank1, select1 and selectnext1.

    >>> bv = BitVector([1, 0, 1, 1, 0, 1, 0, 0])
    >>> bv.rank1(4), bv.select1(2), bv.selectnext1(1)
    (3, 3, 3)
    """

    def __init__(self, bits=(), with_select=True):
        bits = np.asarray(bits, dtype=np.uint8).ravel()
        if bits.size and bits.max() > 1:
            raise ValueError("bits must be 0 or 1")
        self._init_words(_pack_words(bits), int(bits.size), with_select)

    @classmethod
    def from_positions(cls, positions, length, with_select=True):
        """Bitmap of ``length`` bits with ones at the given 1-based positions."""
        bits = np.zeros(length, dtype=np.uint8)
        pos = np.asarray(list(positions) if not isinstance(positions, np.ndarray) else positions,
                         dtype=np.int64)
        if pos.size:
            if pos.min() < 1 or pos.max() > length:
                raise ValueError("position outside [1, length]")
            bits[pos - 1] = 1
        return cls(bits, with_select=with_select)

    @classmethod
    def from_words(cls, words, length, with_select=True, directory=None):
        """Rebuild from packed 32-bit words, optionally with stored counters."""
        self = cls.__new__(cls)
        self._init_words(np.asarray(words, dtype=np.uint32), int(length), with_select, directory)
        return self

    def _init_words(self, words, length, with_select, directory=None):
        self.len = length
        n_sb = max(1, -(-length // SUPERBLOCK))
        padded = np.zeros(n_sb * BLOCKS_PER_SUPERBLOCK, dtype=np.uint32)
        padded[: words.size] = words
        if length % BLOCK and words.size:
            padded[(length - 1) // BLOCK] &= np.uint32((1 << (length % BLOCK)) - 1)
        self._nwords = max(1, -(-length // BLOCK))
        if directory is None:
            counts = _popcount32(padded).reshape(n_sb, BLOCKS_PER_SUPERBLOCK)
            per_sb = counts.sum(axis=1)
            superblocks = np.concatenate(([0], np.cumsum(per_sb)[:-1])).astype(np.uint32)
            blocks = (np.cumsum(counts, axis=1) - counts).astype(np.uint8).ravel()
            ones = int(per_sb.sum())
        else:
            superblocks, blocks = directory
            superblocks = np.asarray(superblocks, dtype=np.uint32)
            blocks = np.asarray(blocks, dtype=np.uint8)
            if superblocks.size != n_sb or blocks.size != padded.size:
                raise ValueError("directory does not match bitmap length")
            ones = int(superblocks[-1]) + int(_popcount32(padded[-BLOCKS_PER_SUPERBLOCK:]).sum())
        self._words = array("I", padded.tolist())
        self._superblocks = array("I", superblocks.tolist())
        self._blocks = array("B", blocks.tolist())
        self.ones = ones
        self.sampler = SelectSampler(self) if with_select else None

    def __len__(self):
        return self.len

    def __getitem__(self, i):
        if not 1 <= i <= self.len:
            raise IndexError(f"position {i} outside [1, {self.len}]")
        q = i - 1
        return self._words[q >> 5] >> (q & 31) & 1

    def to_numpy(self):
        """Bits as a uint8 array (0-indexed)."""
        raw = np.frombuffer(np.asarray(self._words, dtype="<u4").tobytes(), dtype=np.uint8)
        return np.unpackbits(raw, bitorder="little")[: self.len]

    def rank1(self, i):
        """Number of ones in positions 1..i."""
        if i <= 0:
            if i == 0:
                return 0
            raise IndexError(f"rank position {i} is negative")
        if i > self.len:
            raise IndexError(f"rank position {i} exceeds length {self.len}")
        q = i - 1
        w = q >> 5
        u = self._words[w] & PREFIX_MASK[q & 31]
        return (self._superblocks[q >> 8] + self._blocks[w]
                + BYTE_POPCOUNT[u & 255] + BYTE_POPCOUNT[u >> 8 & 255]
                + BYTE_POPCOUNT[u >> 16 & 255] + BYTE_POPCOUNT[u >> 24])

    def select1(self, j):
        """Position of the j-th one."""
        if not 1 <= j <= self.ones:
            raise IndexError(f"select ordinal {j} outside [1, {self.ones}]")
        sb = self._superblocks
        sampler = self.sampler
        if sampler is None:
            lo, hi = 0, len(sb) - 1
        else:
            k = j // SAMPLE_RATE
            sones = sampler.sones
            if j % SAMPLE_RATE == 0:
                return sones[k]
            lo = (sones[k] - 1) >> 8 if k else 0
            hi = (sones[k + 1] - 1) >> 8 if k + 1 < len(sones) else len(sb) - 1
        # last superblock in [lo, hi] with fewer than j ones before it
        while lo < hi:
            mid = (lo + hi + 1) >> 1
            if sb[mid] < j:
                lo = mid
            else:
                hi = mid - 1
        remaining = j - sb[lo]
        blocks = self._blocks
        b = lo * BLOCKS_PER_SUPERBLOCK
        last = b + BLOCKS_PER_SUPERBLOCK - 1
        while b < last and blocks[b + 1] < remaining:
            b += 1
        return self._select_in_word(b, remaining - blocks[b])

    def _select_in_word(self, w, k):
        """Position of the k-th one inside word w (k >= 1, known to exist)."""
        u = self._words[w]
        base = w * BLOCK
        for shift in (0, 8, 16, 24):
            byte = u >> shift & 255
            c = BYTE_POPCOUNT[byte]
            if k <= c:
                return base + shift + BYTE_SELECT[byte * 8 + k - 1] + 1
            k -= c
        raise AssertionError("select ran past the end of a word")

    def selectnext1(self, j):
        """Smallest position p > j holding a one, or None (j = 0 finds the first)."""
        if not 0 <= j <= self.len:
            raise IndexError(f"position {j} outside [0, {self.len}]")
        if j == self.len:
            return None
        words = self._words
        w = j >> 5
        off = j & 31
        # bytewise through the rest of the current block
        u = words[w] >> off << off
        if u:
            return self._first_in_word(w, u)
        # wordwise through the rest of the current superblock
        w += 1
        end = -(-w // BLOCKS_PER_SUPERBLOCK) * BLOCKS_PER_SUPERBLOCK
        while w < end:
            if words[w]:
                return self._first_in_word(w, words[w])
            w += 1
        s = w // BLOCKS_PER_SUPERBLOCK
        sb = self._superblocks
        if s >= len(sb):
            return None
        before = sb[s]
        if before >= self.ones:
            return None
        # superblock holding the (before+1)-th one: last one with count == before
        nxt = s + 1
        if nxt < len(sb) and sb[nxt] == before:
            s = bisect_right(sb, before, nxt) - 1
        w = s * BLOCKS_PER_SUPERBLOCK
        while not words[w]:
            w += 1
        return self._first_in_word(w, words[w])

    @staticmethod
    def _first_in_word(w, u):
        base = w * BLOCK
        for shift in (0, 8, 16, 24):
            byte = u >> shift & 255
            if byte:
                return base + shift + BYTE_SELECT[byte * 8] + 1
        raise AssertionError("empty word")

    def directory_bits(self):
        """Bits spent on rank counters (superblocks + blocks)."""
        return 32 * len(self._superblocks) + 8 * len(self._blocks)

    def words(self):
        return np.asarray(self._words[: self._nwords], dtype=np.uint32)

    def directory(self):
        return (np.asarray(self._superblocks, dtype=np.uint32),
                np.asarray(self._blocks, dtype=np.uint8))

    def __eq__(self, other):
        return (isinstance(other, BitVector) and self.len == other.len
                and self._words == other._words)

    def __repr__(self):
        return f"BitVector(len={self.len}, ones={self.ones})"


def _pack_words(bits):
    if bits.size == 0:
        return np.zeros(0, dtype=np.uint32)
    packed = np.packbits(bits, bitorder="little")
    pad = (-packed.size) % 4
    if pad:
        packed = np.concatenate((packed, np.zeros(pad, dtype=np.uint8)))
    return packed.view("<u4").astype(np.uint32)


def _popcount32(words):
    as_bytes = words.astype("<u4").view(np.uint8).reshape(-1, 4)
    table = np.array(BYTE_POPCOUNT, dtype=np.int64)
    return table[as_bytes].sum(axis=1)
