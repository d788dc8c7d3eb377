"""Storage for one Psi segment: compressed (sampled, gap/run tokens under a
canonical Huffman code) or plain (fixed-width packed entries).

Compressed layout: absolute values are sampled at positions 1 + k*t_psi.  The
gaps inside each sample period become tokens: RUN(l) for a maximal run of
l >= 2 gaps equal to +1, GAP(g) otherwise (g zig-zag mapped).  Runs never
cross a sample, so every sample is an independent decoding entry point.
Token values: GAP(g) -> 2*zigzag(g), RUN(l) -> 2*l + 1.

Frequent tokens get their own code.  The rest are written as an escape
symbol naming the token kind and the bit length b of its magnitude,
followed by the low b-1 bits of the magnitude.
"""

import heapq
import math
import struct
from collections import Counter

import numpy as np

COMPRESSED = "compressed"
PLAIN = "plain"
MODES = (COMPRESSED, PLAIN)
T_PSI_CHOICES = (4, 8, 16, 32, 64, 512)

MAX_SYMBOLS = 1024
MAX_CODE_LEN = 24
TABLE_BITS = 10
TABLE_ENTRY_BITS = 40          # u32 symbol + u8 length on the wire
_ESCAPE_WIRE = 0x80000000

# escape kinds: positive gap, non-positive gap, run
ESC_POS, ESC_NONPOS, ESC_RUN = 0, 1, 2


class PsiError(ValueError):
    pass


def zigzag(g):
    return 2 * g - 1 if g > 0 else -2 * g


def unzigzag(z):
    return (z + 1) >> 1 if z & 1 else -(z >> 1)


def escape_symbol(kind, bits):
    """Negative symbol id for an escape of ``kind`` with magnitude length ``bits``."""
    return -(1 + (kind << 6) + bits)


def split_escape(sym):
    code = -sym - 1
    return code >> 6, code & 63


def token_magnitude(tok):
    """(escape kind, magnitude >= 1) of a token."""
    if tok & 1:
        return ESC_RUN, tok >> 1
    g = unzigzag(tok >> 1)
    return (ESC_POS, g) if g > 0 else (ESC_NONPOS, 1 - g)


def token_from_magnitude(kind, m):
    if kind == ESC_RUN:
        return 2 * m + 1
    return 2 * zigzag(m if kind == ESC_POS else 1 - m)


def tokenize(values, t_psi):
    """Split ``values`` into samples and per-period token lists."""
    n = len(values)
    samples = []
    periods = []
    for start in range(0, n, t_psi):
        end = min(n, start + t_psi)
        samples.append(values[start])
        toks = []
        run = 0
        prev = values[start]
        for i in range(start + 1, end):
            v = values[i]
            g = v - prev
            prev = v
            if g == 1:
                run += 1
                continue
            if run:
                toks.append(2 * run + 1 if run > 1 else 2)
                run = 0
            toks.append(2 * zigzag(g))
        if run:
            toks.append(2 * run + 1 if run > 1 else 2)
        periods.append(toks)
    return samples, periods


def huffman_lengths(freqs, max_len=MAX_CODE_LEN):
    """Code lengths for ``{symbol: freq}``; ties broken by (freq, symbol).

    Lengths are limited to ``max_len`` by repeatedly flattening the
    frequencies, which keeps the construction deterministic.
    """
    if not freqs:
        return {}
    if len(freqs) == 1:
        return {next(iter(freqs)): 1}
    work = dict(freqs)
    while True:
        lengths = _tree_depths(work)
        if max(lengths.values()) <= max_len:
            return lengths
        work = {s: (f + 1) // 2 for s, f in work.items()}


def _tree_depths(freqs):
    heap = [(f, (0, s), s) for s, f in freqs.items()]
    heapq.heapify(heap)
    children = {}
    counter = 0
    while len(heap) > 1:
        f1, _, a = heapq.heappop(heap)
        f2, _, b = heapq.heappop(heap)
        node = ("node", counter)
        children[node] = (a, b)
        heapq.heappush(heap, (f1 + f2, (1, counter), node))
        counter += 1
    depths = {}
    stack = [(heap[0][2], 0)]
    while stack:
        node, d = stack.pop()
        if node in children:
            a, b = children[node]
            stack.append((a, d + 1))
            stack.append((b, d + 1))
        else:
            depths[node] = d
    return depths


def canonical_codes(lengths):
    """Assign canonical codes: sorted by (length, symbol), consecutive."""
    codes = {}
    code = 0
    prev_len = 0
    for sym, ln in sorted(lengths.items(), key=lambda kv: (kv[1], kv[0])):
        code <<= ln - prev_len
        codes[sym] = code
        code += 1
        prev_len = ln
    return codes


class PsiSegment:
    """One Psi array with 1-based ``access`` and ``decode_range``."""

    def __init__(self):
        raise TypeError("use PsiSegment.build or PsiSegment.from_bytes")

    @classmethod
    def build(cls, values, mode=COMPRESSED, t_psi=32):
        values = [int(v) for v in values]
        n = len(values)
        if n == 0:
            raise PsiError("Psi segment must be nonempty")
        lo, hi = min(values), max(values)
        if lo < 1 or hi > n:
            raise PsiError(f"Psi values must lie in [1, {n}], got [{lo}, {hi}]")
        if mode not in MODES:
            raise PsiError(f"unknown Psi mode {mode!r}")
        self = object.__new__(cls)
        self.mode = mode
        self.n = n
        if mode == PLAIN:
            self.t_psi = 0
            self.width = _plain_width(n)
            self._data = _pack_fixed([v - 1 for v in values], self.width)
            self._init_plain()
            return self
        if t_psi < 1:
            raise PsiError("t_psi must be positive")
        self.t_psi = int(t_psi)
        samples, periods = tokenize(values, self.t_psi)
        freq = Counter(t for toks in periods for t in toks)
        ranked = sorted(freq.items(), key=lambda kv: (-kv[1], kv[0]))
        # a table entry pays off once the raw bits it saves exceed its own size
        direct = [(t, f) for t, f in ranked
                  if f * token_magnitude(t)[1].bit_length() > TABLE_ENTRY_BITS][:MAX_SYMBOLS]
        coded = dict(direct)
        for t, f in ranked:
            if t not in coded:
                kind, m = token_magnitude(t)
                esc = escape_symbol(kind, m.bit_length())
                coded[esc] = coded.get(esc, 0) + f
        self.code_lengths = huffman_lengths(coded)
        codes = canonical_codes(self.code_lengths)
        parts = []
        offsets = []
        nbits = 0
        for toks in periods:
            offsets.append(nbits)
            for t in toks:
                if t in codes:
                    ln = self.code_lengths[t]
                    parts.append(format(codes[t], f"0{ln}b"))
                    nbits += ln
                    continue
                kind, m = token_magnitude(t)
                b = m.bit_length()
                esc = escape_symbol(kind, b)
                ln = self.code_lengths[esc]
                parts.append(format(codes[esc], f"0{ln}b"))
                nbits += ln
                if b > 1:
                    parts.append(format(m & ((1 << (b - 1)) - 1), f"0{b - 1}b"))
                    nbits += b - 1
        self.stream_bits = nbits
        bitstring = "".join(parts)
        nbytes = -(-nbits // 8)
        self._stream = (int(bitstring, 2) << (nbytes * 8 - nbits)).to_bytes(nbytes, "big") if nbits else b""
        self.samples = samples
        self.offsets = offsets
        self._init_decoder()
        return self

    # -- decoding -----------------------------------------------------------

    def _init_plain(self):
        self._padded = self._data + bytes(8)
        self._mask = (1 << self.width) - 1
        self._span = (self.width + 7 + 7) // 8

    def _init_decoder(self):
        self._padded = self._stream + bytes(8)
        lengths = self.code_lengths
        self._max_len = max(lengths.values(), default=0)
        self._peek_bits = min(self._max_len, TABLE_BITS) or 1
        # canonical tables
        self._syms_by_len = {}
        for sym, ln in sorted(lengths.items(), key=lambda kv: (kv[1], kv[0])):
            self._syms_by_len.setdefault(ln, []).append(sym)
        codes = canonical_codes(lengths)
        self._first_code = {ln: codes[syms[0]] for ln, syms in self._syms_by_len.items()}
        table = [None] * (1 << self._peek_bits)
        for sym, ln in lengths.items():
            if ln <= self._peek_bits:
                shift = self._peek_bits - ln
                base = codes[sym] << shift
                for k in range(1 << shift):
                    table[base + k] = (sym, ln)
        self._table = table

    def _peek(self, pos, k):
        start = pos >> 3
        end = (pos + k + 7) >> 3
        chunk = int.from_bytes(self._padded[start:end], "big")
        return (chunk >> ((end << 3) - pos - k)) & ((1 << k) - 1)

    def _next_token(self, pos):
        """Decode the token at bit ``pos``; returns (token, new_pos)."""
        hit = self._table[self._peek(pos, self._peek_bits)]
        if hit is None:
            window = self._peek(pos, self._max_len)
            for ln in range(self._peek_bits + 1, self._max_len + 1):
                syms = self._syms_by_len.get(ln)
                if not syms:
                    continue
                code = window >> (self._max_len - ln)
                idx = code - self._first_code[ln]
                if 0 <= idx < len(syms):
                    hit = (syms[idx], ln)
                    break
            else:
                raise PsiError(f"corrupt Psi stream at bit {pos}")
        sym, ln = hit
        pos += ln
        if sym < 0:
            kind, b = split_escape(sym)
            m = 1 << (b - 1)
            if b > 1:
                m |= self._peek(pos, b - 1)
                pos += b - 1
            sym = token_from_magnitude(kind, m)
        return sym, pos

    def access(self, i):
        """Psi value at 1-based position i."""
        if not 1 <= i <= self.n:
            raise IndexError(f"Psi position {i} outside [1, {self.n}]")
        if self.mode == PLAIN:
            bit = (i - 1) * self.width
            start = bit >> 3
            chunk = int.from_bytes(self._padded[start:start + self._span], "little")
            return (chunk >> (bit & 7) & self._mask) + 1
        k, skip = divmod(i - 1, self.t_psi)
        value = self.samples[k]
        pos = self.offsets[k]
        while skip:
            tok, pos = self._next_token(pos)
            if tok & 1:
                run = tok >> 1
                if run >= skip:
                    return value + skip
                value += run
                skip -= run
            else:
                value += unzigzag(tok >> 1)
                skip -= 1
        return value

    __getitem__ = access

    def decode_range(self, l, r):
        """[access(l), ..., access(r)]; empty when l > r."""
        if l > r:
            return []
        if not (1 <= l and r <= self.n):
            raise IndexError(f"Psi range [{l}, {r}] outside [1, {self.n}]")
        if self.mode == PLAIN:
            return [self.access(i) for i in range(l, r + 1)]
        t = self.t_psi
        out = []
        k, skip = divmod(l - 1, t)
        want = r - l + 1
        while True:
            value = self.samples[k]
            pos = self.offsets[k]
            left_in_period = min(t, self.n - k * t) - 1
            if skip == 0:
                out.append(value)
                if len(out) == want:
                    return out
            while left_in_period:
                tok, pos = self._next_token(pos)
                if tok & 1:
                    run = tok >> 1
                    left_in_period -= run
                    if skip > run:
                        skip -= run
                        value += run
                        continue
                    first = value + max(skip, 1)
                    take = min(value + run - first + 1, want - len(out))
                    out.extend(range(first, first + take))
                    value += run
                    skip = 0
                else:
                    value += unzigzag(tok >> 1)
                    left_in_period -= 1
                    if skip:
                        skip -= 1
                        if skip:
                            continue
                    out.append(value)
                if len(out) == want:
                    return out
            k += 1
            skip = 0

    def to_list(self):
        return self.decode_range(1, self.n)

    # -- sizes ----------------------------------------------------------------

    def payload_bits(self):
        """Bits of the encoded data, excluding the fixed header."""
        if self.mode == PLAIN:
            return self.n * self.width
        k = len(self.samples)
        code_table = len(self.code_lengths) * TABLE_ENTRY_BITS
        return (k * (_plain_width(self.n + 1) + _plain_width(self.stream_bits + 1))
                + code_table + self.stream_bits)

    # -- serialization --------------------------------------------------------

    _HEADER = struct.Struct("<BQI")

    def to_bytes(self):
        """mode, n, t_psi, then mode-specific body; integers little-endian."""
        head = self._HEADER.pack(0 if self.mode == COMPRESSED else 1, self.n, self.t_psi)
        if self.mode == PLAIN:
            return head + struct.pack("<B", self.width) + self._data
        sw = _plain_width(self.n + 1)
        ow = _plain_width(self.stream_bits + 1)
        k = len(self.samples)
        body = [struct.pack("<IBBQ", k, sw, ow, self.stream_bits)]
        body.append(_pack_fixed(self.samples, sw))
        body.append(_pack_fixed(self.offsets, ow))
        table = sorted(self.code_lengths.items(), key=lambda kv: (kv[1], kv[0]))
        body.append(struct.pack("<I", len(table)))
        for sym, ln in table:
            wire = _ESCAPE_WIRE | (-sym - 1) if sym < 0 else sym
            body.append(struct.pack("<IB", wire, ln))
        body.append(self._stream)
        return head + b"".join(body)

    @classmethod
    def from_bytes(cls, buf):
        buf = bytes(buf)
        mode_b, n, t_psi = cls._HEADER.unpack_from(buf, 0)
        off = cls._HEADER.size
        self = object.__new__(cls)
        self.n = n
        self.t_psi = t_psi
        if mode_b == 1:
            self.mode = PLAIN
            (self.width,) = struct.unpack_from("<B", buf, off)
            off += 1
            need = -(-n * self.width // 8)
            self._data = buf[off:off + need]
            if len(self._data) != need or self.width != _plain_width(n):
                raise PsiError("truncated or inconsistent plain Psi segment")
            self._init_plain()
            return self
        if mode_b != 0:
            raise PsiError(f"unknown Psi mode byte {mode_b}")
        self.mode = COMPRESSED
        k, sw, ow, self.stream_bits = struct.unpack_from("<IBBQ", buf, off)
        off += struct.calcsize("<IBBQ")
        if t_psi < 1 or k != -(-n // t_psi):
            raise PsiError("sample count does not match n and t_psi")
        self.samples, off = _unpack_fixed(buf, off, k, sw)
        self.offsets, off = _unpack_fixed(buf, off, k, ow)
        (m,) = struct.unpack_from("<I", buf, off)
        off += 4
        lengths = {}
        for _ in range(m):
            sym, ln = struct.unpack_from("<IB", buf, off)
            off += 5
            if sym & _ESCAPE_WIRE:
                code = sym & ~_ESCAPE_WIRE
                if not 1 <= code & 63 <= 63 or code >> 6 > ESC_RUN:
                    raise PsiError(f"bad escape symbol {sym:#x}")
                sym = -code - 1
            lengths[sym] = ln
        self.code_lengths = lengths
        need = -(-self.stream_bits // 8)
        self._stream = buf[off:off + need]
        if len(self._stream) != need:
            raise PsiError("truncated Psi stream")
        self._init_decoder()
        return self

    def __repr__(self):
        extra = f", t_psi={self.t_psi}" if self.mode == COMPRESSED else f", width={self.width}"
        return f"PsiSegment(mode={self.mode!r}, n={self.n}{extra})"


def _plain_width(n):
    return math.ceil(math.log2(n)) if n > 1 else 0


def _pack_fixed(values, width):
    """Pack non-negative ints LSB-first with ``width`` bits each."""
    if width == 0 or not len(values):
        return b""
    arr = np.asarray(values, dtype=np.uint64)
    shifts = np.arange(width, dtype=np.uint64)
    bits = ((arr[:, None] >> shifts) & np.uint64(1)).astype(np.uint8).ravel()
    return np.packbits(bits, bitorder="little").tobytes()


def _unpack_fixed(buf, off, count, width):
    if width == 0:
        return [0] * count, off
    nbytes = -(-count * width // 8)
    raw = np.frombuffer(buf, dtype=np.uint8, count=nbytes, offset=off)
    bits = np.unpackbits(raw, bitorder="little")[: count * width].reshape(count, width)
    weights = np.uint64(1) << np.arange(width, dtype=np.uint64)
    vals = (bits.astype(np.uint64) * weights).sum(axis=1)
    return [int(v) for v in vals], off + nbytes
