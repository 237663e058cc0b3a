"""Baseline JPEG entropy coding: canonical Huffman tables, VLI values and
block-level decode/encode with bit spans.

Decoding tracks, per block, where every symbol ends (zigzag position and bit
offset) so the transcoder can split a block into a verbatim region and a
recoded region without re-walking the stream. Zigzag positions are 1-based
with DC at position 1.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .bitio import MASKS, BitSeq
from .errors import BadCode, InvalidTable, Overrun, SizeOverflow, ZeroValue
from .container import HuffmanTableSpec

#: Zigzag index (0-based) -> row-major index of the 8x8 block.
ZIGZAG_TO_NATURAL = (
    0, 1, 8, 16, 9, 2, 3, 10,
    17, 24, 32, 25, 18, 11, 4, 5,
    12, 19, 26, 33, 40, 48, 41, 34,
    27, 20, 13, 6, 7, 14, 21, 28,
    35, 42, 49, 56, 57, 50, 43, 36,
    29, 22, 15, 23, 30, 37, 44, 51,
    58, 59, 52, 45, 38, 31, 39, 46,
    53, 60, 61, 54, 47, 55, 62, 63,
)


@dataclass(frozen=True)
class CoefficientBlock:
    """64 quantized coefficients in zigzag order; index 0 holds the DC value
    as coded, i.e. the predictor-relative difference."""

    coeffs: tuple[int, ...]

    def __post_init__(self):
        if len(self.coeffs) != 64:
            raise ValueError("a block has exactly 64 coefficients")

    @property
    def dc_diff(self) -> int:
        return self.coeffs[0]


@dataclass(frozen=True)
class RunSizeSymbol:
    run: int
    size: int

    @property
    def is_eob(self) -> bool:
        return self.run == 0 and self.size == 0

    @property
    def is_zrl(self) -> bool:
        return self.run == 15 and self.size == 0


@dataclass(frozen=True)
class BlockBitSpan:
    """Bit offsets of one block in the unstuffed scan. ``cut_bit`` is where
    the standard-coded region ends; decoding initializes it to ``end_bit``."""

    start_bit: int
    end_bit: int
    cut_bit: int

    def __post_init__(self):
        if not self.start_bit <= self.cut_bit <= self.end_bit:
            raise ValueError("span offsets out of order")


@dataclass(frozen=True)
class CodeMetrics:
    m1: int
    m2: int
    m: int
    rate: float


def code_rate(m1: int, m: int) -> CodeMetrics:
    """Split a code of ``m`` total bits into code word (m1) and appended
    value bits (m2 = m - m1); rate is the appended fraction m2/m."""
    if not 0 <= m1 <= m or m <= 0:
        raise ValueError(f"need 0 <= m1 <= m and m > 0, got {m1}, {m}")
    m2 = m - m1
    return CodeMetrics(m1=m1, m2=m2, m=m, rate=m2 / m)


class HuffmanCodec:
    """Canonical prefix codec for one table: codes are assigned in order of
    increasing length, then symbol order, exactly as a DHT segment lists
    them.

    ``codes`` maps symbol -> (code value, code length). ``lookup`` maps any
    16-bit window to a packed (symbol << 5) | length entry, -1 if no code
    matches, which lets the decoder resolve a symbol with one list index.
    """

    __slots__ = ("spec", "codes", "lookup")

    def __init__(self, spec: HuffmanTableSpec):
        if len(spec.bit_counts) != 16:
            raise InvalidTable("need 16 code-length counts")
        if sum(spec.bit_counts) != len(spec.symbols):
            raise InvalidTable(
                f"{sum(spec.bit_counts)} codes declared, {len(spec.symbols)} symbols given"
            )
        codes: dict[int, tuple[int, int]] = {}
        lookup = [-1] * 65536
        code = 0
        sym_i = 0
        for length_minus1, count in enumerate(spec.bit_counts):
            length = length_minus1 + 1
            for _ in range(count):
                if code >= (1 << length):
                    raise InvalidTable("code space exhausted (Kraft violation)")
                symbol = spec.symbols[sym_i]
                if symbol in codes:
                    raise InvalidTable(f"symbol {symbol:#04x} defined twice")
                codes[symbol] = (code, length)
                base = code << (16 - length)
                span = 1 << (16 - length)
                lookup[base : base + span] = [(symbol << 5) | length] * span
                code += 1
                sym_i += 1
            code <<= 1
        self.spec = spec
        self.codes = codes
        self.lookup = lookup

    def code_for(self, symbol: int) -> tuple[int, int]:
        try:
            return self.codes[symbol]
        except KeyError:
            raise BadCode(f"symbol {symbol:#04x} not in table") from None

    def code_string(self, symbol: int) -> str:
        code, length = self.code_for(symbol)
        return f"{code:0{length}b}"


@lru_cache(maxsize=32)
def build_huffman(spec: HuffmanTableSpec) -> HuffmanCodec:
    """Build (and memoize) the codec for a table spec."""
    return HuffmanCodec(spec)


def vli_encode(value: int) -> tuple[int, int]:
    """Code a nonzero value as (size category, appended bits). Positive
    values are plain binary; negatives use the one's complement convention."""
    if value == 0:
        raise ZeroValue("VLI cannot code zero")
    if value > 0:
        return value.bit_length(), value
    size = (-value).bit_length()
    return size, value + MASKS[size]


def vli_decode(size: int, bits: int) -> int:
    """Inverse of :func:`vli_encode`."""
    if size <= 0:
        raise ZeroValue("VLI size must be positive")
    if bits < (1 << (size - 1)):
        return bits - MASKS[size]
    return bits


class BlockRecord:
    """Decode product for one block: coefficients plus the per-symbol walk.

    ``trace`` lists (zigzag position reached, bit offset after the symbol)
    for the DC code and every AC symbol except EOB; ``has_eob`` tells
    whether an EOB terminated the block.
    """

    __slots__ = ("coeffs", "start", "end", "trace", "has_eob")

    def __init__(self, coeffs, start, end, trace, has_eob):
        self.coeffs = coeffs
        self.start = start
        self.end = end
        self.trace = trace
        self.has_eob = has_eob

    def block(self) -> CoefficientBlock:
        return CoefficientBlock(tuple(self.coeffs))

    def span(self) -> BlockBitSpan:
        return BlockBitSpan(self.start, self.end, self.end)


def _decode_block_raw(buf, nbits, pos, dc_lut, ac_lut):
    """Decode one block starting at bit ``pos``. ``buf`` must carry >= 6
    slack bytes past the meaningful data; garbage decoded from the slack is
    caught by the end-of-block Overrun check."""
    start = pos
    coeffs = [0] * 64
    trace = []
    has_eob = False

    off = pos & 7
    chunk = (int.from_bytes(buf[pos >> 3 : (pos >> 3) + 6], "big") >> (16 - off)) & 0xFFFFFFFF
    e = dc_lut[chunk >> 16]
    if e < 0:
        raise BadCode(f"no DC code matches bits at {pos}")
    length = e & 31
    size = e >> 5
    if size > 15:
        raise BadCode(f"DC size category {size} out of range")
    if size:
        v = (chunk >> (32 - length - size)) & MASKS[size]
        if v < (1 << (size - 1)):
            v -= MASKS[size]
        coeffs[0] = v
        pos += length + size
    else:
        pos += length
    trace.append((1, pos))

    k = 1
    while k < 64:
        off = pos & 7
        chunk = (int.from_bytes(buf[pos >> 3 : (pos >> 3) + 6], "big") >> (16 - off)) & 0xFFFFFFFF
        e = ac_lut[chunk >> 16]
        if e < 0:
            raise BadCode(f"no AC code matches bits at {pos}")
        length = e & 31
        sym = e >> 5
        if sym == 0:
            pos += length
            has_eob = True
            break
        size = sym & 15
        if size == 0:
            if sym != 0xF0:
                raise BadCode(f"undefined AC symbol {sym:#04x}")
            k += 16
            if k > 64:
                raise BadCode("zero run past block end")
            pos += length
            trace.append((k, pos))
            continue
        k += (sym >> 4) + 1
        if k > 64:
            raise BadCode("coefficient run past block end")
        v = (chunk >> (32 - length - size)) & MASKS[size]
        if v < (1 << (size - 1)):
            v -= MASKS[size]
        coeffs[k - 1] = v
        pos += length + size
        trace.append((k, pos))

    if pos > nbits:
        raise Overrun(f"block ran past end of scan ({pos} > {nbits} bits)")
    return BlockRecord(coeffs, start, pos, trace, has_eob)


def decode_block(
    bits: BitSeq, cursor: int, dc_codec: HuffmanCodec, ac_codec: HuffmanCodec
) -> tuple[CoefficientBlock, BlockBitSpan, int]:
    """Decode one block at ``cursor``; returns (block, span, new cursor)."""
    rec = _decode_block_raw(
        bits.data + b"\x00" * 8, bits.nbits, cursor, dc_codec.lookup, ac_codec.lookup
    )
    return rec.block(), rec.span(), rec.end


def decode_scan(
    bits: BitSeq, block_count: int, dc_codec: HuffmanCodec, ac_codec: HuffmanCodec
) -> list[BlockRecord]:
    """Decode ``block_count`` consecutive blocks from the start of the scan."""
    buf = bits.data + b"\x00" * 8
    nbits = bits.nbits
    dc_lut = dc_codec.lookup
    ac_lut = ac_codec.lookup
    records = []
    pos = 0
    for _ in range(block_count):
        rec = _decode_block_raw(buf, nbits, pos, dc_lut, ac_lut)
        records.append(rec)
        pos = rec.end
    return records


def walk_standard(buf, nbits, pos, dc_lut, ac_lut, t):
    """Advance over a block's standard coding until an EOB completes the
    block or a symbol ends at zigzag position >= ``t``.

    Returns (bit offset after the stopping symbol, position reached,
    stopped_by_eob). Pass t=65 to walk a whole block regardless.
    """
    off = pos & 7
    chunk = (int.from_bytes(buf[pos >> 3 : (pos >> 3) + 6], "big") >> (16 - off)) & 0xFFFFFFFF
    e = dc_lut[chunk >> 16]
    if e < 0:
        raise BadCode(f"no DC code matches bits at {pos}")
    length = e & 31
    size = e >> 5
    if size > 15:
        raise BadCode(f"DC size category {size} out of range")
    pos += length + size
    if 1 >= t:
        return pos, 1, False

    k = 1
    while k < 64:
        off = pos & 7
        chunk = (int.from_bytes(buf[pos >> 3 : (pos >> 3) + 6], "big") >> (16 - off)) & 0xFFFFFFFF
        e = ac_lut[chunk >> 16]
        if e < 0:
            raise BadCode(f"no AC code matches bits at {pos}")
        length = e & 31
        sym = e >> 5
        if sym == 0:
            return pos + length, k, True
        size = sym & 15
        if size == 0:
            if sym != 0xF0:
                raise BadCode(f"undefined AC symbol {sym:#04x}")
            k += 16
            pos += length
        else:
            k += (sym >> 4) + 1
            pos += length + size
        if k > 64:
            raise BadCode("run past block end")
        if k >= t:
            return pos, k, False
    return pos, 64, False


def _encode_region(coeffs, start_pos, dc_codes, ac_codes):
    """Canonical coding of positions >= ``start_pos`` (1-based), returned as
    (bits value, bit count). Runs over 15 emit ZRL, trailing zeros emit a
    single EOB, and no EOB is emitted when position 64 holds a nonzero."""
    acc = 0
    n = 0
    pos = start_pos
    if pos == 1:
        dc = coeffs[0]
        if dc:
            size = dc.bit_length() if dc > 0 else (-dc).bit_length()
            if size > 15:
                raise SizeOverflow(f"DC value {dc} needs size {size}")
            vbits = dc if dc > 0 else dc + MASKS[size]
        else:
            size = 0
            vbits = 0
        entry = dc_codes.get(size)
        if entry is None:
            raise BadCode(f"DC size {size} not in table")
        acc = (entry[0] << size) | vbits
        n = entry[1] + size
        pos = 2

    run = 0
    for i in range(pos - 1, 64):
        v = coeffs[i]
        if v == 0:
            run += 1
            continue
        while run >= 16:
            entry = ac_codes.get(0xF0)
            if entry is None:
                raise BadCode("ZRL not in table")
            acc = (acc << entry[1]) | entry[0]
            n += entry[1]
            run -= 16
        size = v.bit_length() if v > 0 else (-v).bit_length()
        if size > 15:
            raise SizeOverflow(f"AC value {v} needs size {size}")
        entry = ac_codes.get((run << 4) | size)
        if entry is None:
            raise BadCode(f"symbol {run}/{size} not in AC table")
        vbits = v if v > 0 else v + MASKS[size]
        acc = (((acc << entry[1]) | entry[0]) << size) | vbits
        n += entry[1] + size
        run = 0
    if run:
        entry = ac_codes.get(0x00)
        if entry is None:
            raise BadCode("EOB not in table")
        acc = (acc << entry[1]) | entry[0]
        n += entry[1]
    return acc, n


def encode_block(
    block, start_pos: int, dc_codec: HuffmanCodec | None, ac_codec: HuffmanCodec
) -> BitSeq:
    """Encode coefficients at positions >= ``start_pos``; when start_pos is
    1 the DC difference is emitted first, otherwise DC is skipped."""
    coeffs = block.coeffs if isinstance(block, CoefficientBlock) else block
    if not 1 <= start_pos <= 64:
        raise ValueError(f"start_pos {start_pos} outside 1..64")
    if start_pos == 1 and dc_codec is None:
        raise ValueError("encoding from position 1 requires a DC codec")
    acc, n = _encode_region(
        coeffs, start_pos, dc_codec.codes if dc_codec else None, ac_codec.codes
    )
    return BitSeq.from_int(acc, n)


def symbolize(coeffs, start_pos: int = 2) -> list[tuple[RunSizeSymbol, int | None]]:
    """Canonical (run, size) symbol stream with values for AC positions
    >= ``start_pos``; the trailing entry is EOB when one would be coded."""
    out: list[tuple[RunSizeSymbol, int | None]] = []
    run = 0
    for i in range(start_pos - 1, 64):
        v = coeffs[i]
        if v == 0:
            run += 1
            continue
        while run >= 16:
            out.append((RunSizeSymbol(15, 0), None))
            run -= 16
        size = v.bit_length() if v > 0 else (-v).bit_length()
        out.append((RunSizeSymbol(run, size), v))
        run = 0
    if run:
        out.append((RunSizeSymbol(0, 0), None))
    return out
