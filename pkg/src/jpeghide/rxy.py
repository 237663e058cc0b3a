"""Short variable-length code for sparse runs of small coefficients.

A symbol is either an end-of-block marker or a pair (run of zeros, value in
{-2, -1, 1, 2}). The run is coded in 3-bit groups read MSB first: every
``111`` group adds six, the closing group g in 001..110 adds g-1, and
``000`` on its own is the end marker. Two bits then select the value, so a
symbol with run M occupies 3*(M // 6) + 5 bits and the end marker 3.
"""
from __future__ import annotations

from dataclasses import dataclass

from .bitio import BitSeq
from .errors import (
    DanglingContinuation,
    RxyCorrupt,
    ValueOutOfRange,
    ZeroGroupAfterContinuation,
)

#: Values representable by the two-bit field, indexed by its code.
XY_VALUES = (-2, -1, 1, 2)
_XY_CODE = {-2: 0, -1: 1, 1: 2, 2: 3}

#: At most 62 zeros can precede a nonzero within one block's AC range.
MAX_RUN = 62


@dataclass(frozen=True)
class RxySymbol:
    """(run, value) pair; ``value is None`` marks end-of-block."""

    run: int = 0
    value: int | None = None

    @property
    def is_eob(self) -> bool:
        return self.value is None


END_OF_BLOCK = RxySymbol(0, None)


def rxy_length(run: int) -> int:
    """Bit length of a coded (run, value) symbol."""
    if run < 0:
        raise ValueOutOfRange(f"negative run {run}")
    return 3 * (run // 6) + 5


def rxy_encode_bits(run: int, value: int) -> tuple[int, int]:
    """Code a (run, value) pair, returned as (bits value, bit count)."""
    xy = _XY_CODE.get(value)
    if xy is None:
        raise ValueOutOfRange(f"value {value} not codable")
    if not 0 <= run <= MAX_RUN:
        raise ValueOutOfRange(f"run {run} outside 0..{MAX_RUN}")
    m, n = divmod(run, 6)
    bits = 0
    for _ in range(m):
        bits = (bits << 3) | 0b111
    bits = (bits << 3) | (n + 1)
    return (bits << 2) | xy, 3 * m + 5


def rxy_encode(symbol: RxySymbol) -> BitSeq:
    if symbol.is_eob:
        return BitSeq.from_int(0b000, 3)
    bits, nbits = rxy_encode_bits(symbol.run, symbol.value)
    return BitSeq.from_int(bits, nbits)


def decode_raw(buf: bytes, nbits: int, pos: int) -> tuple[int, int | None, int]:
    """Decode one symbol at bit ``pos``; returns (run, value, consumed bits).

    ``buf`` must extend at least six bytes past the last meaningful byte;
    ``nbits`` bounds the meaningful bits for truncation checks.
    """
    off = pos & 7
    window = int.from_bytes(buf[pos >> 3 : (pos >> 3) + 6], "big")
    shift = 48 - off - 3
    run = 0
    groups = 0
    while True:
        if pos + 3 * (groups + 1) > nbits:
            raise DanglingContinuation(f"symbol truncated at bit {pos}")
        g = (window >> shift) & 7
        if g == 7:
            groups += 1
            run += 6
            shift -= 3
            if run > MAX_RUN:
                raise RxyCorrupt(f"run exceeds {MAX_RUN} at bit {pos}")
            continue
        if g == 0:
            if groups:
                raise ZeroGroupAfterContinuation(f"000 after continuation at bit {pos}")
            return 0, None, 3
        run += g - 1
        consumed = 3 * (groups + 1) + 2
        if pos + consumed > nbits:
            raise DanglingContinuation(f"symbol truncated at bit {pos}")
        return run, XY_VALUES[(window >> (shift - 2)) & 3], consumed


def rxy_decode(bits: BitSeq, cursor: int = 0) -> tuple[RxySymbol, int]:
    """Decode the symbol starting at ``cursor``; returns it plus the new cursor."""
    run, value, consumed = decode_raw(bits.data + b"\x00" * 6, bits.nbits, cursor)
    if value is None:
        return END_OF_BLOCK, cursor + consumed
    return RxySymbol(run, value), cursor + consumed
