"""MSB-first bit sequences plus the reader/writer helpers the codecs share.

A ``BitSeq`` is an immutable value: ``nbits`` leading bits of ``data``, MSB
first within each byte. Unused trailing bits of the last byte are always
stored as zero so equality and hashing behave.
"""
from __future__ import annotations

from dataclasses import dataclass

#: Low-bit masks, MASKS[n] == (1 << n) - 1, for hot paths.
MASKS = tuple((1 << n) - 1 for n in range(65))
_MASKS = MASKS


def extract_bits(data: bytes, start: int, end: int) -> int:
    """Value of bits [start, end) of ``data`` as an unsigned integer."""
    if not 0 <= start <= end:
        raise ValueError("bad bit range")
    nbits = end - start
    if nbits == 0:
        return 0
    first = start >> 3
    last = (end + 7) >> 3
    chunk = int.from_bytes(data[first:last], "big")
    drop = (last << 3) - end
    return (chunk >> drop) & ((1 << nbits) - 1)


@dataclass(frozen=True)
class BitSeq:
    data: bytes
    nbits: int

    def __post_init__(self):
        if self.nbits < 0:
            raise ValueError("negative bit count")
        expect = (self.nbits + 7) >> 3
        data = bytes(self.data)
        if len(data) != expect:
            raise ValueError(f"need {expect} bytes for {self.nbits} bits, got {len(data)}")
        tail = self.nbits & 7
        if tail and data[-1] & _MASKS[8 - tail]:
            data = data[:-1] + bytes([data[-1] & (0xFF ^ _MASKS[8 - tail])])
        object.__setattr__(self, "data", data)

    @classmethod
    def from01(cls, s: str) -> "BitSeq":
        """Build from a string of 0/1 characters; spaces are ignored."""
        s = s.replace(" ", "").replace("_", "")
        n = len(s)
        if n == 0:
            return cls(b"", 0)
        value = int(s, 2)
        return cls.from_int(value, n)

    @classmethod
    def from_int(cls, value: int, nbits: int) -> "BitSeq":
        value &= (1 << nbits) - 1
        data = (value << ((-nbits) % 8)).to_bytes((nbits + 7) >> 3, "big")
        return cls(data, nbits)

    def to01(self) -> str:
        if self.nbits == 0:
            return ""
        return "".join(f"{b:08b}" for b in self.data)[: self.nbits]

    def to_int(self) -> int:
        if self.nbits == 0:
            return 0
        return int.from_bytes(self.data, "big") >> ((-self.nbits) % 8)

    def __len__(self) -> int:
        return self.nbits

    def __add__(self, other: "BitSeq") -> "BitSeq":
        w = BitWriter()
        w.write_seq(self)
        w.write_seq(other)
        return w.getvalue()


class BitWriter:
    """Accumulates bits MSB-first; whole bytes are flushed eagerly."""

    __slots__ = ("_buf", "_acc", "_n")

    def __init__(self):
        self._buf = bytearray()
        self._acc = 0
        self._n = 0

    def write(self, value: int, nbits: int) -> None:
        if nbits < 0:
            raise ValueError("negative bit count")
        acc = (self._acc << nbits) | (value & ((1 << nbits) - 1))
        n = self._n + nbits
        buf = self._buf
        while n >= 8:
            n -= 8
            buf.append((acc >> n) & 0xFF)
        self._acc = acc & _MASKS[n]
        self._n = n

    def write_seq(self, seq: BitSeq) -> None:
        self.write(seq.to_int(), seq.nbits)

    def write_range(self, data: bytes, start: int, end: int) -> None:
        """Copy bits [start, end) of ``data`` verbatim."""
        self.write(extract_bits(data, start, end), end - start)

    @property
    def bit_length(self) -> int:
        return (len(self._buf) << 3) + self._n

    def getvalue(self) -> BitSeq:
        if self._n:
            data = bytes(self._buf) + bytes([(self._acc << (8 - self._n)) & 0xFF])
        else:
            data = bytes(self._buf)
        return BitSeq(data, self.bit_length)
