"""Byte layout of the hiding payload carried in the comment segment.

All multi-byte fields are big-endian, matching JPEG marker conventions:

    4 bytes  secret length
    1 byte   terminate point (1..64)
    2 bytes  special block count
    2 bytes  per special block index (0-based, scan order)
    m bytes  secret
    padding  zero bytes up to the target segment size

The target size counts the segment's 2-byte length field, so with a segment
length value of M the secret can hold at most M - 2*count - 9 bytes.
"""
from __future__ import annotations

import struct
from dataclasses import dataclass

from .errors import (
    BadTerminatePoint,
    CapacityExceeded,
    IndexOverflow,
    SegmentTooLong,
    TruncatedPayload,
)

#: Fixed field bytes before the indexes.
HEADER_BYTES = 7
#: Header plus the segment's own length field.
SEGMENT_OVERHEAD = HEADER_BYTES + 2
#: On-wire cost including the 2-byte COM marker; scan savings must cover
#: this much beyond the secret to keep the file size unchanged.
WIRE_OVERHEAD = SEGMENT_OVERHEAD + 2


@dataclass(frozen=True)
class HidingPayload:
    secret: bytes
    t: int
    special_indexes: tuple[int, ...]
    padding: int = 0

    @property
    def secret_len(self) -> int:
        return len(self.secret)

    @property
    def special_count(self) -> int:
        return len(self.special_indexes)


def build_payload(
    secret: bytes, t: int, special_indexes, target_segment_bytes: int
) -> bytes:
    """Serialize the payload, zero-padded so segment length + 2-byte length
    field equals ``target_segment_bytes`` exactly."""
    if not 1 <= t <= 64:
        raise BadTerminatePoint(f"terminate point {t}")
    indexes = tuple(special_indexes)
    if len(indexes) > 0xFFFF:
        raise IndexOverflow(f"{len(indexes)} special blocks; count is 16-bit")
    for v in indexes:
        if not 0 <= v <= 0xFFFF:
            raise IndexOverflow(f"block index {v} does not fit 16 bits")
    if target_segment_bytes > 0xFFFF:
        raise SegmentTooLong(f"segment length {target_segment_bytes} exceeds 65535")
    body = target_segment_bytes - 2
    fixed = HEADER_BYTES + 2 * len(indexes)
    if body < fixed + len(secret):
        raise CapacityExceeded(
            f"{len(secret)} secret bytes plus {fixed} fixed bytes exceed the "
            f"{body}-byte payload target"
        )
    out = struct.pack(">IBH", len(secret), t, len(indexes))
    out += b"".join(v.to_bytes(2, "big") for v in indexes)
    out += bytes(secret)
    out += b"\x00" * (body - fixed - len(secret))
    return out


def parse_payload(data: bytes) -> HidingPayload:
    """Inverse of :func:`build_payload`; trailing padding is not inspected."""
    if len(data) < HEADER_BYTES:
        raise TruncatedPayload(f"payload of {len(data)} bytes, need at least {HEADER_BYTES}")
    secret_len, t, count = struct.unpack(">IBH", data[:HEADER_BYTES])
    if not 1 <= t <= 64:
        raise BadTerminatePoint(f"terminate point byte {t}")
    need = HEADER_BYTES + 2 * count + secret_len
    if need > len(data):
        raise TruncatedPayload(f"payload declares {need} bytes, has {len(data)}")
    indexes = tuple(
        int.from_bytes(data[HEADER_BYTES + 2 * i : HEADER_BYTES + 2 * i + 2], "big")
        for i in range(count)
    )
    secret = data[HEADER_BYTES + 2 * count : need]
    return HidingPayload(
        secret=secret, t=t, special_indexes=indexes, padding=len(data) - need
    )


def capacity(saved_bytes: int, special_count: int) -> int:
    """Secret bytes embeddable given scan savings: the comment wrapper costs
    2 marker + 2 length + 7 header bytes plus 2 per special index, and the
    whole insertion must equal the savings for the file size to stay put."""
    return max(0, saved_bytes - WIRE_OVERHEAD - 2 * special_count)
