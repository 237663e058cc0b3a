"""End-to-end hide, extract and recover procedures plus capacity reporting.

Every call is self-contained: a marked file carries everything extraction
and recovery need (terminate point, special indexes, secret length) in its
comment segment, so the two directions share no state.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from functools import lru_cache

from .bitio import extract_bits
from .container import (
    JpegFile,
    TableClass,
    comment_index,
    insert_comment,
    locate_comment,
    parse_jpeg,
    serialize_jpeg,
    stuff,
    unstuff,
)
from .entropy import build_huffman, decode_scan
from .errors import (
    CommentCollision,
    CorruptPadding,
    LengthMismatch,
    SecretTooLarge,
    UnsupportedPadding,
)
from .payload import WIRE_OVERHEAD, build_payload, capacity, parse_payload
from .transcode import (
    TranscodeResult,
    image_tpoint,
    optimize_transcode,
    transcode_backward,
    transcode_forward,
)

T_POLICIES = ("max", "optimize")


@dataclass(frozen=True)
class CapacityReport:
    ec_bits: int
    rate_percent: float
    t: int
    special_count: int
    original_size: int
    recompressed_scan_size: int
    saved_bytes: int
    capacity_bytes: int


@dataclass(frozen=True)
class _Analysis:
    file: JpegFile
    result: TranscodeResult


@lru_cache(maxsize=4)
def _analyze(cover: bytes, t_policy: str) -> _Analysis:
    """Parse, decode and forward-transcode a cover. Memoized so measuring
    then embedding the same bytes does the heavy work once."""
    if t_policy not in T_POLICIES:
        raise ValueError(f"t_policy must be one of {T_POLICIES}")
    file = parse_jpeg(cover)
    dc = build_huffman(file.huffman_spec(TableClass.DC))
    ac = build_huffman(file.huffman_spec(TableClass.AC))
    bits = unstuff(file.scan)
    records = decode_scan(bits, file.frame.block_count, dc, ac)

    # Byte-exact recovery re-pads the final byte with 1-bits, so embedding
    # refuses covers whose encoder padded any other way.
    tail_start = records[-1].end
    tail = bits.nbits - tail_start
    if tail >= 8 or (
        tail and extract_bits(bits.data, tail_start, bits.nbits) != (1 << tail) - 1
    ):
        raise UnsupportedPadding("cover scan does not end in 1-bit padding")

    original_scan_bytes = len(file.scan.stuffed_bytes)
    if t_policy == "optimize":
        result = optimize_transcode(bits, records, ac, original_scan_bytes)
    else:
        result = transcode_forward(
            bits, records, image_tpoint(records), ac, original_scan_bytes
        )
    return _Analysis(file=file, result=result)


def measure(cover: bytes, *, t_policy: str = "max") -> CapacityReport:
    """Run the hiding pipeline up to capacity accounting, writing nothing."""
    cover = bytes(cover)
    a = _analyze(cover, t_policy)
    count = len(a.result.special_indexes)
    cap = capacity(a.result.saved_bytes, count)
    return CapacityReport(
        ec_bits=8 * cap,
        rate_percent=100.0 * cap / len(cover),
        t=a.result.t,
        special_count=count,
        original_size=len(cover),
        recompressed_scan_size=len(a.result.new_scan.stuffed_bytes),
        saved_bytes=a.result.saved_bytes,
        capacity_bytes=cap,
    )


def embed(cover: bytes, secret: bytes, *, t_policy: str = "max") -> bytes:
    """Produce a marked file of exactly the cover's size carrying ``secret``."""
    cover = bytes(cover)
    secret = bytes(secret)
    # Refuse already-marked files before decoding: their scans are not
    # standard-decodable, which would surface as a confusing BadCode.
    if cover[2:4] == b"\xff\xfe":
        raise CommentCollision("a COM segment already follows SOI")
    a = _analyze(cover, t_policy)
    count = len(a.result.special_indexes)
    room = a.result.saved_bytes - WIRE_OVERHEAD - 2 * count
    if room < 0 or len(secret) > room:
        raise SecretTooLarge(
            f"secret of {len(secret)} bytes exceeds capacity of {max(room, 0)}"
        )
    com = build_payload(
        secret, a.result.t, a.result.special_indexes, a.result.saved_bytes - 2
    )
    marked = insert_comment(replace(a.file, scan=a.result.new_scan), com)
    out = serialize_jpeg(marked)
    if len(out) != len(cover):
        raise LengthMismatch(
            f"marked file came out {len(out)} bytes, cover was {len(cover)}"
        )
    return out


def _parse_marked_payload(raw: bytes):
    hp = parse_payload(raw)
    # The builder zero-fills everything after the secret, so any other
    # content there means the segment was damaged.
    if hp.padding and any(raw[len(raw) - hp.padding :]):
        raise CorruptPadding(f"{hp.padding} padding bytes are not all zero")
    return hp


def extract(marked: bytes) -> bytes:
    """Read the secret back from a marked file's header; the scan is never
    entropy-decoded."""
    file = parse_jpeg(bytes(marked))
    return _parse_marked_payload(locate_comment(file)).secret


def recover(marked: bytes) -> bytes:
    """Rebuild the original cover byte-exactly from a marked file."""
    marked = bytes(marked)
    file = parse_jpeg(marked)
    ci = comment_index(file)
    hp = _parse_marked_payload(file.segments[ci].payload)
    dc = build_huffman(file.huffman_spec(TableClass.DC))
    ac = build_huffman(file.huffman_spec(TableClass.AC))
    bits = unstuff(file.scan)
    original_bits = transcode_backward(
        bits, hp.t, hp.special_indexes, dc, ac, file.frame.block_count
    )
    restored = replace(
        file,
        segments=file.segments[:ci] + file.segments[ci + 1 :],
        scan=stuff(original_bits),
    )
    out = serialize_jpeg(restored)
    if len(out) != len(marked):
        raise LengthMismatch(
            f"recovered {len(out)} bytes from a {len(marked)}-byte marked file"
        )
    return out
