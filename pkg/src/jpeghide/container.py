"""Marker-level parsing and byte-exact serialization of baseline JPEG files.

Only the structure this tool needs is interpreted: SOF0 frame parameters,
DHT table specs and the SOS component bindings. Everything else rides along
as opaque segments so ``serialize_jpeg(parse_jpeg(b)) == b`` holds for any
accepted input.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

from .bitio import MASKS, BitSeq
from .errors import (
    CommentCollision,
    HasRestartInterval,
    Malformed,
    MarkerInScan,
    MultiComponent,
    NoComment,
    NotBaseline,
    SegmentTooLong,
    Truncated,
)

SOI = 0xFFD8
EOI = 0xFFD9
SOS = 0xFFDA
DQT = 0xFFDB
DNL = 0xFFDC
DRI = 0xFFDD
DHT = 0xFFC4
COM = 0xFFFE
SOF0 = 0xFFC0
TEM = 0xFF01
APP0 = 0xFFE0

#: Markers that stand alone, with no length field or payload.
BARE_MARKERS = frozenset({SOI, EOI, TEM} | {0xFFD0 + i for i in range(8)})

#: SOFn markers other than SOF0 (DHT, JPG and DAC share the 0xFFCx range).
_OTHER_SOF = frozenset(
    0xFFC0 + n for n in (1, 2, 3, 5, 6, 7, 9, 10, 11, 13, 14, 15)
)

MAX_SEGMENT_PAYLOAD = 65533


class TableClass(enum.IntEnum):
    DC = 0
    AC = 1


@dataclass(frozen=True)
class Segment:
    """One marker segment; payload excludes the 2-byte length field."""

    marker: int
    payload: bytes = b""


@dataclass(frozen=True)
class HuffmanTableSpec:
    table_class: TableClass
    table_id: int
    bit_counts: tuple[int, ...]
    symbols: tuple[int, ...]


@dataclass(frozen=True)
class EntropyScan:
    """Scan bytes as stored on disk, 0x00-stuffed after each 0xFF."""

    stuffed_bytes: bytes
    restart_interval: int = 0


@dataclass(frozen=True)
class FrameInfo:
    width: int
    height: int
    precision: int
    component_id: int

    @property
    def block_count(self) -> int:
        return ((self.width + 7) // 8) * ((self.height + 7) // 8)


@dataclass(frozen=True)
class JpegFile:
    segments: tuple[Segment, ...]
    scan: EntropyScan
    trailer: bytes
    frame: FrameInfo
    huffman: dict[tuple[TableClass, int], HuffmanTableSpec] = field(compare=False)
    dc_table_id: int = 0
    ac_table_id: int = 0

    def huffman_spec(self, table_class: TableClass) -> HuffmanTableSpec:
        table_id = self.dc_table_id if table_class is TableClass.DC else self.ac_table_id
        key = (table_class, table_id)
        if key not in self.huffman:
            raise Malformed(f"scan references missing {table_class.name} table {table_id}")
        return self.huffman[key]


def _parse_sof0(payload: bytes) -> FrameInfo:
    if len(payload) < 6:
        raise Truncated("SOF0 payload too short")
    precision = payload[0]
    height = int.from_bytes(payload[1:3], "big")
    width = int.from_bytes(payload[3:5], "big")
    ncomp = payload[5]
    if precision != 8:
        raise NotBaseline(f"sample precision {precision}, need 8")
    if ncomp != 1:
        raise MultiComponent(f"{ncomp} frame components, need 1")
    if len(payload) != 6 + 3 * ncomp:
        raise Malformed("SOF0 payload length inconsistent")
    if width == 0 or height == 0:
        raise Malformed("zero image dimension")
    return FrameInfo(width, height, precision, component_id=payload[6])


def _parse_sos(payload: bytes) -> tuple[int, int, int]:
    if len(payload) < 1:
        raise Truncated("SOS payload too short")
    ncomp = payload[0]
    if ncomp != 1:
        raise MultiComponent(f"{ncomp} scan components, need 1")
    if len(payload) != 1 + 2 * ncomp + 3:
        raise Malformed("SOS payload length inconsistent")
    component = payload[1]
    dc_id = payload[2] >> 4
    ac_id = payload[2] & 0x0F
    ss, se, a = payload[3], payload[4], payload[5]
    if (ss, se, a) != (0, 63, 0):
        raise NotBaseline("spectral selection parameters are not baseline")
    return component, dc_id, ac_id


def _parse_dht(payload: bytes) -> list[HuffmanTableSpec]:
    specs = []
    i = 0
    while i < len(payload):
        info = payload[i]
        table_class = info >> 4
        table_id = info & 0x0F
        if table_class > 1:
            raise Malformed(f"huffman table class {table_class}")
        if table_id > 3:
            raise Malformed(f"huffman table id {table_id}")
        if i + 17 > len(payload):
            raise Truncated("DHT counts truncated")
        counts = tuple(payload[i + 1 : i + 17])
        total = sum(counts)
        if i + 17 + total > len(payload):
            raise Truncated("DHT symbols truncated")
        symbols = tuple(payload[i + 17 : i + 17 + total])
        specs.append(HuffmanTableSpec(TableClass(table_class), table_id, counts, symbols))
        i += 17 + total
    return specs


def parse_jpeg(data: bytes) -> JpegFile:
    """Parse marker structure, the scan and table specs of a baseline file."""
    if len(data) < 2 or data[0:2] != b"\xff\xd8":
        raise Malformed("missing SOI")
    segments = [Segment(SOI)]
    huffman: dict[tuple[TableClass, int], HuffmanTableSpec] = {}
    frame: FrameInfo | None = None
    scan_ids: tuple[int, int, int] | None = None
    i = 2
    while True:
        if i + 2 > len(data):
            raise Truncated("expected a marker, hit end of data")
        if data[i] != 0xFF:
            raise Malformed(f"expected a marker at offset {i}")
        marker = (data[i] << 8) | data[i + 1]
        if marker == SOI:
            raise Malformed("duplicate SOI")
        if marker in BARE_MARKERS:
            raise Malformed(f"unexpected bare marker {marker:#06x} before SOS")
        if marker in _OTHER_SOF:
            raise NotBaseline(f"unsupported frame marker {marker:#06x}")
        if i + 4 > len(data):
            raise Truncated("segment length truncated")
        seglen = int.from_bytes(data[i + 2 : i + 4], "big")
        if seglen < 2:
            raise Malformed(f"segment length {seglen} at offset {i}")
        payload = data[i + 4 : i + 2 + seglen]
        if len(payload) != seglen - 2:
            raise Truncated("segment payload truncated")
        if marker == SOF0:
            if frame is not None:
                raise Malformed("multiple SOF0 segments")
            frame = _parse_sof0(payload)
        elif marker == DHT:
            for spec in _parse_dht(payload):
                huffman[(spec.table_class, spec.table_id)] = spec
        elif marker == DRI:
            if len(payload) != 2:
                raise Malformed("DRI payload length")
            if int.from_bytes(payload, "big") != 0:
                raise HasRestartInterval("nonzero restart interval")
        elif marker == SOS:
            if frame is None:
                raise Malformed("SOS before SOF0")
            scan_ids = _parse_sos(payload)
        segments.append(Segment(marker, payload))
        i += 2 + seglen
        if marker == SOS:
            break

    # Delimit the entropy-coded scan: stuffed 0xFF00 pairs pass through,
    # the first real marker must be EOI.
    scan_start = i
    j = i
    while True:
        j = data.find(b"\xff", j)
        if j < 0 or j + 1 >= len(data):
            raise Truncated("EOI not found")
        nxt = data[j + 1]
        if nxt == 0x00:
            j += 2
            continue
        if nxt == 0xD9:
            break
        if 0xD0 <= nxt <= 0xD7:
            raise HasRestartInterval(f"restart marker in scan at offset {j}")
        raise Malformed(f"marker 0xff{nxt:02x} inside scan at offset {j}")

    assert frame is not None and scan_ids is not None
    _, dc_id, ac_id = scan_ids
    for table_class, table_id in ((TableClass.DC, dc_id), (TableClass.AC, ac_id)):
        if (table_class, table_id) not in huffman:
            raise Malformed(f"scan references missing {table_class.name} table {table_id}")
    return JpegFile(
        segments=tuple(segments),
        scan=EntropyScan(data[scan_start:j]),
        trailer=data[j + 2 :],
        frame=frame,
        huffman=huffman,
        dc_table_id=dc_id,
        ac_table_id=ac_id,
    )


def serialize_jpeg(file: JpegFile) -> bytes:
    """Emit the file byte-exactly; length fields are recomputed."""
    out = bytearray()
    for seg in file.segments:
        out += seg.marker.to_bytes(2, "big")
        if seg.marker in BARE_MARKERS:
            if seg.payload:
                raise Malformed(f"bare marker {seg.marker:#06x} with payload")
            continue
        if len(seg.payload) > MAX_SEGMENT_PAYLOAD:
            raise SegmentTooLong(f"segment payload of {len(seg.payload)} bytes")
        out += (len(seg.payload) + 2).to_bytes(2, "big")
        out += seg.payload
    out += file.scan.stuffed_bytes
    out += b"\xff\xd9"
    out += file.trailer
    return bytes(out)


def unstuff(scan: EntropyScan) -> BitSeq:
    """Remove the 0x00 stuffed after each 0xFF; returns the scan bits."""
    raw = scan.stuffed_bytes
    out = raw.replace(b"\xff\x00", b"\xff")
    if out.replace(b"\xff", b"\xff\x00") != raw:
        _diagnose_stuffing(raw)
    return BitSeq(out, len(out) * 8)


def _diagnose_stuffing(raw: bytes) -> None:
    i = raw.find(b"\xff")
    while i >= 0:
        if i + 1 >= len(raw):
            raise MarkerInScan("scan ends with a bare 0xFF")
        nxt = raw[i + 1]
        if nxt != 0x00:
            if 0xD0 <= nxt <= 0xD7:
                raise HasRestartInterval(f"restart marker in scan at offset {i}")
            raise MarkerInScan(f"0xff{nxt:02x} at scan offset {i}")
        i = raw.find(b"\xff", i + 2)
    raise MarkerInScan("inconsistent byte stuffing")


def stuff(bits: BitSeq) -> EntropyScan:
    """Pad the final partial byte with 1-bits, then stuff 0x00 after 0xFF."""
    data = bytearray(bits.data)
    tail = bits.nbits & 7
    if tail:
        data[-1] |= MASKS[8 - tail]
    return EntropyScan(bytes(data).replace(b"\xff", b"\xff\x00"))


def insert_comment(file: JpegFile, payload: bytes) -> JpegFile:
    """Place a COM segment with ``payload`` immediately after SOI."""
    if len(payload) > MAX_SEGMENT_PAYLOAD:
        raise SegmentTooLong(f"comment payload of {len(payload)} bytes")
    if len(file.segments) > 1 and file.segments[1].marker == COM:
        raise CommentCollision("a COM segment already follows SOI")
    segments = (file.segments[0], Segment(COM, bytes(payload))) + file.segments[1:]
    return JpegFile(
        segments=segments,
        scan=file.scan,
        trailer=file.trailer,
        frame=file.frame,
        huffman=file.huffman,
        dc_table_id=file.dc_table_id,
        ac_table_id=file.ac_table_id,
    )


def comment_index(file: JpegFile) -> int:
    """Index of the first COM segment in segment order."""
    for i, seg in enumerate(file.segments):
        if seg.marker == COM:
            return i
    raise NoComment("no COM segment present")


def locate_comment(file: JpegFile) -> bytes:
    """Payload of the first COM segment following SOI."""
    return file.segments[comment_index(file)].payload
