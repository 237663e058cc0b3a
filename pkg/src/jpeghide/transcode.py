"""Split each block at the terminate point, recode the sparse tail with the
short run/value code, and restore the original scan byte-exactly.

The terminate point t is the highest zigzag position anywhere in the image
whose coefficient magnitude exceeds 2. Below the cut a block keeps its
original bits verbatim; above it, nonzeros are all in {-2, -1, 1, 2} and the
short code beats the standard one on sparse data. Blocks where that fails
for any reason are carried verbatim as "specials" and their indexes recorded
so the decoder can skip them.
"""
from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass

from .bitio import BitSeq, BitWriter, extract_bits
from .container import EntropyScan, stuff
from .entropy import (
    BlockRecord,
    HuffmanCodec,
    _encode_region,
    walk_standard,
)
from .payload import WIRE_OVERHEAD
from .errors import (
    BadCode,
    BadTerminatePoint,
    LengthMismatch,
    Overrun,
    RxyCorrupt,
    SizeOverflow,
    TooManyBlocks,
)
from .rxy import decode_raw as _rxy_decode_raw, rxy_encode_bits

#: Zigzag position in 1..64; 1 means only DC is guaranteed standard-coded.
TerminatePoint = int

#: Header bytes each recorded special block index costs.
_SPECIAL_INDEX_BYTES = 2


@dataclass(frozen=True)
class TranscodeResult:
    new_scan_bits: BitSeq
    new_scan: EntropyScan
    special_indexes: tuple[int, ...]
    t: int
    saved_bytes: int


def block_tpoint(block) -> int:
    """Largest zigzag position whose magnitude exceeds 2, or 0 if none."""
    coeffs = block.coeffs if hasattr(block, "coeffs") else block
    for i in range(63, -1, -1):
        v = coeffs[i]
        if v > 2 or v < -2:
            return i + 1
    return 0


def image_tpoint(blocks) -> int:
    """Image-wide terminate point: max of the per-block points, at least 1."""
    t = 0
    seen = False
    for b in blocks:
        seen = True
        bt = block_tpoint(b)
        if bt > t:
            t = bt
    if not seen:
        raise ValueError("need at least one block")
    return t if t >= 1 else 1


def find_cut(record: BlockRecord, t: int) -> tuple[int, int | None]:
    """Where the standard-coded region of a block ends under ``t``.

    Returns (cut bit offset, position of the cut symbol). The walk stops
    after the first symbol whose end position reaches t, so a symbol may
    cross t. A None position means an EOB arrived first and the whole block
    stays standard-coded.
    """
    for p, bit in record.trace:
        if p >= t:
            return bit, p
    return record.end, None


def cut_block(
    record: BlockRecord, original_bits: BitSeq, t: int
) -> tuple[BitSeq, int | None]:
    """Verbatim prefix bits of the block plus the 1-based start position of
    the recoded region (None when the block is standard-only)."""
    if not 1 <= t <= 64:
        raise BadTerminatePoint(f"terminate point {t}")
    cut_bit, cut_pos = find_cut(record, t)
    prefix = BitSeq.from_int(
        extract_bits(original_bits.data, record.start, cut_bit), cut_bit - record.start
    )
    if cut_pos is None or cut_pos >= 64:
        return prefix, None
    return prefix, cut_pos + 1


def _rxy_region(coeffs, region_start: int) -> tuple[int, int, bool]:
    """Short-code bits for nonzeros at positions >= ``region_start``, with
    runs counted from the region start and a 000 terminator unless position
    64 holds a nonzero. The ok flag is False when a magnitude above 2 makes
    the region uncodable."""
    acc = 0
    n = 0
    prev = region_start - 1
    last_nz = 0
    for i in range(region_start - 1, 64):
        v = coeffs[i]
        if v:
            if v > 2 or v < -2:
                return 0, 0, False
            bits, nb = rxy_encode_bits(i - prev, v)
            acc = (acc << nb) | bits
            n += nb
            prev = i + 1
            last_nz = i + 1
    if last_nz != 64:
        acc <<= 3
        n += 3
    return acc, n, True


def transcode_forward(
    bits: BitSeq,
    records: list[BlockRecord],
    t: int,
    ac_codec: HuffmanCodec,
    original_scan_bytes: int,
    *,
    force_special=(),
) -> TranscodeResult:
    """Recode the whole scan under terminate point ``t``.

    A block is carried verbatim and recorded as special when its tail holds
    a magnitude above 2, when the short code would not be strictly shorter,
    or when canonical re-encoding of the tail does not reproduce the
    original bits (which is what recovery will do). ``force_special`` exists
    for diagnostics and tests.
    """
    if not 1 <= t <= 64:
        raise BadTerminatePoint(f"terminate point {t}")
    if len(records) > 0xFFFF:
        raise TooManyBlocks(f"{len(records)} blocks; indexes are 16-bit")
    data = bits.data
    ac_codes = ac_codec.codes
    writer = BitWriter()
    specials: list[int] = []
    forced = frozenset(force_special)

    for idx, rec in enumerate(records):
        if idx in forced:
            specials.append(idx)
            writer.write_range(data, rec.start, rec.end)
            continue
        cut_bit, cut_pos = find_cut(rec, t)
        if cut_pos is None or cut_pos >= 64:
            writer.write_range(data, rec.start, rec.end)
            continue
        orig_n = rec.end - cut_bit
        acc, n, ok = _rxy_region(rec.coeffs, cut_pos + 1)
        special = not ok or n >= orig_n
        if not special:
            try:
                enc_acc, enc_n = _encode_region(rec.coeffs, cut_pos + 1, None, ac_codes)
            except (BadCode, SizeOverflow):
                special = True
            else:
                if enc_n != orig_n or enc_acc != extract_bits(data, cut_bit, rec.end):
                    special = True
        if special:
            specials.append(idx)
            writer.write_range(data, rec.start, rec.end)
        else:
            writer.write_range(data, rec.start, cut_bit)
            writer.write(acc, n)

    new_bits = writer.getvalue()
    new_scan = stuff(new_bits)
    return TranscodeResult(
        new_scan_bits=new_bits,
        new_scan=new_scan,
        special_indexes=tuple(specials),
        t=t,
        saved_bytes=original_scan_bytes - len(new_scan.stuffed_bytes),
    )


def transcode_backward(
    new_bits: BitSeq,
    t: int,
    special_indexes,
    dc_codec: HuffmanCodec,
    ac_codec: HuffmanCodec,
    block_count: int,
) -> BitSeq:
    """Invert :func:`transcode_forward`, reproducing the original scan bits.

    Per block the decoder mirrors the encoder's cut rule on the verbatim
    standard region, then decodes the short-code tail and re-encodes it
    canonically from the cut position onward.
    """
    if not 1 <= t <= 64:
        raise BadTerminatePoint(f"terminate point {t}")
    buf = new_bits.data + b"\x00" * 8
    nbits = new_bits.nbits
    dc_lut = dc_codec.lookup
    ac_lut = ac_codec.lookup
    ac_codes = ac_codec.codes
    specials = frozenset(special_indexes)
    writer = BitWriter()
    pos = 0

    for idx in range(block_count):
        start = pos
        walk_t = 65 if idx in specials else t
        end, zpos, by_eob = walk_standard(buf, nbits, pos, dc_lut, ac_lut, walk_t)
        if end > nbits:
            raise Overrun(f"scan exhausted inside block {idx}")
        writer.write_range(buf, start, end)
        pos = end
        if walk_t == 65 or by_eob or zpos >= 64:
            continue

        coeffs = [0] * 64
        zz = zpos
        rxy_start = pos
        while True:
            run, value, consumed = _rxy_decode_raw(buf, nbits, pos)
            pos += consumed
            if value is None:
                break
            zz += run + 1
            if zz > 64:
                raise RxyCorrupt(f"position {zz} past block end in block {idx}")
            coeffs[zz - 1] = value
            if zz == 64:
                break
        enc_acc, enc_n = _encode_region(coeffs, zpos + 1, None, ac_codes)
        # Mirror of the encoder's length rule: had this tail not been
        # strictly shorter than its standard coding, the block would have
        # been carried as a special instead.
        if pos - rxy_start >= enc_n:
            raise RxyCorrupt(
                f"block {idx} tail is not shorter than its standard coding"
            )
        writer.write(enc_acc, enc_n)

    tail = nbits - pos
    if tail >= 8:
        raise LengthMismatch(f"{tail} unconsumed bits after the last block")
    if tail and extract_bits(buf, pos, nbits) != (1 << tail) - 1:
        raise LengthMismatch("scan padding is not 1-bits")
    return writer.getvalue()


def _estimate_sweep(records) -> list[tuple[float, int]]:
    """Score every candidate terminate point without re-encoding.

    The score is the negated estimated cost (scan bytes plus two bytes per
    special index); stuffing and non-canonical sources are ignored, so this
    ranks candidates rather than pricing them exactly.
    """
    pre = []
    for rec in records:
        coeffs = rec.coeffs
        nzpos = [i + 1 for i in range(1, 64) if coeffs[i]]
        suffix = [0] * (len(nzpos) + 1)
        for k in range(len(nzpos) - 1, 0, -1):
            run = nzpos[k] - nzpos[k - 1] - 1
            suffix[k] = suffix[k + 1] + 3 * (run // 6) + 5
        trace_pos = [p for p, _ in rec.trace]
        trace_bit = [b for _, b in rec.trace]
        pre.append(
            (trace_pos, trace_bit, rec.start, rec.end, block_tpoint(coeffs), nzpos, suffix)
        )

    scores = []
    for t in range(1, 65):
        total_bits = 0
        nspec = 0
        for trace_pos, trace_bit, start, end, btp, nzpos, suffix in pre:
            i = bisect_left(trace_pos, t)
            if i == len(trace_pos):
                total_bits += end - start
                continue
            cut_pos = trace_pos[i]
            cut_bit = trace_bit[i]
            if cut_pos >= 64:
                total_bits += end - start
                continue
            if btp > cut_pos:
                total_bits += end - start
                nspec += 1
                continue
            k0 = bisect_left(nzpos, cut_pos + 1)
            if k0 == len(nzpos):
                rxy_n = 3
            else:
                first_run = nzpos[k0] - cut_pos - 1
                rxy_n = 3 * (first_run // 6) + 5 + suffix[k0 + 1]
                if nzpos[-1] != 64:
                    rxy_n += 3
            orig_n = end - cut_bit
            if rxy_n >= orig_n:
                total_bits += end - start
                nspec += 1
            else:
                total_bits += (cut_bit - start) + rxy_n
        scores.append((-(total_bits / 8.0 + _SPECIAL_INDEX_BYTES * nspec), t))
    return scores


def optimize_transcode(
    bits: BitSeq,
    records: list[BlockRecord],
    ac_codec: HuffmanCodec,
    original_scan_bytes: int,
) -> TranscodeResult:
    """Pick the terminate point that maximizes net capacity.

    Candidates are ranked by the estimate sweep; the real transcoder then
    runs on a short list (always including the plain maximum point) and the
    best actual outcome wins, so this never does worse than the default
    policy. Ties prefer the smaller terminate point.
    """
    t_max = image_tpoint(records)
    ranked = sorted(_estimate_sweep(records), reverse=True)
    shortlist = {t for _, t in ranked[:3]} | {t_max}
    best = None
    best_key = None
    for t in sorted(shortlist):
        res = transcode_forward(bits, records, t, ac_codec, original_scan_bytes)
        cap = res.saved_bytes - WIRE_OVERHEAD - _SPECIAL_INDEX_BYTES * len(res.special_indexes)
        key = (cap, -res.t)
        if best is None or key > best_key:
            best, best_key = res, key
    return best
