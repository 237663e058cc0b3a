import random

import pytest

from conftest import build_jpeg, example_block_zigzag, random_block

from jpeghide.bitio import BitSeq
from jpeghide.container import TableClass, parse_jpeg, stuff, unstuff
from jpeghide.entropy import build_huffman, decode_scan
from jpeghide.errors import BadTerminatePoint, JpegHideError, TooManyBlocks
from jpeghide.transcode import (
    block_tpoint,
    cut_block,
    find_cut,
    image_tpoint,
    optimize_transcode,
    transcode_backward,
    transcode_forward,
)

EXAMPLE_RXY = "100" "00" "101" "10" "111100" "01" "000"


def _decode_all(data):
    f = parse_jpeg(data)
    dc = build_huffman(f.huffman_spec(TableClass.DC))
    ac = build_huffman(f.huffman_spec(TableClass.AC))
    bits = unstuff(f.scan)
    recs = decode_scan(bits, f.frame.block_count, dc, ac)
    return f, dc, ac, bits, recs


def _roundtrip(blocks, t=None, blocks_wide=None, force_special=()):
    """Returns (original scan bytes, forward result, recovered scan bytes)."""
    data = build_jpeg(blocks, blocks_wide=blocks_wide or len(blocks))
    f, dc, ac, bits, recs = _decode_all(data)
    if t is None:
        t = image_tpoint(recs)
    result = transcode_forward(
        bits, recs, t, ac, len(f.scan.stuffed_bytes), force_special=force_special
    )
    back = transcode_backward(
        result.new_scan_bits, t, result.special_indexes, dc, ac, len(recs)
    )
    return f.scan.stuffed_bytes, result, stuff(back).stuffed_bytes


def test_block_tpoint_examples():
    assert block_tpoint(example_block_zigzag()) == 12
    assert block_tpoint([0] * 64) == 0
    low = [0] * 64
    low[63] = -3
    assert block_tpoint(low) == 64
    capped = [2, -2] * 32
    assert block_tpoint(capped) == 0  # strict comparison, |2| does not count


def test_image_tpoint_max_and_clamp():
    blocks = [[0] * 64 for _ in range(3)]
    blocks[0][4] = 5   # position 5
    blocks[1][11] = -4  # position 12
    assert image_tpoint(blocks) == 12
    assert image_tpoint([[0] * 64]) == 1
    with pytest.raises(ValueError):
        image_tpoint([])


def test_image_tpoint_matches_bruteforce_oracle():
    rng = random.Random(555)
    for _ in range(20):
        blocks = [random_block(rng, rng.random() * 0.3, 10) for _ in range(50)]
        # independent double loop over every block and position
        best = 0
        for b in blocks:
            for j in range(1, 65):
                if abs(b[j - 1]) > 2:
                    best = max(best, j)
        assert image_tpoint(blocks) == max(best, 1)


def test_cut_block_worked_example():
    coeffs = example_block_zigzag()
    data = build_jpeg([coeffs])
    f, dc, ac, bits, recs = _decode_all(data)
    rec = recs[0]
    prefix, rxy_start = cut_block(rec, bits, 12)
    assert rxy_start == 13
    # the replaced standard region after the cut measures 32 bits
    cut_bit, cut_pos = find_cut(rec, 12)
    assert cut_pos == 12
    assert rec.end - cut_bit == 32
    assert len(prefix) == (rec.end - rec.start) - 32


def test_cut_block_eob_first_is_standard_only():
    coeffs = [0] * 64
    coeffs[0] = 9
    coeffs[4] = 3  # position 5, then EOB
    data = build_jpeg([coeffs])
    f, dc, ac, bits, recs = _decode_all(data)
    prefix, rxy_start = cut_block(recs[0], bits, 40)
    assert rxy_start is None
    assert len(prefix) == recs[0].end - recs[0].start


def test_cut_block_crossing_symbol():
    coeffs = [0] * 64
    coeffs[7] = 1    # position 8
    coeffs[19] = -2  # position 20, the symbol crossing t=12
    coeffs[25] = 1   # position 26, above the cut
    data = build_jpeg([coeffs])
    f, dc, ac, bits, recs = _decode_all(data)
    prefix, rxy_start = cut_block(recs[0], bits, 12)
    assert rxy_start == 21
    cut_bit, cut_pos = find_cut(recs[0], 12)
    assert cut_pos == 20


def test_forward_worked_example():
    coeffs = example_block_zigzag()
    data = build_jpeg([coeffs])
    f, dc, ac, bits, recs = _decode_all(data)
    result = transcode_forward(bits, recs, 12, ac, len(f.scan.stuffed_bytes))
    assert result.special_indexes == ()
    cut_bit, _ = find_cut(recs[0], 12)
    prefix_len = cut_bit - recs[0].start
    tail = result.new_scan_bits.to01()[prefix_len:]
    assert tail == EXAMPLE_RXY
    assert len(tail) == 21
    saved_bits = (recs[0].end - cut_bit) - len(tail)
    assert saved_bits >= 11


def test_forward_backward_inverse_on_example():
    coeffs = example_block_zigzag()
    scan, result, back = _roundtrip([coeffs], t=12)
    assert back == scan


def test_special_rule_a_magnitude_above_cut():
    smooth = [0] * 64
    smooth[0] = 4
    smooth[5] = 1
    spiky = [0] * 64
    spiky[0] = 2
    spiky[3] = 3    # position 4 keeps the cut low
    spiky[29] = -7  # above t=4 with magnitude over 2
    data = build_jpeg([smooth, spiky], blocks_wide=2)
    f, dc, ac, bits, recs = _decode_all(data)
    result = transcode_forward(bits, recs, 4, ac, len(f.scan.stuffed_bytes))
    assert 1 in result.special_indexes
    back = transcode_backward(result.new_scan_bits, 4, result.special_indexes, dc, ac, 2)
    assert stuff(back).stuffed_bytes == f.scan.stuffed_bytes


def test_special_rule_b_dense_ones():
    dense = [0] * 64
    dense[0] = 3
    dense[1] = 4  # position 2 sets the block's own point
    for i in range(2, 64):
        dense[i] = 1 if i % 2 else -1
    data = build_jpeg([dense])
    f, dc, ac, bits, recs = _decode_all(data)
    result = transcode_forward(bits, recs, 2, ac, len(f.scan.stuffed_bytes))
    assert result.special_indexes == (0,)
    assert result.new_scan.stuffed_bytes == f.scan.stuffed_bytes  # special keeps every bit


def test_forced_special_keeps_other_blocks_identical():
    rng = random.Random(4)
    blocks = [random_block(rng, 0.15, 3) for _ in range(8)]
    blocks[2][40] = 2  # give block 2 a tail
    scan, plain, back_plain = _roundtrip(blocks, blocks_wide=8)
    scan2, forced, back_forced = _roundtrip(blocks, blocks_wide=8, force_special=(3,))
    assert back_plain == scan
    assert back_forced == scan
    assert 3 in forced.special_indexes
    assert set(plain.special_indexes) <= set(forced.special_indexes)


def test_bulk_roundtrip_mixed_blocks():
    rng = random.Random(20240802)
    total = 0
    scans = 0
    while total < 10_000:
        n = 100
        blocks = []
        for _ in range(n):
            kind = rng.randrange(5)
            if kind == 0:
                blocks.append(random_block(rng, 0.05, 2))
            elif kind == 1:
                blocks.append(random_block(rng, 0.4, 2))
            elif kind == 2:
                blocks.append(random_block(rng, 0.1, 30))
            elif kind == 3:
                b = random_block(rng, 0.06, 2)
                b[63] = rng.choice((-2, -1, 1, 2))  # nonzero at position 64
                blocks.append(b)
            else:
                b = [0] * 64
                b[0] = rng.randint(-100, 100)
                if rng.random() < 0.8:
                    b[rng.randrange(1, 64)] = rng.choice((-5, -3, 3, 5))
                blocks.append(b)
        t = rng.choice((1, 2, 5, 12, 30, 63, 64))
        scan, result, back = _roundtrip(blocks, t=t, blocks_wide=n)
        assert back == scan
        total += n
        scans += 1
    assert scans >= 100


def test_savings_accounting_matches_byte_difference():
    rng = random.Random(11)
    blocks = [random_block(rng, 0.08, 2) for _ in range(64)]
    data = build_jpeg(blocks, blocks_wide=8)
    f, dc, ac, bits, recs = _decode_all(data)
    result = transcode_forward(bits, recs, 3, ac, len(f.scan.stuffed_bytes))
    direct = len(f.scan.stuffed_bytes) - len(stuff(result.new_scan_bits).stuffed_bytes)
    assert result.saved_bytes == direct


def test_backward_rejects_tampered_parameters():
    rng = random.Random(21)
    blocks = [random_block(rng, 0.1, 2) for _ in range(16)]
    for b in blocks[:3]:
        b[50] = 1
    scan, result, back = _roundtrip(blocks, t=9, blocks_wide=16)
    assert back == scan
    data = build_jpeg(blocks, blocks_wide=16)
    f, dc, ac, _, recs = _decode_all(data)
    # wrong terminate point or a corrupted special list must not silently
    # produce the same scan
    for bad_t, bad_specials in ((30, result.special_indexes), (9, (5,))):
        try:
            wrong = transcode_backward(
                result.new_scan_bits, bad_t, bad_specials, dc, ac, 16
            )
        except JpegHideError:
            continue
        assert stuff(wrong).stuffed_bytes != f.scan.stuffed_bytes


def test_forward_parameter_validation(std_ac):
    with pytest.raises(BadTerminatePoint):
        transcode_forward(BitSeq(b"", 0), [], 0, std_ac, 0)
    with pytest.raises(BadTerminatePoint):
        transcode_backward(BitSeq(b"", 0), 65, (), std_ac, std_ac, 0)
    with pytest.raises(TooManyBlocks):
        transcode_forward(BitSeq(b"", 0), [None] * 65536, 5, std_ac, 0)


def test_optimizer_never_worse_than_max_policy():
    rng = random.Random(31)
    blocks = []
    for _ in range(128)[:]:
        b = random_block(rng, 0.12, 2)
        blocks.append(b)
    blocks[7][45] = 9  # one outlier forces a high maximum point
    data = build_jpeg(blocks, blocks_wide=16)
    f, dc, ac, bits, recs = _decode_all(data)
    t_max = image_tpoint(recs)
    base = transcode_forward(bits, recs, t_max, ac, len(f.scan.stuffed_bytes))
    best = optimize_transcode(bits, recs, ac, len(f.scan.stuffed_bytes))
    cap = lambda r: r.saved_bytes - 11 - 2 * len(r.special_indexes)
    assert cap(best) >= cap(base)
    back = transcode_backward(best.new_scan_bits, best.t, best.special_indexes, dc, ac, len(recs))
    assert stuff(back).stuffed_bytes == f.scan.stuffed_bytes


def test_decoder_mirror_determinism():
    # the backward walker must switch regions exactly where the forward
    # cut landed, for every block
    from jpeghide.entropy import walk_standard

    rng = random.Random(77)
    blocks = [random_block(rng, 0.12, 2) for _ in range(64)]
    for b in blocks[:8]:
        b[rng.randrange(32, 64)] = rng.choice((-2, -1, 1, 2))
    data = build_jpeg(blocks, blocks_wide=8)
    f, dc, ac, bits, recs = _decode_all(data)
    for t in (1, 4, 11, 29, 64):
        result = transcode_forward(bits, recs, t, ac, len(f.scan.stuffed_bytes))
        specials = set(result.special_indexes)
        buf = result.new_scan_bits.data + b"\x00" * 8
        nbits = result.new_scan_bits.nbits
        pos = 0
        from jpeghide.rxy import decode_raw

        for idx, rec in enumerate(recs):
            start = pos
            walk_t = 65 if idx in specials else t
            end, zpos, by_eob = walk_standard(buf, nbits, pos, dc.lookup, ac.lookup, walk_t)
            pos = end
            if idx in specials:
                assert end - start == rec.end - rec.start
                continue
            cut_bit, cut_pos = find_cut(rec, t)
            if cut_pos is None:
                assert by_eob and end - start == rec.end - rec.start
                continue
            assert zpos == cut_pos
            assert end - start == cut_bit - rec.start
            if cut_pos >= 64:
                continue
            zz = cut_pos
            while True:
                run, value, consumed = decode_raw(buf, nbits, pos)
                pos += consumed
                if value is None:
                    break
                zz += run + 1
                if zz == 64:
                    break


def test_backward_rejects_inflated_tail(std_dc, std_ac):
    # a tail whose short coding is as long as its standard coding can only
    # appear in a special block; seeing one decoded normally means the
    # stream was tampered with
    from jpeghide.bitio import BitSeq
    from jpeghide.errors import RxyCorrupt

    # DC diff 7, then coefficient 3 at position 4 (the cut symbol for t=4),
    # then a run-free tail of three 1s: 5 short-code bits each against 3
    # standard bits, so no encoder would have left this block unmarked
    head = std_dc.code_string(3) + "111"          # DC size 3, value 7
    head += std_ac.code_string(0x22) + "11"       # 2/2, value 3
    tail = ("001" "10") * 3 + "000"
    tampered = BitSeq.from01(head + tail)
    with pytest.raises(RxyCorrupt):
        transcode_backward(tampered, 4, (), std_dc, std_ac, 1)
