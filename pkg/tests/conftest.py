"""Shared fixtures: standard Huffman table specs, synthetic JPEG builders
and the generated image corpus."""
from __future__ import annotations

import importlib.util
import io
import sys
from pathlib import Path

import pytest

from jpeghide.bitio import BitWriter
from jpeghide.container import HuffmanTableSpec, TableClass, stuff
from jpeghide.entropy import ZIGZAG_TO_NATURAL, build_huffman, encode_block

# Standard luminance table definitions (counts per code length and symbol
# order) as every baseline encoder ships them.
STD_DC_BITS = (0, 1, 5, 1, 1, 1, 1, 1, 1, 0, 0, 0, 0, 0, 0, 0)
STD_DC_SYMBOLS = tuple(range(12))

STD_AC_BITS = (0, 2, 1, 3, 3, 2, 4, 3, 5, 5, 4, 4, 0, 0, 1, 0x7D)
STD_AC_SYMBOLS = (
    0x01, 0x02, 0x03, 0x00, 0x04, 0x11, 0x05, 0x12,
    0x21, 0x31, 0x41, 0x06, 0x13, 0x51, 0x61, 0x07,
    0x22, 0x71, 0x14, 0x32, 0x81, 0x91, 0xA1, 0x08,
    0x23, 0x42, 0xB1, 0xC1, 0x15, 0x52, 0xD1, 0xF0,
    0x24, 0x33, 0x62, 0x72, 0x82, 0x09, 0x0A, 0x16,
    0x17, 0x18, 0x19, 0x1A, 0x25, 0x26, 0x27, 0x28,
    0x29, 0x2A, 0x34, 0x35, 0x36, 0x37, 0x38, 0x39,
    0x3A, 0x43, 0x44, 0x45, 0x46, 0x47, 0x48, 0x49,
    0x4A, 0x53, 0x54, 0x55, 0x56, 0x57, 0x58, 0x59,
    0x5A, 0x63, 0x64, 0x65, 0x66, 0x67, 0x68, 0x69,
    0x6A, 0x73, 0x74, 0x75, 0x76, 0x77, 0x78, 0x79,
    0x7A, 0x83, 0x84, 0x85, 0x86, 0x87, 0x88, 0x89,
    0x8A, 0x92, 0x93, 0x94, 0x95, 0x96, 0x97, 0x98,
    0x99, 0x9A, 0xA2, 0xA3, 0xA4, 0xA5, 0xA6, 0xA7,
    0xA8, 0xA9, 0xAA, 0xB2, 0xB3, 0xB4, 0xB5, 0xB6,
    0xB7, 0xB8, 0xB9, 0xBA, 0xC2, 0xC3, 0xC4, 0xC5,
    0xC6, 0xC7, 0xC8, 0xC9, 0xCA, 0xD2, 0xD3, 0xD4,
    0xD5, 0xD6, 0xD7, 0xD8, 0xD9, 0xDA, 0xE1, 0xE2,
    0xE3, 0xE4, 0xE5, 0xE6, 0xE7, 0xE8, 0xE9, 0xEA,
    0xF1, 0xF2, 0xF3, 0xF4, 0xF5, 0xF6, 0xF7, 0xF8,
    0xF9, 0xFA,
)

#: Worked-example block used across the suite, as its row-major 8x8 matrix.
EXAMPLE_MATRIX = (
    (12, 17, 10, -5, 0, -2, 0, 0),
    (15, 8, 0, 0, 0, 0, 0, 0),
    (-9, 0, 0, 0, 0, -1, 0, 0),
    (3, 4, 0, 0, 0, 0, 0, 0),
    (0, 0, 0, 0, 0, 0, 0, 0),
    (1, 0, 0, 0, 0, 0, 0, 0),
    (0, 0, 0, 0, 0, 0, 0, 0),
    (0, 0, 0, 0, 0, 0, 0, 0),
)


def example_block_zigzag() -> list[int]:
    flat = [v for row in EXAMPLE_MATRIX for v in row]
    return [flat[n] for n in ZIGZAG_TO_NATURAL]


def make_std_dc_spec() -> HuffmanTableSpec:
    return HuffmanTableSpec(TableClass.DC, 0, STD_DC_BITS, STD_DC_SYMBOLS)


def make_std_ac_spec() -> HuffmanTableSpec:
    return HuffmanTableSpec(TableClass.AC, 0, STD_AC_BITS, STD_AC_SYMBOLS)


@pytest.fixture(scope="session")
def std_dc_spec():
    return make_std_dc_spec()


@pytest.fixture(scope="session")
def std_ac_spec():
    return make_std_ac_spec()


@pytest.fixture(scope="session")
def std_dc(std_dc_spec):
    return build_huffman(std_dc_spec)


@pytest.fixture(scope="session")
def std_ac(std_ac_spec):
    return build_huffman(std_ac_spec)


def _dht_payload(spec: HuffmanTableSpec) -> bytes:
    return (
        bytes([(int(spec.table_class) << 4) | spec.table_id])
        + bytes(spec.bit_counts)
        + bytes(spec.symbols)
    )


def _segment(marker: int, payload: bytes) -> bytes:
    return marker.to_bytes(2, "big") + (len(payload) + 2).to_bytes(2, "big") + payload


def build_jpeg(blocks, blocks_wide: int | None = None) -> bytes:
    """Assemble a single-component baseline JPEG from zigzag coefficient
    lists (DC entries are the coded differences) using the standard tables."""
    n = len(blocks)
    if blocks_wide is None:
        blocks_wide = n
    blocks_high, rem = divmod(n, blocks_wide)
    if rem:
        raise ValueError("blocks must fill a rectangle")
    dc = build_huffman(make_std_dc_spec())
    ac = build_huffman(make_std_ac_spec())
    w = BitWriter()
    for b in blocks:
        seq = encode_block(b, 1, dc, ac)
        w.write(seq.to_int(), seq.nbits)
    scan = stuff(w.getvalue())
    sof = bytes([8]) + (8 * blocks_high).to_bytes(2, "big") + (8 * blocks_wide).to_bytes(2, "big") + bytes([1, 1, 0x11, 0])
    sos = bytes([1, 1, 0x00, 0, 63, 0])
    return (
        b"\xff\xd8"
        + _segment(0xFFC4, _dht_payload(make_std_dc_spec()) + _dht_payload(make_std_ac_spec()))
        + _segment(0xFFC0, sof)
        + _segment(0xFFDA, sos)
        + scan.stuffed_bytes
        + b"\xff\xd9"
    )


def random_block(rng, density: float, magnitude: int = 1023, dc_magnitude: int = 1023) -> list[int]:
    """Random zigzag block: each AC position is nonzero with ``density``."""
    coeffs = [0] * 64
    coeffs[0] = rng.randint(-dc_magnitude, dc_magnitude)
    for i in range(1, 64):
        if rng.random() < density:
            v = 0
            while v == 0:
                v = rng.randint(-magnitude, magnitude)
            coeffs[i] = v
    return coeffs


def pil_jpeg(pixels, quality: int) -> bytes:
    """Encode a uint8 grayscale array with Pillow's baseline encoder."""
    from PIL import Image

    buf = io.BytesIO()
    Image.fromarray(pixels, mode="L").save(
        buf, format="JPEG", quality=quality, optimize=False, progressive=False
    )
    return buf.getvalue()


def _load_corpus_module():
    path = Path(__file__).resolve().parents[1] / "scripts" / "generate_corpus.py"
    spec = importlib.util.spec_from_file_location("generate_corpus", path)
    mod = importlib.util.module_from_spec(spec)
    sys.modules["generate_corpus"] = mod
    spec.loader.exec_module(mod)
    return mod


@pytest.fixture(scope="session")
def corpusgen():
    return _load_corpus_module()


@pytest.fixture(scope="session")
def corpus_dir(tmp_path_factory, corpusgen) -> Path:
    d = tmp_path_factory.mktemp("corpus")
    corpusgen.write_corpus(d)
    return d


def waves_pixels(size: int):
    """Smooth periodic pattern with reliable positive capacity."""
    import numpy as np

    y, x = np.mgrid[0:size, 0:size].astype(np.float64)
    img = (
        np.sin(x / 23.0 + y / 31.0)
        + 0.7 * np.sin((x + y) / 17.0)
        + 0.4 * np.sin(y / 41.0)
    )
    img -= img.min()
    return (8 + img / img.max() * 239).round().astype(np.uint8)


@pytest.fixture(scope="session")
def small_cover() -> bytes:
    """A quick 160x160 cover with positive capacity under both policies."""
    return pil_jpeg(waves_pixels(160), 90)
