"""Command-line front end: capacity, embed, extract, recover and batch.

Every error class maps to its own exit code so scripts can branch on the
failure mode. Output files are written to a temporary name and renamed into
place only on success.
"""
from __future__ import annotations

import argparse
import hashlib
import os
import re
import sys
import tempfile
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import errors as E
from .pipeline import embed, extract, measure, recover

EXIT_CODES: dict[type, int] = {
    E.Truncated: 11,
    E.Malformed: 10,
    E.NotBaseline: 12,
    E.HasRestartInterval: 13,
    E.MultiComponent: 14,
    E.SegmentTooLong: 15,
    E.MarkerInScan: 16,
    E.CommentCollision: 17,
    E.NoComment: 18,
    E.UnsupportedPadding: 19,
    E.InvalidTable: 20,
    E.BadCode: 21,
    E.Overrun: 22,
    E.ZeroValue: 23,
    E.SizeOverflow: 24,
    E.ValueOutOfRange: 25,
    E.DanglingContinuation: 26,
    E.ZeroGroupAfterContinuation: 27,
    E.RxyCorrupt: 28,
    E.TooManyBlocks: 29,
    E.LengthMismatch: 30,
    E.CapacityExceeded: 31,
    E.IndexOverflow: 32,
    E.TruncatedPayload: 33,
    E.BadTerminatePoint: 34,
    E.CorruptPadding: 37,
    E.SecretTooLarge: 35,
    E.VerificationFailed: 36,
}

_ROW_FIELDS = ("file", "ec_bits", "rate_percent", "t", "specials", "size_bytes")


def exit_code_for(exc: BaseException) -> int:
    for klass in type(exc).__mro__:
        if klass in EXIT_CODES:
            return EXIT_CODES[klass]
    return 1


def _write_atomic(path: Path, data: bytes) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=str(path.parent) or ".", prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def _report_lines(name: str, rep) -> list[str]:
    return [
        f"file: {name}",
        f"ec_bits: {rep.ec_bits}",
        f"rate_percent: {rep.rate_percent:.2f}",
        f"t: {rep.t}",
        f"specials: {rep.special_count}",
        f"original_size: {rep.original_size}",
        f"recompressed_scan_size: {rep.recompressed_scan_size}",
        f"saved_bytes: {rep.saved_bytes}",
        f"capacity_bytes: {rep.capacity_bytes}",
    ]


def _row(name: str, rep) -> str:
    return "\t".join(
        str(v)
        for v in (
            name,
            rep.ec_bits,
            f"{rep.rate_percent:.2f}",
            rep.t,
            rep.special_count,
            rep.original_size,
        )
    )


def _cmd_capacity(args) -> int:
    rep = measure(Path(args.input).read_bytes(), t_policy=args.t_policy)
    if args.format == "rows":
        print("\t".join(_ROW_FIELDS))
        print(_row(os.path.basename(args.input), rep))
    else:
        for line in _report_lines(os.path.basename(args.input), rep):
            print(line)
    return 0


def _cmd_embed(args) -> int:
    cover = Path(args.input).read_bytes()
    secret = Path(args.secret).read_bytes()
    marked = embed(cover, secret, t_policy=args.t_policy)
    if extract(marked) != secret:
        raise E.VerificationFailed("re-extracted secret does not match")
    _write_atomic(Path(args.out), marked)
    print(f"embedded {len(secret)} bytes into {args.out} ({len(marked)} bytes)")
    return 0


def _cmd_extract(args) -> int:
    secret = extract(Path(args.input).read_bytes())
    _write_atomic(Path(args.out), secret)
    print(f"extracted {len(secret)} bytes to {args.out}")
    return 0


def _cmd_recover(args) -> int:
    restored = recover(Path(args.input).read_bytes())
    digest = hashlib.sha256(restored).hexdigest()
    if args.reference:
        if Path(args.reference).read_bytes() != restored:
            raise E.VerificationFailed("recovered file differs from the reference")
    _write_atomic(Path(args.out), restored)
    print(f"recovered {len(restored)} bytes to {args.out}")
    print(f"sha256: {digest}")
    return 0


_QF_NAME = re.compile(r"^(?P<stem>.+?)[_-]q(?P<qf>\d{1,3})$")


def _batch_key(path: Path):
    m = _QF_NAME.match(path.stem)
    if m:
        return (m.group("stem"), int(m.group("qf")))
    return (path.stem, -1)


def _batch_one(path: Path, t_policy: str):
    try:
        rep = measure(path.read_bytes(), t_policy=t_policy)
        return path.name, rep, None
    except (E.JpegHideError, OSError) as exc:
        return path.name, None, exc


def _cmd_batch(args) -> int:
    root = Path(args.directory)
    files = sorted(
        (p for p in root.iterdir() if p.suffix.lower() in (".jpg", ".jpeg")),
        key=_batch_key,
    )
    if not files:
        print(f"no JPEG files in {root}", file=sys.stderr)
        return 1
    workers = args.workers or min(4, os.cpu_count() or 1)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        results = list(pool.map(lambda p: _batch_one(p, args.t_policy), files))

    first_error: BaseException | None = None
    if args.format == "rows":
        print("\t".join(_ROW_FIELDS))
    for name, rep, exc in results:
        if exc is not None:
            print(f"{name}\tERROR\t{type(exc).__name__}: {exc}", file=sys.stderr)
            if first_error is None:
                first_error = exc
            continue
        if args.format == "rows":
            print(_row(name, rep))
        else:
            print(
                f"{name:<28} EC={rep.ec_bits:>8} bits  Rate={rep.rate_percent:5.2f}%  "
                f"t={rep.t:>2}  specials={rep.special_count}"
            )
    return exit_code_for(first_error) if first_error else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="jpeghide",
        description="Hide data losslessly in baseline JPEG files and restore them byte-exactly.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("capacity", help="report embedding capacity of a cover")
    p.add_argument("input")
    p.add_argument("--t-policy", choices=("max", "optimize"), default="max")
    p.add_argument("--format", choices=("text", "rows"), default="text")
    p.set_defaults(func=_cmd_capacity)

    p = sub.add_parser("embed", help="embed a secret file into a cover")
    p.add_argument("input")
    p.add_argument("--secret", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--t-policy", choices=("max", "optimize"), default="max")
    p.set_defaults(func=_cmd_embed)

    p = sub.add_parser("extract", help="extract the secret from a marked file")
    p.add_argument("input")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_extract)

    p = sub.add_parser("recover", help="restore the original cover from a marked file")
    p.add_argument("input")
    p.add_argument("--out", required=True)
    p.add_argument("--reference", help="original file to verify the recovery against")
    p.set_defaults(func=_cmd_recover)

    p = sub.add_parser("batch", help="capacity table for a directory of JPEG files")
    p.add_argument("directory")
    p.add_argument("--format", choices=("text", "rows"), default="text")
    p.add_argument("--t-policy", choices=("max", "optimize"), default="max")
    p.add_argument("--workers", type=int, default=0, help="0 picks a default")
    p.set_defaults(func=_cmd_batch)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except E.JpegHideError as exc:
        print(f"error [{type(exc).__name__}]: {exc}", file=sys.stderr)
        return exit_code_for(exc)
    except OSError as exc:
        print(f"error [io]: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
