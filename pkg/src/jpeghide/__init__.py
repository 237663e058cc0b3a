"""Lossless data hiding in baseline JPEG files.

High-frequency quantized DCT coefficients are transcoded into a shorter
custom code, the freed bytes carry a secret plus the recovery metadata in a
comment segment, and the original file is restored byte-exactly on demand.
"""
from .errors import (
    BadCode,
    BadTerminatePoint,
    CapacityExceeded,
    CommentCollision,
    CorruptPadding,
    DanglingContinuation,
    HasRestartInterval,
    IndexOverflow,
    InvalidTable,
    JpegHideError,
    LengthMismatch,
    Malformed,
    MarkerInScan,
    MultiComponent,
    NoComment,
    NotBaseline,
    Overrun,
    RxyCorrupt,
    SecretTooLarge,
    SegmentTooLong,
    SizeOverflow,
    TooManyBlocks,
    Truncated,
    TruncatedPayload,
    UnsupportedPadding,
    ValueOutOfRange,
    VerificationFailed,
    ZeroGroupAfterContinuation,
    ZeroValue,
)
from .pipeline import CapacityReport, embed, extract, measure, recover

__version__ = "0.1.0"

__all__ = [
    "CapacityReport",
    "embed",
    "extract",
    "measure",
    "recover",
    "JpegHideError",
    "Malformed",
    "Truncated",
    "NotBaseline",
    "HasRestartInterval",
    "MultiComponent",
    "SegmentTooLong",
    "MarkerInScan",
    "CommentCollision",
    "NoComment",
    "UnsupportedPadding",
    "InvalidTable",
    "BadCode",
    "Overrun",
    "ZeroValue",
    "SizeOverflow",
    "ValueOutOfRange",
    "DanglingContinuation",
    "ZeroGroupAfterContinuation",
    "RxyCorrupt",
    "TooManyBlocks",
    "LengthMismatch",
    "CapacityExceeded",
    "CorruptPadding",
    "IndexOverflow",
    "TruncatedPayload",
    "BadTerminatePoint",
    "SecretTooLarge",
    "VerificationFailed",
    "__version__",
]
