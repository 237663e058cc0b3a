"""Exception hierarchy for the jpeghide package.

Every failure mode callers are expected to handle has its own class so the
CLI can map each one to a distinct exit code.
"""


class JpegHideError(Exception):
    """Base class for all errors raised by this package."""


# --- container / file structure ---

class Malformed(JpegHideError):
    """Structural violation in the JPEG byte stream."""


class Truncated(Malformed):
    """Input ended before a complete structure could be read."""


class NotBaseline(JpegHideError):
    """The file is not baseline sequential Huffman JPEG (e.g. progressive)."""


class HasRestartInterval(JpegHideError):
    """The file uses restart intervals (DRI nonzero or RSTn in the scan)."""


class MultiComponent(JpegHideError):
    """The frame or scan declares more than one color component."""


class SegmentTooLong(JpegHideError):
    """A marker segment payload exceeds the 65533-byte wire limit."""


class MarkerInScan(JpegHideError):
    """Entropy-coded data contains an unstuffed marker byte pair."""


class CommentCollision(JpegHideError):
    """A COM segment already sits immediately after SOI."""


class NoComment(JpegHideError):
    """No COM segment is present in the file."""


class UnsupportedPadding(JpegHideError):
    """The scan's final-byte padding is not the 1-bit fill this tool relies
    on for byte-exact recovery."""


# --- entropy coding ---

class InvalidTable(JpegHideError):
    """A Huffman table specification is internally inconsistent."""


class BadCode(JpegHideError):
    """A bit pattern does not decode to any symbol of the active table, or a
    symbol required for encoding is absent from it."""


class Overrun(JpegHideError):
    """The bit cursor ran past the end of the scan mid-structure."""


class ZeroValue(JpegHideError):
    """Zero passed where a nonzero coefficient value is required."""


class SizeOverflow(JpegHideError):
    """A coefficient needs a magnitude size category larger than 15."""


# --- short code for small values ---

class ValueOutOfRange(JpegHideError):
    """Run or value outside what the short code can represent."""


class DanglingContinuation(JpegHideError):
    """The stream ended in the middle of a short-code symbol."""


class ZeroGroupAfterContinuation(JpegHideError):
    """A 000 group followed one or more continuation groups; the encoder
    never produces this, so it signals stream corruption."""


class RxyCorrupt(JpegHideError):
    """Short-code data decoded to an impossible run or block position."""


# --- transcoding ---

class TooManyBlocks(JpegHideError):
    """More than 65535 blocks; block indexes would overflow 16 bits."""


class LengthMismatch(JpegHideError):
    """Recovered data does not have the expected length; the marked file or
    its parameters are inconsistent."""


# --- hiding payload ---

class CapacityExceeded(JpegHideError):
    """The secret does not fit the target payload size."""


class IndexOverflow(JpegHideError):
    """A block index or count does not fit its 16-bit field."""


class TruncatedPayload(JpegHideError):
    """Payload declares more data than it contains."""


class BadTerminatePoint(JpegHideError):
    """Terminate point outside 1..64."""


class CorruptPadding(JpegHideError):
    """Payload padding bytes are not the zeros the builder wrote."""


# --- pipeline / CLI ---

class SecretTooLarge(JpegHideError):
    """The secret exceeds the measured embedding capacity."""


class VerificationFailed(JpegHideError):
    """A post-operation self-check (re-extract, reference compare) failed."""
