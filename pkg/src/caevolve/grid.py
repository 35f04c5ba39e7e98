"""Binary image grids and Netpbm (PBM/PGM) file I/O.

A :class:`BinaryGrid` is a rectangular lattice of cells, each 0 or 1, stored
row-major.  Cell value 1 means "edge present".  Note that PBM's bit 1
(conventionally black ink) maps to cell 1, so edge images that are white-on-
black on screen are stored with their edge pixels as PBM 1-bits.

Supported formats:

* P1 / P4 -- plain / raw PBM, read and written bit-exactly.
* P2 / P5 -- plain / raw PGM with maxval 255 only, read-only; pixels are
  binarized with a fixed threshold of 128 (value >= 128 -> cell 1).

Plain writers emit one row per line, single-space separated, with a trailing
newline, so output files are byte-stable and suitable for golden tests.
"""

from __future__ import annotations

import numpy as np

GRAY_THRESHOLD = 128


class ImageFormatError(ValueError):
    """Raised for malformed, truncated, or unsupported image files."""


class DimensionMismatchError(ValueError):
    """Raised when two grids that must share dimensions do not."""


class BinaryGrid:
    """Immutable width x height lattice of 0/1 cells."""

    __slots__ = ("_cells",)

    def __init__(self, width: int, height: int, cells) -> None:
        if width < 1 or height < 1:
            raise ValueError(f"grid dimensions must be >= 1, got {width}x{height}")
        arr = np.asarray(cells, dtype=np.uint8).ravel()
        if arr.size != width * height:
            raise ValueError(
                f"expected {width * height} cells for {width}x{height}, got {arr.size}"
            )
        if arr.size and arr.max() > 1:
            raise ValueError("cell states must be 0 or 1")
        arr = arr.reshape(height, width).copy()
        arr.setflags(write=False)
        self._cells = arr

    @classmethod
    def from_array(cls, array) -> "BinaryGrid":
        """Build a grid from a 2-D array-like of 0/1 values."""
        arr = np.asarray(array)
        if arr.ndim != 2:
            raise ValueError(f"expected a 2-D array, got ndim={arr.ndim}")
        h, w = arr.shape
        return cls(w, h, arr)

    @property
    def width(self) -> int:
        return self._cells.shape[1]

    @property
    def height(self) -> int:
        return self._cells.shape[0]

    @property
    def cells(self) -> np.ndarray:
        """Read-only (height, width) uint8 array of cell states."""
        return self._cells

    def __eq__(self, other) -> bool:
        if not isinstance(other, BinaryGrid):
            return NotImplemented
        return self._cells.shape == other._cells.shape and bool(
            np.array_equal(self._cells, other._cells)
        )

    def __hash__(self):
        return hash((self._cells.shape, self._cells.tobytes()))

    def __repr__(self) -> str:
        return f"BinaryGrid({self.width}x{self.height}, ones={int(self._cells.sum())})"


def binarize(values, threshold: int = GRAY_THRESHOLD) -> np.ndarray:
    """Map grayscale values to 0/1: value >= threshold -> 1.

    Arrays whose values are already all 0 or 1 pass through unchanged, so
    binarizing a binary grid is the identity.
    """
    arr = np.asarray(values)
    if arr.size == 0 or arr.max() <= 1:
        return arr.astype(np.uint8)
    return (arr >= threshold).astype(np.uint8)


def hamming(a: BinaryGrid, b: BinaryGrid) -> int:
    """Number of cells on which the two grids disagree."""
    if (a.width, a.height) != (b.width, b.height):
        raise DimensionMismatchError(
            f"grids differ in size: {a.width}x{a.height} vs {b.width}x{b.height}"
        )
    return int(np.count_nonzero(a.cells != b.cells))


# --- parsing ---------------------------------------------------------------

_MAGICS = (b"P1", b"P2", b"P4", b"P5")
_WHITESPACE = b" \t\n\r\x0b\x0c"


class _Scanner:
    """Cursor over raw file bytes; every error carries the byte offset."""

    def __init__(self, data: bytes) -> None:
        self.data = data
        self.pos = 0

    def fail(self, message: str, offset: int | None = None) -> ImageFormatError:
        at = self.pos if offset is None else offset
        return ImageFormatError(f"{message} at byte offset {at}")

    def skip_separators(self) -> None:
        """Advance past whitespace and '#' comments (comment runs to newline)."""
        data = self.data
        while self.pos < len(data):
            c = data[self.pos : self.pos + 1]
            if c in (b"#",):
                nl = data.find(b"\n", self.pos)
                self.pos = len(data) if nl < 0 else nl + 1
            elif c in _WHITESPACE:
                self.pos += 1
            else:
                return

    def next_token(self, what: str) -> tuple[bytes, int]:
        self.skip_separators()
        if self.pos >= len(self.data):
            raise self.fail(f"truncated file: expected {what}")
        start = self.pos
        while self.pos < len(self.data):
            c = self.data[self.pos : self.pos + 1]
            if c in _WHITESPACE or c == b"#":
                break
            self.pos += 1
        return self.data[start : self.pos], start

    def next_int(self, what: str) -> int:
        token, start = self.next_token(what)
        try:
            return int(token)
        except ValueError:
            raise self.fail(
                f"malformed header: expected {what}, found {token!r}", start
            ) from None

    def next_bit(self) -> int:
        """Single 0/1 digit for P1 rasters (digits may run together)."""
        self.skip_separators()
        if self.pos >= len(self.data):
            raise self.fail("truncated pixel data: expected more P1 bits")
        c = self.data[self.pos : self.pos + 1]
        if c not in (b"0", b"1"):
            raise self.fail(f"malformed P1 pixel, expected 0 or 1, found {c!r}")
        self.pos += 1
        return c == b"1"

    def take_raw(self, n: int, what: str) -> bytes:
        if self.pos + n > len(self.data):
            raise self.fail(
                f"truncated pixel data: expected {n} bytes of {what}, "
                f"got {len(self.data) - self.pos}"
            )
        chunk = self.data[self.pos : self.pos + n]
        self.pos += n
        return chunk


def load_image(path) -> BinaryGrid:
    """Load a P1/P2/P4/P5 Netpbm file as a binary grid.

    PBM bit 1 maps to cell 1.  PGM pixels are binarized at threshold 128.
    Malformed input raises :class:`ImageFormatError` with a byte offset.
    """
    with open(path, "rb") as fh:
        data = fh.read()
    scanner = _Scanner(data)
    magic, start = scanner.next_token("magic number")
    if magic not in _MAGICS:
        raise scanner.fail(f"unsupported magic number {magic!r}", start)

    width = scanner.next_int("width")
    height = scanner.next_int("height")
    if width < 1 or height < 1:
        raise scanner.fail(f"malformed header: bad dimensions {width}x{height}")

    if magic in (b"P2", b"P5"):
        maxval = scanner.next_int("maxval")
        if maxval != 255:
            raise scanner.fail(f"unsupported maxval {maxval} (only 255 is accepted)")

    if magic == b"P1":
        bits = [scanner.next_bit() for _ in range(width * height)]
        return BinaryGrid(width, height, bits)

    if magic == b"P2":
        values = np.empty(width * height, dtype=np.int64)
        for i in range(width * height):
            v = scanner.next_int("P2 pixel value")
            if not 0 <= v <= 255:
                raise scanner.fail(f"malformed P2 pixel value {v}")
            values[i] = v
        return BinaryGrid(width, height, binarize(values))

    # Raw formats: the header ends with exactly one whitespace byte.
    if scanner.pos >= len(data) or data[scanner.pos : scanner.pos + 1] not in _WHITESPACE:
        raise scanner.fail("malformed header: expected whitespace before raw pixel data")
    scanner.pos += 1

    if magic == b"P4":
        row_bytes = (width + 7) // 8
        raw = scanner.take_raw(row_bytes * height, "P4 raster")
        packed = np.frombuffer(raw, dtype=np.uint8).reshape(height, row_bytes)
        bits = np.unpackbits(packed, axis=1)[:, :width]
        return BinaryGrid(width, height, bits)

    raw = scanner.take_raw(width * height, "P5 raster")
    pixels = np.frombuffer(raw, dtype=np.uint8).reshape(height, width)
    return BinaryGrid(width, height, binarize(pixels))


# --- writing ---------------------------------------------------------------


def save_image(grid: BinaryGrid, path, format: str = "P1") -> None:
    """Write a grid as plain (P1) or raw (P4) PBM.

    Output is canonical: loading the file back yields an equal grid, and two
    saves of the same grid are byte-identical.
    """
    if format not in ("P1", "P4"):
        raise ValueError(f"unsupported output format {format!r} (use P1 or P4)")
    header = f"{format}\n{grid.width} {grid.height}\n".encode("ascii")
    if format == "P1":
        body = b"".join(
            b" ".join(b"1" if v else b"0" for v in row) + b"\n" for row in grid.cells
        )
    else:
        # packbits pads each row's trailing bits with zeros, as P4 requires
        body = np.packbits(grid.cells, axis=1).tobytes()
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(body)
