"""Rule tables and the cellular-automaton update kernel.

A rule table holds 512 next-state entries, one per possible 3x3 Moore
neighborhood.  The neighborhood around a cell is read row-major, top-left
first, and packed into a 9-bit code with the top-left cell as the most
significant bit and the bottom-right as the least significant.  Neighbors
outside the grid read as 0 (zero padding).  The center cell contributes
bit 4, so the table with ``entries[c] = (c >> 4) & 1`` is the identity rule.

Updates are synchronous: every output cell is computed from the unmodified
input grid, so results do not depend on scan order and rows may be evaluated
in parallel.
"""

from __future__ import annotations

import numpy as np

from .grid import BinaryGrid

TABLE_SIZE = 512
CENTER_BIT = 4


class RuleTable:
    """Immutable 512-entry lookup table of 0/1 next states."""

    __slots__ = ("_entries",)

    def __init__(self, entries) -> None:
        arr = np.asarray(entries, dtype=np.uint8).ravel()
        if arr.size != TABLE_SIZE:
            raise ValueError(f"rule table needs exactly {TABLE_SIZE} entries, got {arr.size}")
        if arr.max() > 1:
            raise ValueError("rule table entries must be 0 or 1")
        arr = arr.copy()
        arr.setflags(write=False)
        self._entries = arr

    @property
    def entries(self) -> np.ndarray:
        """Read-only (512,) uint8 array indexed by neighborhood code."""
        return self._entries

    def __getitem__(self, code: int) -> int:
        return int(self._entries[code])

    def __eq__(self, other) -> bool:
        if not isinstance(other, RuleTable):
            return NotImplemented
        return bool(np.array_equal(self._entries, other._entries))

    def __hash__(self):
        return hash(self._entries.tobytes())

    def __repr__(self) -> str:
        return f"RuleTable(ones={int(self._entries.sum())})"

    @classmethod
    def all_zero(cls) -> "RuleTable":
        return cls(np.zeros(TABLE_SIZE, dtype=np.uint8))

    @classmethod
    def identity(cls) -> "RuleTable":
        """Table whose output is always the current center cell."""
        codes = np.arange(TABLE_SIZE, dtype=np.uint16)
        return cls(((codes >> CENTER_BIT) & 1).astype(np.uint8))


def random_rule(rng: np.random.Generator) -> RuleTable:
    """Rule table with 512 entries drawn uniformly from {0, 1}."""
    return RuleTable(rng.integers(0, 2, size=TABLE_SIZE, dtype=np.uint8))


def encode_window(grid: BinaryGrid, row: int, col: int) -> int:
    """9-bit code of the 3x3 neighborhood centered at (row, col).

    Cells are read row-major starting at the top-left neighbor; out-of-bounds
    neighbors contribute 0.
    """
    if not (0 <= row < grid.height and 0 <= col < grid.width):
        raise IndexError(f"cell ({row}, {col}) outside {grid.width}x{grid.height} grid")
    cells = grid.cells
    code = 0
    for r in (row - 1, row, row + 1):
        for c in (col - 1, col, col + 1):
            bit = 0
            if 0 <= r < grid.height and 0 <= c < grid.width:
                bit = int(cells[r, c])
            code = (code << 1) | bit
    return code


def _apply_passes(cells: np.ndarray, entries: np.ndarray, passes: int) -> np.ndarray:
    h, w = cells.shape
    padded = np.zeros((h + 2, w + 2), dtype=np.uint16)
    codes = np.empty((h, w), dtype=np.uint16)
    for _ in range(passes):
        padded[1:-1, 1:-1] = cells
        codes[:] = 0
        for dr in range(3):
            for dc in range(3):
                np.left_shift(codes, 1, out=codes)
                np.bitwise_or(codes, padded[dr : dr + h, dc : dc + w], out=codes)
        cells = entries[codes]
    return cells


def step(grid: BinaryGrid, rule: RuleTable) -> BinaryGrid:
    """One synchronous pass of the rule table over the whole grid."""
    return BinaryGrid.from_array(_apply_passes(grid.cells, rule.entries, 1))


def run(grid: BinaryGrid, rule: RuleTable, passes: int) -> BinaryGrid:
    """`passes` successive synchronous applications of the rule table."""
    if passes < 1:
        raise ValueError(f"passes must be >= 1, got {passes}")
    return BinaryGrid.from_array(_apply_passes(grid.cells, rule.entries, passes))
