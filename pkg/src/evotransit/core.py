"""Bi-state pixel grid: image pair, evolving per-pixel state, fitness, rendering.

Every pixel of the evolving image shows either its start value or its target
value.  Pixels where start and target already agree are marked FIXED and take
no part in counting or mutation; the remaining cells form a bitstring whose
ones-count is the fitness.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DimensionMismatchError, EmptyMutableSetError

# Cell states.  S/T cells toggle during the run; FIXED cells never change.
S_STATE = 0
T_STATE = 1
FIXED = 2


class PixelCoord(NamedTuple):
    row: int
    col: int


@dataclass(frozen=True)
class Raster:
    """RGB8 image stored as a (height, width, 3) uint8 array, row-major."""

    pixels: np.ndarray

    def __post_init__(self):
        p = self.pixels
        if not isinstance(p, np.ndarray) or p.ndim != 3 or p.shape[2] != 3:
            raise ValueError("raster pixels must be a (height, width, 3) array")
        if p.dtype != np.uint8:
            raise ValueError("raster pixels must be uint8")
        if p.shape[0] < 1 or p.shape[1] < 1:
            raise ValueError("raster must be at least 1x1")

    @property
    def height(self) -> int:
        return int(self.pixels.shape[0])

    @property
    def width(self) -> int:
        return int(self.pixels.shape[1])

    @property
    def dims(self) -> tuple[int, int]:
        return (self.height, self.width)

    def same_dims(self, other: "Raster") -> bool:
        return self.dims == other.dims


class TransitionState:
    """Grid of cell states with cached counts of start- and target-state cells.

    ``mutable_rows``/``mutable_cols`` list the non-FIXED cells in row-major
    order; operators draw one random number per entry in exactly that order,
    which pins the RNG stream layout for reproducibility.
    """

    __slots__ = (
        "height",
        "width",
        "cell_state",
        "count_s",
        "count_t",
        "mutable_total",
        "mutable_rows",
        "mutable_cols",
    )

    def __init__(self, cell_state: np.ndarray):
        if cell_state.ndim != 2 or cell_state.dtype != np.uint8:
            raise ValueError("cell_state must be a 2-D uint8 grid")
        self.cell_state = cell_state
        self.height, self.width = (int(d) for d in cell_state.shape)
        self.mutable_rows, self.mutable_cols = np.nonzero(cell_state != FIXED)
        self.mutable_total = int(self.mutable_rows.size)
        self.count_s = int(np.count_nonzero(cell_state == S_STATE))
        self.count_t = int(np.count_nonzero(cell_state == T_STATE))

    @property
    def dims(self) -> tuple[int, int]:
        return (self.height, self.width)

    def mutable_states(self) -> np.ndarray:
        """Current state of each mutable cell, in row-major order."""
        return self.cell_state[self.mutable_rows, self.mutable_cols]

    def recount(self) -> tuple[int, int]:
        """Recount (count_s, count_t) from the grid, ignoring the caches."""
        return (
            int(np.count_nonzero(self.cell_state == S_STATE)),
            int(np.count_nonzero(self.cell_state == T_STATE)),
        )


def build_state(start: Raster, target: Raster) -> TransitionState:
    """Initial state for a start/target pair: differing pixels in s, equal pixels FIXED.

    Raises DimensionMismatchError if the shapes differ and EmptyMutableSetError
    if every pixel is equal (the transition is trivially complete).
    """
    if not start.same_dims(target):
        raise DimensionMismatchError(
            f"start is {start.dims[0]}x{start.dims[1]}, "
            f"target is {target.dims[0]}x{target.dims[1]}"
        )
    differs = np.any(start.pixels != target.pixels, axis=2)
    if not differs.any():
        raise EmptyMutableSetError("start and target are identical")
    cell_state = np.where(differs, np.uint8(S_STATE), np.uint8(FIXED))
    return TransitionState(cell_state)


def fitness(state: TransitionState) -> int:
    """Number of mutable cells currently showing their target value."""
    return state.count_t


def fraction_complete(state: TransitionState) -> float:
    if state.mutable_total == 0:
        raise EmptyMutableSetError("no mutable cells")
    return state.count_t / state.mutable_total


def render(state: TransitionState, start: Raster, target: Raster) -> Raster:
    """Compose the current image: start values at s cells, target elsewhere.

    FIXED cells render as target; the two values are identical there.
    """
    if not start.same_dims(target) or start.dims != state.dims:
        raise DimensionMismatchError("state and rasters must share dimensions")
    show_start = (state.cell_state == S_STATE)[:, :, np.newaxis]
    return Raster(np.where(show_start, start.pixels, target.pixels))


def apply_delta(state: TransitionState, delta) -> None:
    """Apply a mutation delta in place, updating the cached counts."""
    if len(delta) == 0:
        return
    state.cell_state[delta.rows, delta.cols] = delta.new_states
    net = delta.net_gain
    state.count_t += net
    state.count_s -= net


def revert_delta(state: TransitionState, delta) -> None:
    """Undo a previously applied delta bit-exactly."""
    if len(delta) == 0:
        return
    old = np.where(delta.new_states == S_STATE, np.uint8(T_STATE), np.uint8(S_STATE))
    state.cell_state[delta.rows, delta.cols] = old
    net = delta.net_gain
    state.count_t -= net
    state.count_s += net
