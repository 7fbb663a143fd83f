"""Mutation operators: per-cell stochastic flips and geometric target overlays.

Each operator is a pure function of (state, parameters, rng) and returns a
MutationDelta describing the cells whose state would change.  Nothing is
applied here; the engine applies or discards the delta.

RNG draw order is fixed per operator so that runs replay exactly:

* standard / asymmetric: one uniform double per mutable cell, row-major.
* strip, box: anchor row (one integer draw), then anchor column (one).
* combined strip: orientation double first (< 0.5 means horizontal), then
  anchor row, then anchor column.  The orientation is drawn first because in
  fit-anchor mode the anchor ranges depend on the chosen rectangle.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import FIXED, S_STATE, T_STATE, PixelCoord, TransitionState

STANDARD = "standard"
ASYMMETRIC = "asymmetric"
STRIP = "strip"
COMBINED_STRIP = "combined-strip"
BOX = "box"
COMPOSITE = "composite"

KINDS = (STANDARD, ASYMMETRIC, STRIP, COMBINED_STRIP, BOX, COMPOSITE)
GEOMETRIC_KINDS = (STRIP, COMBINED_STRIP, BOX)


@dataclass(frozen=True)
class MutationDelta:
    """Cells changed by one proposal, with the state each one takes.

    Every listed cell is mutable and actually changes state, so reapplying
    the inverse restores the previous grid bit-exactly.
    """

    rows: np.ndarray
    cols: np.ndarray
    new_states: np.ndarray
    kind: str

    def __len__(self) -> int:
        return int(self.rows.size)

    @property
    def net_gain(self) -> int:
        """Fitness change if applied: (s to t flips) minus (t to s flips)."""
        gained = int(np.count_nonzero(self.new_states == T_STATE))
        return 2 * gained - len(self)

    def flipped(self) -> list[tuple[PixelCoord, int]]:
        return [
            (PixelCoord(int(r), int(c)), int(s))
            for r, c, s in zip(self.rows, self.cols, self.new_states)
        ]


@dataclass(frozen=True)
class OperatorSpec:
    """Full description of one mutation operator and its parameters.

    Strip rectangles are given as (width, height).  ``partner`` and
    ``interleave`` only apply to the composite kind, which alternates
    asymmetric mutation with one geometric operator on a fixed a:b schedule.
    """

    kind: str
    c_s: float = 100.0
    c_t: float = 50.0
    strip_length: int = 180
    h_strip: tuple[int, int] = (200, 40)
    v_strip: tuple[int, int] = (1, 200)
    box_size: int = 3
    partner: str | None = None
    interleave: tuple[int, int] = (1, 1)
    toggle_geometric: bool = False
    fit_anchors: bool = False

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown operator kind {self.kind!r}")
        if self.c_s < 1 or self.c_t < 1:
            raise ValueError("c_s and c_t must each be >= 1")
        if self.strip_length < 1 or self.box_size < 1:
            raise ValueError("strip_length and box_size must each be >= 1")
        for w, h in (self.h_strip, self.v_strip):
            if w < 1 or h < 1:
                raise ValueError("strip rectangle sides must be >= 1")
        a, b = self.interleave
        if a < 1 or b < 1:
            raise ValueError("interleave ratio parts must be >= 1")
        if self.kind == COMPOSITE:
            if self.partner not in GEOMETRIC_KINDS:
                raise ValueError(
                    "composite partner must be one of strip, combined-strip, box"
                )
        elif self.partner is not None:
            raise ValueError("partner is only valid for the composite kind")


def _toggle_of(states: np.ndarray) -> np.ndarray:
    return np.where(states == S_STATE, np.uint8(T_STATE), np.uint8(S_STATE))


def standard_mutation(state: TransitionState, rng: np.random.Generator) -> MutationDelta:
    """Toggle each mutable cell independently with probability 1/mutable_total."""
    total = state.mutable_total
    draws = rng.random(total)
    mask = draws < (1.0 / total)
    rows = state.mutable_rows[mask]
    cols = state.mutable_cols[mask]
    new_states = _toggle_of(state.cell_state[rows, cols])
    return MutationDelta(rows, cols, new_states, STANDARD)


def asymmetric_mutation(
    state: TransitionState, c_s: float, c_t: float, rng: np.random.Generator
) -> MutationDelta:
    """Toggle s cells with probability c_s/(2*count_s) and t cells with c_t/(2*count_t).

    Probabilities are clamped to 1 when the remaining count of a class drops
    below c/2.  Every mutable cell consumes one draw regardless of its class.
    """
    p_s = min(1.0, c_s / (2.0 * state.count_s)) if state.count_s else 0.0
    p_t = min(1.0, c_t / (2.0 * state.count_t)) if state.count_t else 0.0
    current = state.mutable_states()
    thresholds = np.where(current == S_STATE, p_s, p_t)
    draws = rng.random(state.mutable_total)
    mask = draws < thresholds
    rows = state.mutable_rows[mask]
    cols = state.mutable_cols[mask]
    new_states = _toggle_of(current[mask])
    return MutationDelta(rows, cols, new_states, ASYMMETRIC)


def _draw_anchor(
    rng: np.random.Generator, m: int, n: int, region_h: int, region_w: int, fit: bool
) -> tuple[int, int]:
    # Default: any pixel position; the region is clipped at the image edge.
    # Fit mode restricts the anchor so the region lies inside when it can.
    if fit:
        row = int(rng.integers(max(m - region_h + 1, 1)))
        col = int(rng.integers(max(n - region_w + 1, 1)))
    else:
        row = int(rng.integers(m))
        col = int(rng.integers(n))
    return row, col


def _region_delta(
    state: TransitionState,
    row0: int,
    col0: int,
    region_h: int,
    region_w: int,
    kind: str,
    toggle: bool,
) -> MutationDelta:
    row1 = min(row0 + region_h, state.height)
    col1 = min(col0 + region_w, state.width)
    sub = state.cell_state[row0:row1, col0:col1]
    if toggle:
        local_r, local_c = np.nonzero(sub != FIXED)
        new_states = _toggle_of(sub[local_r, local_c])
    else:
        # Set-to-target: only cells still in s change; t cells are untouched.
        local_r, local_c = np.nonzero(sub == S_STATE)
        new_states = np.full(local_r.size, T_STATE, dtype=np.uint8)
    return MutationDelta(local_r + row0, local_c + col0, new_states, kind)


def strip_mutation(
    state: TransitionState,
    strip_length: int,
    rng: np.random.Generator,
    toggle: bool = False,
    fit_anchor: bool = False,
) -> MutationDelta:
    """One-pixel-wide vertical strip growing downward from a random anchor.

    The strip runs for strip_length cells or to the bottom edge, whichever
    comes first.
    """
    row, col = _draw_anchor(rng, state.height, state.width, strip_length, 1, fit_anchor)
    return _region_delta(state, row, col, strip_length, 1, STRIP, toggle)


def combined_strip_mutation(
    state: TransitionState,
    h_strip: tuple[int, int],
    v_strip: tuple[int, int],
    rng: np.random.Generator,
    toggle: bool = False,
    fit_anchor: bool = False,
) -> MutationDelta:
    """A fair coin picks a wide horizontal or a thin vertical rectangle.

    Rectangles are (width, height), anchored at their top-left corner and
    clipped to the image bounds.
    """
    horizontal = rng.random() < 0.5
    width, height = h_strip if horizontal else v_strip
    row, col = _draw_anchor(rng, state.height, state.width, height, width, fit_anchor)
    return _region_delta(state, row, col, height, width, COMBINED_STRIP, toggle)


def box_mutation(
    state: TransitionState,
    box_size: int,
    rng: np.random.Generator,
    toggle: bool = False,
    fit_anchor: bool = False,
) -> MutationDelta:
    """Square block anchored at a random position; successive boxes may overlap."""
    row, col = _draw_anchor(rng, state.height, state.width, box_size, box_size, fit_anchor)
    return _region_delta(state, row, col, box_size, box_size, BOX, toggle)


def composite_next(generation_index: int, partner: str, ratio: tuple[int, int] = (1, 1)) -> str:
    """Deterministic a:b interleave: a asymmetric steps, then b partner steps."""
    if partner not in GEOMETRIC_KINDS:
        raise ValueError(f"composite partner must be geometric, got {partner!r}")
    a, b = ratio
    if a < 1 or b < 1:
        raise ValueError("interleave ratio parts must be >= 1")
    return ASYMMETRIC if generation_index % (a + b) < a else partner


def propose(
    state: TransitionState,
    spec: OperatorSpec,
    rng: np.random.Generator,
    generation_index: int = 0,
) -> MutationDelta:
    """Generate one proposal with the operator the spec (and schedule) selects."""
    kind = spec.kind
    if kind == COMPOSITE:
        kind = composite_next(generation_index, spec.partner, spec.interleave)
    if kind == STANDARD:
        return standard_mutation(state, rng)
    if kind == ASYMMETRIC:
        return asymmetric_mutation(state, spec.c_s, spec.c_t, rng)
    if kind == STRIP:
        return strip_mutation(
            state, spec.strip_length, rng, spec.toggle_geometric, spec.fit_anchors
        )
    if kind == COMBINED_STRIP:
        return combined_strip_mutation(
            state, spec.h_strip, spec.v_strip, rng, spec.toggle_geometric, spec.fit_anchors
        )
    if kind == BOX:
        return box_mutation(
            state, spec.box_size, rng, spec.toggle_geometric, spec.fit_anchors
        )
    raise ValueError(f"unknown operator kind {kind!r}")
