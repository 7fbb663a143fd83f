import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from evotransit import (
    FIXED,
    T_STATE,
    DimensionMismatchError,
    EmptyMutableSetError,
    MutationDelta,
    Raster,
    TransitionState,
    apply_delta,
    build_state,
    fitness,
    fraction_complete,
    render,
    revert_delta,
)

from conftest import all_differing_pair, random_pair


def delta_for(state, positions, to_state):
    """Hand-built delta moving the given mutable-cell indices to to_state."""
    rows = state.mutable_rows[positions]
    cols = state.mutable_cols[positions]
    return MutationDelta(rows, cols, np.full(len(positions), to_state, np.uint8), "test")


class TestRaster:
    def test_valid(self):
        r = Raster(np.zeros((2, 3, 3), np.uint8))
        assert r.height == 2 and r.width == 3 and r.dims == (2, 3)

    @pytest.mark.parametrize(
        "pixels",
        [
            np.zeros((2, 3), np.uint8),
            np.zeros((2, 3, 4), np.uint8),
            np.zeros((2, 3, 3), np.float64),
            np.zeros((0, 3, 3), np.uint8),
        ],
    )
    def test_invalid(self, pixels):
        with pytest.raises(ValueError):
            Raster(pixels)


class TestBuildState:
    def test_identical_pair_is_reported(self):
        r = Raster(np.full((3, 3, 3), 9, np.uint8))
        with pytest.raises(EmptyMutableSetError):
            build_state(r, r)

    def test_all_differing_200x200(self):
        start, target = all_differing_pair(200, 200)
        state = build_state(start, target)
        assert state.mutable_total == 40000
        assert state.count_s == 40000
        assert state.count_t == 0

    def test_three_of_four_differ(self):
        start = Raster(np.zeros((2, 2, 3), np.uint8))
        pixels = np.zeros((2, 2, 3), np.uint8)
        pixels[0, 1] = pixels[1, 0] = pixels[1, 1] = 7
        state = build_state(start, Raster(pixels))
        assert state.mutable_total == 3
        assert int(np.count_nonzero(state.cell_state == FIXED)) == 1
        assert state.cell_state[0, 0] == FIXED

    def test_dimension_mismatch(self):
        a = Raster(np.zeros((2, 2, 3), np.uint8))
        b = Raster(np.zeros((2, 3, 3), np.uint8))
        with pytest.raises(DimensionMismatchError):
            build_state(a, b)

    def test_mutable_cells_listed_row_major(self):
        start, target = random_pair(5, 7, seed=1)
        state = build_state(start, target)
        flat = state.mutable_rows * 7 + state.mutable_cols
        assert (np.diff(flat) > 0).all()


class TestFitness:
    def test_fresh_state_is_zero(self):
        start, target = all_differing_pair(4, 4)
        assert fitness(build_state(start, target)) == 0

    def test_complete_state(self):
        start, target = all_differing_pair(4, 4)
        state = build_state(start, target)
        apply_delta(state, delta_for(state, np.arange(16), T_STATE))
        assert fitness(state) == state.mutable_total == 16

    def test_half_of_40000(self):
        start, target = all_differing_pair(200, 200)
        state = build_state(start, target)
        apply_delta(state, delta_for(state, np.arange(20000), T_STATE))
        assert fitness(state) == 20000


class TestFractionComplete:
    def test_eighth(self):
        start, target = all_differing_pair(200, 200)
        state = build_state(start, target)
        apply_delta(state, delta_for(state, np.arange(5000), T_STATE))
        assert fraction_complete(state) == 0.125

    def test_zero_and_one(self):
        start, target = all_differing_pair(3, 3)
        state = build_state(start, target)
        assert fraction_complete(state) == 0.0
        apply_delta(state, delta_for(state, np.arange(9), T_STATE))
        assert fraction_complete(state) == 1.0

    def test_empty_mutable_set(self):
        state = TransitionState(np.full((2, 2), FIXED, np.uint8))
        with pytest.raises(EmptyMutableSetError):
            fraction_complete(state)


class TestRender:
    def test_fresh_equals_start(self):
        start, target = random_pair(6, 5, seed=2)
        state = build_state(start, target)
        assert np.array_equal(render(state, start, target).pixels, start.pixels)

    def test_complete_equals_target(self):
        start, target = random_pair(6, 5, seed=3)
        state = build_state(start, target)
        apply_delta(state, delta_for(state, np.arange(state.mutable_total), T_STATE))
        assert np.array_equal(render(state, start, target).pixels, target.pixels)

    def test_single_flip_changes_one_pixel(self):
        start, target = all_differing_pair(4, 4)
        state = build_state(start, target)
        apply_delta(state, delta_for(state, np.array([5]), T_STATE))
        out = render(state, start, target).pixels
        changed = np.any(out != start.pixels, axis=2)
        assert int(np.count_nonzero(changed)) == 1
        row, col = state.mutable_rows[5], state.mutable_cols[5]
        assert np.array_equal(out[row, col], target.pixels[row, col])

    def test_dimension_mismatch(self):
        start, target = all_differing_pair(4, 4)
        state = build_state(start, target)
        other = Raster(np.zeros((4, 5, 3), np.uint8))
        with pytest.raises(DimensionMismatchError):
            render(state, start, other)


@st.composite
def state_and_flips(draw):
    height = draw(st.integers(1, 12))
    width = draw(st.integers(1, 12))
    seed = draw(st.integers(0, 2**16))
    fixed = draw(st.floats(0.0, 0.8))
    start, target = random_pair(height, width, seed, fixed_fraction=fixed)
    state = build_state(start, target)
    n_flips = draw(st.integers(0, state.mutable_total))
    positions = draw(
        st.lists(
            st.integers(0, state.mutable_total - 1),
            min_size=n_flips, max_size=n_flips, unique=True,
        )
    )
    return start, target, state, np.asarray(positions, dtype=np.intp)


@settings(max_examples=60, deadline=None)
@given(state_and_flips())
def test_counts_stay_coherent_and_deltas_invert(case):
    start, target, state, positions = case
    delta = delta_for(state, positions, T_STATE)
    before = state.cell_state.copy()

    apply_delta(state, delta)
    assert state.recount() == (state.count_s, state.count_t)
    assert fitness(state) + state.count_s == state.mutable_total

    rendered = render(state, start, target).pixels
    mutable_mask = state.cell_state != FIXED
    agree = np.all(rendered == target.pixels, axis=2)
    assert int(np.count_nonzero(agree & mutable_mask)) == fitness(state)

    revert_delta(state, delta)
    assert np.array_equal(state.cell_state, before)
    assert state.recount() == (state.count_s, state.count_t)
