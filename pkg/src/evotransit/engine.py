"""Elitist (1+1) evolution loop: propose, evaluate incrementally, accept or discard.

A run is strictly sequential and fully determined by (start, target, config):
the seed fixes the PCG64 stream, operators consume draws in a documented
order, and frames/reports replay byte-identically.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .core import (
    FIXED,
    Raster,
    TransitionState,
    apply_delta,
    build_state,
    fraction_complete,
    render,
)
from .errors import EmptyMutableSetError
from .mutation import MutationDelta, OperatorSpec, propose

COMPLETE = "COMPLETE"
MAX_GENERATIONS = "MAX_GENERATIONS"
EMPTY_MUTABLE_SET = "EMPTY_MUTABLE_SET"

TAG_INITIAL = "initial"
TAG_MILESTONE = "milestone"
TAG_STRIDE = "stride"
TAG_FINAL = "final"

DEFAULT_MILESTONES = (0.125, 0.375, 0.625, 0.875)

# Trajectory entries are capped near this count regardless of run length.
_TRAJECTORY_POINTS = 10_000


def rng_stream(seed: int) -> np.random.Generator:
    """Deterministic, platform-independent random stream for one run.

    PCG64 guarantees the same draw sequence for the same seed on every
    platform.  Vectorized double draws consume the stream exactly like the
    equivalent sequence of scalar draws, so "one draw per cell, row-major"
    holds literally for the per-cell operators.
    """
    if not 0 <= seed < 2**64:
        raise ValueError("seed must fit in an unsigned 64-bit integer")
    return np.random.Generator(np.random.PCG64(seed))


@dataclass(frozen=True)
class RunConfig:
    operator: OperatorSpec
    seed: int = 0
    milestones: tuple[float, ...] = DEFAULT_MILESTONES
    max_generations: int = 10_000_000
    frame_every: int | None = None
    emit_initial_final: bool = True

    def __post_init__(self):
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in an unsigned 64-bit integer")
        if self.max_generations < 1:
            raise ValueError("max_generations must be >= 1")
        if self.frame_every is not None and self.frame_every < 1:
            raise ValueError("frame_every must be >= 1")
        for m in self.milestones:
            if not 0.0 < m < 1.0:
                raise ValueError("milestones must lie strictly between 0 and 1")
        if any(b <= a for a, b in zip(self.milestones, self.milestones[1:])):
            raise ValueError("milestones must be strictly increasing")


@dataclass(frozen=True)
class MilestoneEvent:
    fraction: float
    generation: int
    frame: str | None


@dataclass
class RunReport:
    generations_run: int
    accepted: int
    rejected: int
    final_fraction: float
    milestone_events: list[MilestoneEvent]
    fitness_trajectory: list[tuple[int, int]]
    termination: str

    def as_dict(self) -> dict:
        """Report fields in stable key order (trajectory stays in memory only)."""
        return {
            "generations": self.generations_run,
            "accepted": self.accepted,
            "rejected": self.rejected,
            "final_fraction": self.final_fraction,
            "milestones": [
                {"fraction": e.fraction, "generation": e.generation, "frame": e.frame}
                for e in self.milestone_events
            ],
            "termination": self.termination,
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2)


def step(
    state: TransitionState,
    operator: OperatorSpec,
    rng: np.random.Generator,
    generation_index: int = 0,
) -> tuple[bool, MutationDelta]:
    """One propose/evaluate/accept cycle.

    Offspring fitness is the parent fitness plus the delta's net gain, so
    acceptance needs no rescan; the delta is applied only when it does not
    lose fitness.
    """
    delta = propose(state, operator, rng, generation_index)
    accepted = delta.net_gain >= 0
    if accepted:
        apply_delta(state, delta)
    return accepted, delta


def _emit(sink, state, start, target, generation, fraction, tag) -> str | None:
    if sink is None:
        return None
    record = sink(render(state, start, target), generation=generation, fraction=fraction, tag=tag)
    return None if record is None else str(record.path)


def run(
    start: Raster,
    target: Raster,
    config: RunConfig,
    sink=None,
    observer=None,
) -> RunReport:
    """Execute the evolution until the target is reached or the cap expires.

    ``sink`` is called as sink(raster, generation=..., fraction=..., tag=...)
    for the initial image, each first milestone crossing, optional stride
    frames, and the final image.  ``observer``, when given, receives
    (generation, accepted, fitness) after every step; it exists for tests and
    instrumentation and must not touch the run's RNG.
    """
    try:
        state = build_state(start, target)
    except EmptyMutableSetError:
        # Trivially complete: the image already equals the target everywhere.
        if config.emit_initial_final:
            trivial = TransitionState(np.full(start.pixels.shape[:2], FIXED, dtype=np.uint8))
            _emit(sink, trivial, start, target, 0, 1.0, TAG_FINAL)
        return RunReport(
            generations_run=0,
            accepted=0,
            rejected=0,
            final_fraction=1.0,
            milestone_events=[],
            fitness_trajectory=[(0, 0)],
            termination=EMPTY_MUTABLE_SET,
        )

    rng = rng_stream(config.seed)
    milestones = config.milestones
    next_milestone = 0
    events: list[MilestoneEvent] = []
    trajectory: list[tuple[int, int]] = [(0, state.count_t)]
    traj_stride = max(1, math.ceil(config.max_generations / _TRAJECTORY_POINTS))

    if config.emit_initial_final:
        _emit(sink, state, start, target, 0, 0.0, TAG_INITIAL)

    generation = 0
    accepted_count = 0
    rejected_count = 0
    while state.count_t < state.mutable_total and generation < config.max_generations:
        accepted, _delta = step(state, config.operator, rng, generation)
        generation += 1
        if accepted:
            accepted_count += 1
            fraction = fraction_complete(state)
            while next_milestone < len(milestones) and fraction >= milestones[next_milestone]:
                path = _emit(
                    sink, state, start, target, generation,
                    milestones[next_milestone], TAG_MILESTONE,
                )
                events.append(MilestoneEvent(milestones[next_milestone], generation, path))
                next_milestone += 1
        else:
            rejected_count += 1
        if observer is not None:
            observer(generation, accepted, state.count_t)
        if config.frame_every is not None and generation % config.frame_every == 0:
            _emit(
                sink, state, start, target, generation,
                fraction_complete(state), TAG_STRIDE,
            )
        if generation % traj_stride == 0:
            trajectory.append((generation, state.count_t))

    final_fraction = fraction_complete(state)
    if trajectory[-1][0] != generation:
        trajectory.append((generation, state.count_t))
    if config.emit_initial_final:
        _emit(sink, state, start, target, generation, final_fraction, TAG_FINAL)

    return RunReport(
        generations_run=generation,
        accepted=accepted_count,
        rejected=rejected_count,
        final_fraction=final_fraction,
        milestone_events=events,
        fitness_trajectory=trajectory,
        termination=COMPLETE if state.count_t == state.mutable_total else MAX_GENERATIONS,
    )
