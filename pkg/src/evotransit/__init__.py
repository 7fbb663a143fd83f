"""Evolutionary image transition: elitist pixel evolution from one image to another.

An image pair defines a bi-state pixel grid; seeded mutation operators
(standard, asymmetric, strip, combined strip, box, and their composites)
propose changes and an elitist loop accepts whatever does not lose fitness.
A bitstring lab measures the runtime and drift behaviour of the same rule.
"""

from .core import (
    FIXED,
    S_STATE,
    T_STATE,
    PixelCoord,
    Raster,
    TransitionState,
    apply_delta,
    build_state,
    fitness,
    fraction_complete,
    render,
    revert_delta,
)
from .engine import (
    COMPLETE,
    DEFAULT_MILESTONES,
    EMPTY_MUTABLE_SET,
    MAX_GENERATIONS,
    MilestoneEvent,
    RunConfig,
    RunReport,
    rng_stream,
    run,
    step,
)
from .errors import (
    CapExceededError,
    DecodeError,
    DimensionMismatchError,
    EmptyFrameListError,
    EmptyMutableSetError,
    EvoTransitError,
    ImagingIoError,
    UnreadableFileError,
    UnsupportedFormatError,
    UsageError,
)
from .imaging import (
    DirectoryFrameSink,
    FrameRecord,
    assemble_animation,
    frame_name,
    load_raster,
    write_frame,
)
from .mutation import (
    ASYMMETRIC,
    BOX,
    COMBINED_STRIP,
    COMPOSITE,
    STANDARD,
    STRIP,
    MutationDelta,
    OperatorSpec,
    asymmetric_mutation,
    box_mutation,
    combined_strip_mutation,
    composite_next,
    propose,
    standard_mutation,
    strip_mutation,
)
from .onemax import (
    BitInstance,
    DriftResult,
    ScalingResult,
    TrialRecord,
    drift_experiment,
    one_step_gains,
    run_to_optimum,
    scaling_experiment,
)

__version__ = "0.1.0"
