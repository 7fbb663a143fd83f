"""Bitstring harness: runtime scaling and one-step drift of the (1+1) rule.

The image process restricted to its mutable cells is a OneMax instance
(zeros = start-state cells, ones = target-state cells), so runtime and drift
behaviour can be measured on plain bitstrings at any length.

Two sampling modes:

* ``per-cell``: one uniform draw per bit, row-major, exactly the draw
  discipline of the image engine.  Runs replay the engine draw-for-draw and
  are used for cross-checking the two implementations.
* ``counts``: per generation, draw the number of 0->1 and 1->0 flips from
  the two binomial distributions the per-cell rule induces.  The ones-count
  chain is distributed identically, positions never matter for fitness, and
  generations cost two draws instead of n.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CapExceededError
from .mutation import ASYMMETRIC, STANDARD, OperatorSpec

PER_CELL = "per-cell"
COUNTS = "counts"

SAFETY_CAP = 1_000_000_000


@dataclass
class BitInstance:
    """A OneMax state: bit vector plus its cached ones-count."""

    n: int
    bits: np.ndarray
    ones: int

    @classmethod
    def zeros(cls, n: int) -> "BitInstance":
        if n < 1:
            raise ValueError("n must be >= 1")
        return cls(n=n, bits=np.zeros(n, dtype=np.uint8), ones=0)

    def recount(self) -> int:
        return int(np.count_nonzero(self.bits))


def _check_operator(spec: OperatorSpec) -> None:
    if spec.kind not in (STANDARD, ASYMMETRIC):
        raise ValueError(f"bitstring runs support standard/asymmetric only, got {spec.kind!r}")


def _class_probs(spec: OperatorSpec, zeros: int, ones: int, n: int) -> tuple[float, float]:
    """Flip probability for a zero bit and for a one bit at the given counts."""
    if spec.kind == STANDARD:
        p = 1.0 / n
        return p, p
    p0 = min(1.0, spec.c_s / (2.0 * zeros)) if zeros else 0.0
    p1 = min(1.0, spec.c_t / (2.0 * ones)) if ones else 0.0
    return p0, p1


def run_to_optimum(
    n: int,
    spec: OperatorSpec,
    seed: int,
    sampling: str = PER_CELL,
    cap: int = SAFETY_CAP,
    on_step=None,
) -> int:
    """Generations until the all-zeros string reaches all-ones.

    ``on_step`` (when given) receives (generation, accepted, ones) after
    every generation.  Raises CapExceededError past ``cap`` generations.
    """
    _check_operator(spec)
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.Generator(np.random.PCG64(seed))
    generation = 0

    if sampling == PER_CELL:
        instance = BitInstance.zeros(n)
        bits = instance.bits
        while instance.ones < n:
            if generation >= cap:
                raise CapExceededError(
                    f"n={n} {spec.kind}: still {n - instance.ones} zeros after {cap} generations"
                )
            zeros = n - instance.ones
            p0, p1 = _class_probs(spec, zeros, instance.ones, n)
            draws = rng.random(n)
            flip = draws < np.where(bits == 0, p0, p1)
            gained = int(np.count_nonzero(flip & (bits == 0)))
            lost = int(np.count_nonzero(flip)) - gained
            generation += 1
            accepted = gained >= lost
            if accepted:
                bits[flip] ^= 1
                instance.ones += gained - lost
            if on_step is not None:
                on_step(generation, accepted, instance.ones)
        return generation

    if sampling == COUNTS:
        ones = 0
        while ones < n:
            if generation >= cap:
                raise CapExceededError(
                    f"n={n} {spec.kind}: still {n - ones} zeros after {cap} generations"
                )
            zeros = n - ones
            p0, p1 = _class_probs(spec, zeros, ones, n)
            gained = int(rng.binomial(zeros, p0))
            lost = int(rng.binomial(ones, p1))
            generation += 1
            accepted = gained >= lost
            if accepted:
                ones += gained - lost
            if on_step is not None:
                on_step(generation, accepted, ones)
        return generation

    raise ValueError(f"unknown sampling mode {sampling!r}")


def one_step_gains(
    n: int, k: int, spec: OperatorSpec, samples: int, rng: np.random.Generator
) -> np.ndarray:
    """Fitness gains of single elitist steps from a state with exactly k zeros.

    Rejected proposals contribute a gain of 0.  Uses counts sampling, which
    is exact for this quantity.
    """
    _check_operator(spec)
    if not 1 <= k <= n:
        raise ValueError("k must satisfy 1 <= k <= n")
    p0, p1 = _class_probs(spec, k, n - k, n)
    gained = rng.binomial(k, p0, size=samples)
    lost = rng.binomial(n - k, p1, size=samples)
    return np.where(gained >= lost, gained - lost, 0)


@dataclass
class DriftResult:
    n: int
    k_values: list[int]
    mean_gains: list[float]
    improve_fractions: list[float]
    samples: int


def drift_experiment(
    n: int,
    k_list: list[int],
    spec: OperatorSpec,
    samples: int,
    seed: int = 0,
) -> DriftResult:
    """Mean one-step fitness gain (and improving-step fraction) per k."""
    rng = np.random.Generator(np.random.PCG64(seed))
    means = []
    improves = []
    for k in k_list:
        gains = one_step_gains(n, k, spec, samples, rng)
        means.append(float(gains.mean()))
        improves.append(float(np.count_nonzero(gains > 0) / samples))
    return DriftResult(
        n=n, k_values=list(k_list), mean_gains=means,
        improve_fractions=improves, samples=samples,
    )


@dataclass(frozen=True)
class TrialRecord:
    operator: str
    n: int
    repeat: int
    seed: int
    generations: int


@dataclass
class ScalingResult:
    """Per-length runtime statistics plus linear and n*ln(n) model fits."""

    operator: str
    n_values: list[int]
    trials: list[TrialRecord]
    means: list[float]
    stds: list[float]
    linear_coeff: float
    linear_residual: float
    nlogn_coeff: float
    nlogn_residual: float

    @property
    def doubling_ratios(self) -> list[float]:
        """mean(T) ratios between consecutive n values; empty if under 2 points."""
        return [b / a for a, b in zip(self.means, self.means[1:])]

    @property
    def better_model(self) -> str | None:
        """'linear' or 'nlogn' by residual; None with fewer than 2 points."""
        if len(self.n_values) < 2:
            return None
        return "linear" if self.linear_residual <= self.nlogn_residual else "nlogn"


def trimmed_mean(values, lower_fraction: float = 0.1, upper_fraction: float = 0.1) -> float:
    """Mean after dropping the lowest and highest fractions of the sample.

    Stabilizes heavy-tailed runtime samples; with few values nothing is
    dropped and this is the plain mean.
    """
    ordered = sorted(values)
    drop_low = int(len(ordered) * lower_fraction)
    drop_high = int(len(ordered) * upper_fraction)
    kept = ordered[drop_low : len(ordered) - drop_high]
    return float(sum(kept) / len(kept))


def _fit_through_origin(basis: np.ndarray, values: np.ndarray) -> tuple[float, float]:
    denom = float(basis @ basis)
    coeff = float(basis @ values) / denom if denom > 0 else 0.0
    residual = float(np.sum((values - coeff * basis) ** 2))
    return coeff, residual


def scaling_experiment(
    spec: OperatorSpec,
    n_list: list[int],
    repeats: int,
    seed: int = 0,
    sampling: str = COUNTS,
) -> ScalingResult:
    """Generations-to-optimum over n_list, `repeats` independent trials per n.

    Trial seeds are enumerated from ``seed`` in (n, repeat) row-major order,
    so every CSV row can be reproduced in isolation.  Fewer than ~30 repeats
    gives unstable trimmed means; use more for real measurements.
    """
    _check_operator(spec)
    if any(b <= a for a, b in zip(n_list, n_list[1:])):
        raise ValueError("n_list must be strictly increasing")
    if repeats < 1:
        raise ValueError("repeats must be >= 1")
    trials = []
    means = []
    stds = []
    for i, n in enumerate(n_list):
        per_n = []
        for r in range(repeats):
            trial_seed = seed + i * repeats + r
            generations = run_to_optimum(n, spec, trial_seed, sampling=sampling)
            trials.append(TrialRecord(spec.kind, n, r, trial_seed, generations))
            per_n.append(generations)
        means.append(trimmed_mean(per_n))
        stds.append(float(np.std(per_n, ddof=1)) if repeats > 1 else 0.0)

    ns = np.asarray(n_list, dtype=float)
    mean_arr = np.asarray(means)
    linear_coeff, linear_residual = _fit_through_origin(ns, mean_arr)
    nlogn_coeff, nlogn_residual = _fit_through_origin(ns * np.log(ns), mean_arr)
    return ScalingResult(
        operator=spec.kind,
        n_values=list(n_list),
        trials=trials,
        means=means,
        stds=stds,
        linear_coeff=linear_coeff,
        linear_residual=linear_residual,
        nlogn_coeff=nlogn_coeff,
        nlogn_residual=nlogn_residual,
    )
