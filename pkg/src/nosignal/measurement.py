"""Projective measurement with state reduction and seeded outcome sampling.

Projectors target either detector windows on a grid (resolved to exact
cell masks, so the Born rule over a partition is exactly additive) or
subsets of mode labels.  Measuring collapses the state onto the observed
projector's range and renormalizes; an outcome whose probability is below
``REDUCTION_EPS`` cannot be conditioned on and raises instead.

Sampling is inverse-CDF with one uniform draw per trial.  The uniforms
come from a counter-based generator keyed by ``(seed, stream)``: trial
``i`` always consumes draw ``i`` of that stream, so batches can be split
or parallelized without changing any outcome.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


import numpy as np

from .modes import ModeState, make_state
from .wavepacket import (
    DetectorWindow,
    Grid,
    WaveFunction,
    window_cells,
    window_probability,
)

#: Outcomes with probability below this cannot be reduced onto.
REDUCTION_EPS = 1e-12

#: A projector set whose probabilities sum below 1 - this is incomplete.
COMPLETENESS_TOL = 1e-6

#: Input states must be normalized to this working tolerance.
STATE_NORM_TOL = 1e-6


class ProjectorDomainError(ValueError):
    """Projector and state disagree (window vs mode target, or foreign grid)."""


class ZeroNormReductionError(ValueError):
    """Attempt to reduce onto an outcome of (numerically) zero probability.

    The branch where a counter does not fire must be reduced with the
    complementary projector instead.
    """


class IncompleteProjectorSetError(ValueError):
    """The projectors do not cover the state (probabilities sum below 1)."""


@dataclass(frozen=True)
class Projector:
    """Projection onto detector windows or onto a subset of modes.

    Window projectors may carry several pairwise-disjoint windows, which is
    how the complement of an interval ("everything left and right of the
    counter") is expressed.
    """

    label: str
    windows: tuple[DetectorWindow, ...] | None = None
    modes: frozenset[str] | None = None

    def __post_init__(self) -> None:
        if (self.windows is None) == (self.modes is None):
            raise ValueError("projector targets either windows or modes")
        if not self.label:
            raise ValueError("projector needs a nonempty outcome label")
        if self.windows is not None:
            spans = sorted(self.windows, key=lambda w: w.lo)
            for left, right in zip(spans, spans[1:]):
                if right.lo < left.hi:
                    raise ValueError("projector windows must be disjoint")
            object.__setattr__(self, "windows", tuple(spans))


def window_projector(label: str, *windows: DetectorWindow) -> Projector:
    return Projector(label, windows=tuple(windows))


def mode_projector(label: str, *modes: str) -> Projector:
    return Projector(label, modes=frozenset(modes))


def _check_normalized(state: ModeState | WaveFunction) -> None:
    if isinstance(state, ModeState):
        norm = float(np.linalg.norm(state.amplitudes))
    else:
        norm = math.sqrt(
            state.grid.spacing * float(np.sum(np.abs(state.samples) ** 2))
        )
    if abs(norm - 1.0) > STATE_NORM_TOL:
        raise ValueError(f"state is not normalized (norm {norm:.9f})")


def _cell_mask(grid: Grid, projector: Projector) -> np.ndarray:
    mask = np.zeros(grid.n_points, dtype=bool)
    for window in projector.windows:
        i_lo, i_hi = window_cells(grid, window)
        if mask[i_lo:i_hi].any():
            raise ValueError("projector windows overlap after cell snapping")
        mask[i_lo:i_hi] = True
    return mask


def probability(state: ModeState | WaveFunction, projector: Projector) -> float:
    """Born probability ``<psi|P|psi>`` of the projector's outcome."""
    _check_normalized(state)
    if isinstance(state, WaveFunction):
        if projector.windows is None:
            raise ProjectorDomainError("mode projector applied to a wavefunction")
        return float(
            sum(window_probability(state, w) for w in projector.windows)
        )
    if projector.modes is None:
        raise ProjectorDomainError("window projector applied to a mode state")
    return float(
        sum(
            abs(a) ** 2
            for label, a in zip(state.labels, state.amplitudes)
            if label in projector.modes
        )
    )


def reduce(state: ModeState | WaveFunction, projector: Projector):
    """Collapse: ``P|psi> / ||P|psi>||``, an eigenstate of ``P`` afterwards."""
    p = probability(state, projector)
    if p < REDUCTION_EPS:
        raise ZeroNormReductionError(
            f"outcome {projector.label!r} has probability {p:.3e} < {REDUCTION_EPS}"
        )
    scale = 1.0 / math.sqrt(p)
    if isinstance(state, WaveFunction):
        mask = _cell_mask(state.grid, projector)
        return WaveFunction(state.grid, state.samples * mask * scale)
    kept = [
        (label, complex(a) * scale)
        for label, a in zip(state.labels, state.amplitudes)
        if label in projector.modes
    ]
    return make_state(kept)


@dataclass(frozen=True)
class ProjectorSet:
    """Ordered, pairwise-orthogonal projectors meant to cover the whole state."""

    projectors: tuple[Projector, ...]

    def __post_init__(self) -> None:
        projectors = tuple(self.projectors)
        if not projectors:
            raise ValueError("projector set cannot be empty")
        labels = [p.label for p in projectors]
        if len(set(labels)) != len(labels):
            raise ValueError("projector outcome labels must be distinct")
        kinds = {p.windows is None for p in projectors}
        if len(kinds) != 1:
            raise ValueError("cannot mix window and mode projectors in one set")
        object.__setattr__(self, "projectors", projectors)

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(p.label for p in self.projectors)

    def probabilities(self, state) -> np.ndarray:
        """Per-outcome Born probabilities; raises if the set is incomplete."""
        self._check_orthogonal(state)
        probs = np.array([probability(state, p) for p in self.projectors])
        if probs.sum() < 1.0 - COMPLETENESS_TOL:
            raise IncompleteProjectorSetError(
                f"outcome probabilities sum to {probs.sum():.9f} < 1; "
                "the projector set does not cover the state"
            )
        return probs

    def _check_orthogonal(self, state) -> None:
        first = self.projectors[0]
        if isinstance(state, WaveFunction) and first.windows is not None:
            covered = np.zeros(state.grid.n_points, dtype=int)
            for p in self.projectors:
                covered += _cell_mask(state.grid, p)
            if np.any(covered > 1):
                raise ValueError("projector windows overlap between outcomes")
        elif isinstance(state, ModeState) and first.modes is not None:
            seen: set[str] = set()
            for p in self.projectors:
                if seen & p.modes:
                    raise ValueError("projector mode subsets overlap")
                seen |= p.modes
        else:
            raise ProjectorDomainError(
                "projector set target does not match the state type"
            )


@dataclass(frozen=True)
class OutcomeRecord:
    """One row of a measurement's outcome table.

    ``reduced`` is the post-collapse state, or ``None`` when the outcome's
    probability sits below ``REDUCTION_EPS`` and cannot be conditioned on.
    """

    label: str
    probability: float
    reduced: ModeState | WaveFunction | None


def outcome_records(state, projector_set: ProjectorSet) -> list[OutcomeRecord]:
    """Full Born-rule table for a complete projector set."""
    probs = projector_set.probabilities(state)
    records = []
    for projector, p in zip(projector_set.projectors, probs):
        reduced = reduce(state, projector) if p >= REDUCTION_EPS else None
        records.append(OutcomeRecord(projector.label, float(p), reduced))
    return records


def three_counter_partition(window: DetectorWindow, grid: Grid) -> ProjectorSet:
    """Partition of the whole axis: left of the counter, the counter, right of it.

    Complete and orthogonal by construction, so exactly one of the three
    counters fires whenever the particle is on this axis at all.
    """
    i_lo, i_hi = window_cells(grid, window)
    if i_lo == 0 or i_hi == grid.n_points:
        raise ValueError("window must leave room for side counters")
    left = DetectorWindow(grid.edge_value(0), grid.edge_value(i_lo))
    middle = DetectorWindow(grid.edge_value(i_lo), grid.edge_value(i_hi))
    right = DetectorWindow(grid.edge_value(i_hi), grid.edge_value(grid.n_points))
    return ProjectorSet(
        (
            window_projector("left", left),
            window_projector("in", middle),
            window_projector("right", right),
        )
    )


def pair_partition(window: DetectorWindow, grid: Grid) -> ProjectorSet:
    """{counter, complement} partition: P_in and P_out."""
    i_lo, i_hi = window_cells(grid, window)
    middle = DetectorWindow(grid.edge_value(i_lo), grid.edge_value(i_hi))
    outside = []
    if i_lo > 0:
        outside.append(DetectorWindow(grid.edge_value(0), grid.edge_value(i_lo)))
    if i_hi < grid.n_points:
        outside.append(
            DetectorWindow(grid.edge_value(i_hi), grid.edge_value(grid.n_points))
        )
    return ProjectorSet(
        (window_projector("in", middle), window_projector("out", *outside))
    )


# ---------------------------------------------------------------------------
# Seeded sampling
# ---------------------------------------------------------------------------

_MAX_SEED = 2**63


def _philox(seed: int, stream: int) -> np.random.Generator:
    if not (0 <= seed < _MAX_SEED):
        raise ValueError("seed must be a non-negative 63-bit integer")
    if not (0 <= stream < 2**63):
        raise ValueError("stream index out of range")
    return np.random.Generator(np.random.Philox(key=(stream << 64) | seed))


def trial_uniforms(seed: int, n: int, stream: int = 0) -> np.ndarray:
    """Uniform draws for trials ``0..n-1`` of the given stream.

    Counter-based: draw ``i`` depends only on ``(seed, stream, i)``.
    """
    return _philox(seed, stream).random(n)


def trial_uniform(seed: int, trial: int, stream: int = 0) -> float:
    """The single uniform draw for one trial, without generating the batch.

    Random access into the stream: Philox advances by blocks of four
    64-bit words, so jump to the trial's block and read its word.
    """
    gen = _philox(seed, stream)
    gen.bit_generator.advance(trial // 4)
    return float(gen.random(trial % 4 + 1)[-1])


def measure(
    state, projector_set: ProjectorSet, seed: int, trial: int = 0
) -> tuple[str, ModeState | WaveFunction]:
    """Sample one outcome by the Born rule and return the reduced state.

    Deterministic: the outcome is a pure function of
    ``(state, projector_set, seed, trial)``.
    """
    probs = projector_set.probabilities(state)
    cdf = np.cumsum(probs)
    u = trial_uniform(seed, trial)
    index = min(int(np.searchsorted(cdf, u, side="right")), len(probs) - 1)
    chosen = projector_set.projectors[index]
    return chosen.label, reduce(state, chosen)


def sample_outcomes(
    state, projector_set: ProjectorSet, seed: int, n_trials: int, stream: int = 0
) -> dict[str, int]:
    """Outcome counts over ``n_trials`` Born-rule samples (vectorized).

    Trial ``i`` uses the same draw :func:`measure` would use for
    ``trial=i``, so batched and one-at-a-time sampling agree exactly.
    """
    probs = projector_set.probabilities(state)
    cdf = np.cumsum(probs)
    draws = trial_uniforms(seed, n_trials, stream)
    indices = np.minimum(
        np.searchsorted(cdf, draws, side="right"), len(probs) - 1
    )
    counts = np.bincount(indices, minlength=len(probs))
    return {label: int(c) for label, c in zip(projector_set.labels, counts)}


def sampling_record(
    phi: float, counts: dict[str, int], trials: int, seed: int
) -> dict:
    """Monte Carlo result in the standard export shape."""
    return {"phi": phi, "counts": dict(counts), "trials": trials, "seed": seed}
