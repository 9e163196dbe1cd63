"""Multi-cycle return probabilities and periodic-region annotation.

The probability of seeing the same symbol repeated every d positions over
n consecutive cycles factorizes into per-cycle return probabilities.  Its
cycle-ratio series R(n) = p(n) / p(n-1) tracks whether successive cycles
strengthen or weaken the periodicity; regions where the ratio is
non-decreasing are flagged green, the rest red.
"""

from __future__ import annotations

from dataclasses import dataclass, replace as dc_replace

import numpy as np

from .estimation import EstimationConfig, rolling_estimate
from .model import VARIANTS, SemiMarkovModel, StateSpace, return_probability
from .nhmodel import all_position_return_probability

__all__ = [
    "GREEN",
    "RED",
    "CycleProfile",
    "RegionAnnotation",
    "SequenceAnalysis",
    "cycle_probabilities",
    "nh_cycle_probabilities",
    "ratio_series",
    "color_regions",
    "analyze_sequence",
]

GREEN = "green"
RED = "red"

# ratios need two cycles, a color comparison needs two ratios
FIRST_COLORED_CYCLE = 3


@dataclass(frozen=True)
class CycleProfile:
    """Per-cycle log probabilities and ratios for one coding position.

    Row n-1 belongs to cycle n (cycles are 1-indexed).  log_steps[n-1, i]
    is the log of the factor cycle n multiplies into the probability that
    state i recurs at lag d; logp is its cumulative sum, with -inf marking
    hard zeros.  ratios hold R(n) = p(n)/p(n-1) from cycle 2 on (NaN at
    cycle 1).  Because the probability is an explicit product, the ratio
    equals the cycle-n factor itself, which keeps R defined and the
    identity R(n) * p(n-1) = p(n) exact even after p reaches zero.
    k is the coding position, or None for a homogeneous profile.
    """

    states: StateSpace
    d: int
    k: int | None
    variant: str
    log_steps: np.ndarray       # (n_cycles, N)
    logp: np.ndarray            # (n_cycles, N)
    ratios: np.ndarray          # (n_cycles, N)
    has_ratios: bool = False

    @property
    def n_cycles(self) -> int:
        return int(self.logp.shape[0])


@dataclass(frozen=True)
class RegionAnnotation:
    """Green/red classification of the cycle axis for one state.

    colors[n-1] is the color of cycle n (None before any comparison is
    possible).  runs are maximal (color, first_cycle, last_cycle) blocks,
    inclusive, partitioning the colored cycles.
    """

    state: str
    k: int | None
    colors: tuple
    runs: tuple

    @property
    def n_cycles(self) -> int:
        return len(self.colors)


def _check_variant(variant: str) -> None:
    if variant not in VARIANTS:
        raise ValueError("variant must be one of %r, got %r" % (VARIANTS, variant))


def cycle_probabilities(model: SemiMarkovModel, d: int, n_max: int,
                        variant: str = "paper-survival") -> CycleProfile:
    """Multi-cycle profile under one fixed homogeneous model.

    With fixed parameters each cycle contributes the same factor, so the
    log probability accumulates by repeated addition of log p(1).
    """
    _check_variant(variant)
    if n_max < 1:
        raise ValueError("n_max must be >= 1, got %d" % n_max)
    p1 = return_probability(model, d, variant)
    with np.errstate(divide="ignore"):
        step = np.log(p1)
    log_steps = np.tile(step, (n_max, 1))
    logp = np.cumsum(log_steps, axis=0)
    ratios = np.full_like(logp, np.nan)
    return CycleProfile(states=model.states, d=d, k=None, variant=variant,
                        log_steps=log_steps, logp=logp, ratios=ratios)


def nh_cycle_probabilities(models, k: int, d: int, variant: str = "paper-survival",
                           n_max: int | None = None) -> CycleProfile:
    """Multi-cycle profile at coding position k under per-cycle models.

    models is either one model per cycle (e.g. a rolling estimate) or a
    single model to reuse for every cycle; n_max defaults to len(models).
    Cycle n multiplies in the return probability computed from models[n-1].
    """
    _check_variant(variant)
    models = list(models)
    if not models:
        raise ValueError("need at least one model")
    if n_max is None:
        n_max = len(models)
    if n_max < 1:
        raise ValueError("n_max must be >= 1, got %d" % n_max)
    if len(models) != n_max:
        if len(models) == 1:
            models = models * n_max
        else:
            raise ValueError(
                "got %d models for %d cycles; pass one per cycle or exactly one"
                % (len(models), n_max))
    s = models[0].s
    if not 0 <= k < s:
        raise ValueError("coding position k must be in 0..%d, got %d" % (s - 1, k))
    brackets = _per_model_returns(models, d, variant)   # (n_max, s, N)
    with np.errstate(divide="ignore"):
        log_steps = np.log(brackets[:, k, :])
    logp = np.cumsum(log_steps, axis=0)
    ratios = np.full_like(logp, np.nan)
    return CycleProfile(states=models[0].states, d=d, k=k, variant=variant,
                        log_steps=log_steps, logp=logp, ratios=ratios)


def _per_model_returns(models, d: int, variant: str) -> np.ndarray:
    """Return probabilities for every model, all coding positions.

    Consecutive repeats of the same model object (the warm-up block of a
    rolling estimate) are computed once.
    """
    out = np.empty((len(models), models[0].s, models[0].n_states))
    prev = None
    for n, mdl in enumerate(models):
        if prev is not None and mdl is models[n - 1]:
            out[n] = out[n - 1]
        else:
            out[n] = all_position_return_probability(mdl, d, variant)
        prev = mdl
    return out


def ratio_series(profile: CycleProfile) -> CycleProfile:
    """Fill in R(n) = p(n)/p(n-1); defined from cycle 2 on.

    The ratio is the exponential of the cycle-n log factor, i.e. exactly
    the multiplier the product picked up at cycle n.  It stays defined
    after p has reached zero (where a literal quotient would be 0/0).
    """
    if profile.n_cycles < 2:
        raise ValueError("ratio series needs at least 2 cycles, got %d" % profile.n_cycles)
    ratios = np.full_like(profile.logp, np.nan)
    ratios[1:] = np.exp(profile.log_steps[1:])
    return dc_replace(profile, ratios=ratios, has_ratios=True)


def color_regions(profile: CycleProfile, state: str) -> RegionAnnotation:
    """Classify cycles by the direction of the ratio series for one state.

    Cycle n is green when R(n) >= R(n-1) (periodicity holding steady or
    strengthening), red when it drops.  The first comparable cycle is 3;
    earlier cycles stay uncolored.  An undefined ratio (NaN) never flags
    red: the comparison counts as holding steady.
    """
    si = profile.states.index(state)
    if profile.n_cycles < FIRST_COLORED_CYCLE:
        raise ValueError(
            "coloring needs at least %d cycles, got %d"
            % (FIRST_COLORED_CYCLE, profile.n_cycles))
    if not profile.has_ratios:
        profile = ratio_series(profile)
    r = profile.ratios[:, si]
    colors: list[str | None] = [None] * profile.n_cycles
    for n in range(FIRST_COLORED_CYCLE, profile.n_cycles + 1):
        cur, prev = r[n - 1], r[n - 2]
        if np.isnan(cur) or np.isnan(prev):
            colors[n - 1] = GREEN
        else:
            colors[n - 1] = GREEN if cur >= prev else RED
    runs: list[tuple[str, int, int]] = []
    for n in range(FIRST_COLORED_CYCLE, profile.n_cycles + 1):
        color = colors[n - 1]
        if runs and runs[-1][0] == color:
            runs[-1] = (color, runs[-1][1], n)
        else:
            runs.append((color, n, n))
    return RegionAnnotation(state=state, k=profile.k, colors=tuple(colors),
                            runs=tuple(runs))


@dataclass(frozen=True)
class SequenceAnalysis:
    """Everything the end-to-end pipeline produces for one sequence."""

    d: int
    variant: str
    profiles: dict            # coding position k -> CycleProfile (ratios filled)
    annotations: dict         # (k, state symbol) -> RegionAnnotation
    models: list              # per-cycle rolling models


def analyze_sequence(seq, d: int = 3, config: EstimationConfig | None = None,
                     variant: str = "paper-survival", warmup_cycles: int = 10,
                     k_offset: int = 0) -> SequenceAnalysis:
    """Rolling estimation, cycle profiles and region colors in one pass.

    The sequence is re-estimated cycle by cycle; each cycle's return
    probabilities come from the model fitted to the prefix ending there.
    Profiles and annotations are produced for every coding position and
    state.
    """
    _check_variant(variant)
    if config is None:
        config = EstimationConfig()
    models = rolling_estimate(seq, d, config, warmup_cycles=warmup_cycles,
                              k_offset=k_offset)
    brackets = _per_model_returns(models, d, variant)   # (n_cycles, s, N)
    profiles = {}
    annotations = {}
    with np.errstate(divide="ignore"):
        log_brackets = np.log(brackets)
    for k in range(config.s):
        log_steps = log_brackets[:, k, :]
        logp = np.cumsum(log_steps, axis=0)
        ratios = np.full_like(logp, np.nan)
        profile = CycleProfile(states=seq.states, d=d, k=k, variant=variant,
                               log_steps=log_steps, logp=logp, ratios=ratios)
        profile = ratio_series(profile)
        profiles[k] = profile
        for sym in seq.states.symbols:
            annotations[(k, sym)] = color_regions(profile, sym)
    return SequenceAnalysis(d=d, variant=variant, profiles=profiles,
                            annotations=annotations, models=models)
