"""Count-based estimation of semi-Markov models from symbol sequences.

A sequence is reduced to its run-length encoding.  Each completed run
contributes one transition count (current state to successor state, keyed
by the coding position of the run start) and one duration count for the
same pair.  Embedded probabilities are the row-normalized transition
counts; holding-time pmfs are the per-pair duration histograms.  The
final run of a sequence is right-censored (its outgoing transition is
never observed) and is dropped by default.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import NamedTuple

import numpy as np

from .model import SemiMarkovModel, StateSpace
from .nhmodel import NHSemiMarkovModel
from .seqio import SymbolSequence

__all__ = [
    "Run",
    "RunLengthEncoding",
    "EstimationConfig",
    "extract_runs",
    "estimate_nh",
    "estimate_homogeneous",
    "rolling_estimate",
    "ZERO_ROW_POLICIES",
]

ZERO_ROW_POLICIES = ("uniform-offdiagonal", "error")


class Run(NamedTuple):
    state: int
    duration: int
    start: int


@dataclass(frozen=True)
class RunLengthEncoding:
    """Maximal runs of a sequence, in order of appearance.

    The last run is always right-censored: the sequence ends while the
    state is still being held, so neither its true duration nor its
    outgoing transition is observed.
    """

    states: StateSpace
    run_states: np.ndarray     # (n_runs,)
    durations: np.ndarray      # (n_runs,)
    starts: np.ndarray         # (n_runs,)
    last_censored: bool = True

    @property
    def n_runs(self) -> int:
        return int(self.run_states.size)

    @property
    def runs(self) -> list[Run]:
        return [Run(int(s), int(d), int(p))
                for s, d, p in zip(self.run_states, self.durations, self.starts)]


def extract_runs(seq: SymbolSequence) -> RunLengthEncoding:
    """Run-length encode a sequence.  Errors on empty input."""
    if len(seq) == 0:
        raise ValueError("cannot extract runs from an empty sequence")
    idx = seq.symbols
    boundaries = np.flatnonzero(np.diff(idx)) + 1
    starts = np.concatenate(([0], boundaries))
    ends = np.concatenate((boundaries, [idx.size]))
    return RunLengthEncoding(
        states=seq.states,
        run_states=idx[starts].copy(),
        durations=ends - starts,
        starts=starts,
    )


@dataclass(frozen=True)
class EstimationConfig:
    """Knobs shared by all estimators.

    s is the coding-position modulus (1 gives a homogeneous estimate).
    Durations longer than m_max are counted as m_max.  zero_row_policy
    decides what to do for a (position, state) pair that never exits:
    "uniform-offdiagonal" fills the row evenly, "error" raises.  A pair
    that is never observed at all keeps a unit pmf at duration 1.
    """

    s: int = 3
    m_max: int = 30
    zero_row_policy: str = "uniform-offdiagonal"
    drop_censored_final_run: bool = True

    def __post_init__(self):
        if self.s < 1:
            raise ValueError("s must be >= 1, got %d" % self.s)
        if self.m_max < 1:
            raise ValueError("m_max must be >= 1, got %d" % self.m_max)
        if self.zero_row_policy not in ZERO_ROW_POLICIES:
            raise ValueError("zero_row_policy must be one of %r, got %r"
                             % (ZERO_ROW_POLICIES, self.zero_row_policy))


def _count_tables(rle: RunLengthEncoding, config: EstimationConfig,
                  limit: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Transition and duration counts from runs completed before limit.

    A run is completed once its successor has started, i.e. when the
    successor start position is < limit.  With drop_censored_final_run
    False the trailing censored run is also counted, its truncated
    duration spread evenly over the possible destinations.
    """
    n = rle.states.size
    trans = np.zeros((config.s, n, n))
    dur = np.zeros((config.m_max, n, n))
    if limit is None:
        limit = int(rle.starts[-1] + rle.durations[-1])
    if rle.n_runs > 1:
        succ_starts = rle.starts[1:]
        sel = succ_starts < limit
        i = rle.run_states[:-1][sel]
        j = rle.run_states[1:][sel]
        k = rle.starts[:-1][sel] % config.s
        m = np.minimum(rle.durations[:-1][sel], config.m_max)
        np.add.at(trans, (k, i, j), 1.0)
        np.add.at(dur, (m - 1, i, j), 1.0)
    if not config.drop_censored_final_run:
        _add_censored_run(trans, dur, rle, config, limit)
    return trans, dur


def _add_censored_run(trans: np.ndarray, dur: np.ndarray, rle: RunLengthEncoding,
                      config: EstimationConfig, limit: int) -> None:
    """Count the run still open at the prefix end, destination unknown.

    The observed (possibly truncated) duration is attributed evenly over
    the feasible destinations, as a fractional count.
    """
    if limit < 1:
        return
    r = int(np.searchsorted(rle.starts, limit, side="right") - 1)
    start = int(rle.starts[r])
    i = int(rle.run_states[r])
    n = rle.states.size
    m = min(int(rle.durations[r]), limit - start, config.m_max)
    w = 1.0 / (n - 1)
    for j in range(n):
        if j == i:
            continue
        trans[start % config.s, i, j] += w
        dur[m - 1, i, j] += w


def _materialize(trans: np.ndarray, dur: np.ndarray, states: StateSpace,
                 config: EstimationConfig) -> tuple[np.ndarray, np.ndarray]:
    """Turn count tables into (Pk, H) arrays, applying the zero policies."""
    n = states.size
    row_tot = trans.sum(axis=2)
    if config.zero_row_policy == "error":
        bad = row_tot <= 0
        if bad.any():
            k, i = (int(x) for x in np.argwhere(bad)[0])
            raise ValueError(
                "state %s entered at coding position %d is never observed "
                "exiting; cannot estimate its transition row"
                % (states.symbols[i], k))
    Pk = np.zeros_like(trans)
    np.divide(trans, row_tot[:, :, None], out=Pk, where=row_tot[:, :, None] > 0)
    fill = np.full(n, 1.0 / (n - 1))
    for k, i in np.argwhere(row_tot <= 0):
        Pk[k, i] = fill
        Pk[k, i, i] = 0.0
    pair_tot = dur.sum(axis=0)
    H = np.zeros_like(dur)
    np.divide(dur, pair_tot[None, :, :], out=H, where=pair_tot[None, :, :] > 0)
    H[0][pair_tot <= 0] = 1.0
    return Pk, H


def estimate_nh(seq: SymbolSequence, config: EstimationConfig | None = None) -> NHSemiMarkovModel:
    """Estimate a non-homogeneous model from a whole sequence.

    Requires at least one completed run (one observed transition).
    """
    if config is None:
        config = EstimationConfig()
    rle = extract_runs(seq)
    if rle.n_runs < 2:
        raise ValueError("sequence has no completed runs; nothing to estimate")
    trans, dur = _count_tables(rle, config)
    Pk, H = _materialize(trans, dur, seq.states, config)
    return NHSemiMarkovModel(seq.states, Pk, H)


def estimate_homogeneous(seq: SymbolSequence, config: EstimationConfig | None = None) -> SemiMarkovModel:
    """Estimate a homogeneous model: same counts with the position folded out."""
    if config is None:
        config = EstimationConfig(s=1)
    flat = EstimationConfig(s=1, m_max=config.m_max,
                            zero_row_policy=config.zero_row_policy,
                            drop_censored_final_run=config.drop_censored_final_run)
    nh = estimate_nh(seq, flat)
    return SemiMarkovModel(seq.states, nh.Pk[0], nh.H)


def rolling_estimate(seq: SymbolSequence, d: int, config: EstimationConfig | None = None,
                     warmup_cycles: int = 10, k_offset: int = 0) -> list[NHSemiMarkovModel]:
    """One model per cycle of length d, each estimated from a growing prefix.

    The model for cycle n is estimated from the first n*d + k_offset
    symbols.  The first warmup_cycles cycles share a model estimated from
    the warm-up prefix of warmup_cycles*d symbols, so early cycles are not
    scored against unusably noisy estimates.  Counting is incremental: the
    prefix only ever grows, so each step adds the newly completed runs.
    """
    if config is None:
        config = EstimationConfig()
    if d < 1:
        raise ValueError("cycle length d must be >= 1, got %d" % d)
    if warmup_cycles < 1:
        raise ValueError("warmup_cycles must be >= 1, got %d" % warmup_cycles)
    if k_offset < 0:
        raise ValueError("k_offset must be >= 0, got %d" % k_offset)
    min_len = warmup_cycles * d
    if len(seq) < min_len:
        raise ValueError(
            "sequence length %d is below the warm-up minimum %d (= %d cycles of %d)"
            % (len(seq), min_len, warmup_cycles, d))
    n_cycles = len(seq) // d
    rle = extract_runs(seq)
    succ_starts = rle.starts[1:]
    base = replace(config, drop_censored_final_run=True)
    trans, dur = _count_tables(rle, base, limit=min_len)

    def build(limit: int) -> NHSemiMarkovModel:
        if config.drop_censored_final_run:
            t, u = trans, dur
        else:
            # the open run changes every step, so overlay it per prefix
            t, u = trans.copy(), dur.copy()
            _add_censored_run(t, u, rle, config, limit)
        Pk, H = _materialize(t, u, seq.states, config)
        return NHSemiMarkovModel(seq.states, Pk, H)

    warm = build(min_len)
    models: list[NHSemiMarkovModel] = [warm] * min(warmup_cycles, n_cycles)
    ptr = int(np.searchsorted(succ_starts, min_len))
    for cycle in range(warmup_cycles + 1, n_cycles + 1):
        limit = min(cycle * d + k_offset, len(seq))
        while ptr < succ_starts.size and succ_starts[ptr] < limit:
            i = int(rle.run_states[ptr])
            j = int(rle.run_states[ptr + 1])
            k = int(rle.starts[ptr]) % config.s
            m = min(int(rle.durations[ptr]), config.m_max)
            trans[k, i, j] += 1.0
            dur[m - 1, i, j] += 1.0
            ptr += 1
        models.append(build(limit))
    return models
