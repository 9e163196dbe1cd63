"""Partially non-homogeneous semi-Markov chains.

The embedded transition matrix depends on the coding position k = t mod s
at which a state is entered, while the holding-time table is shared across
positions.  With s = 1 everything reduces to the homogeneous model.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import (
    VARIANTS,
    SemiMarkovModel,
    StateSpace,
    _renormalize_holding,
    _validate_embedded,
    _validate_holding,
)

__all__ = [
    "NHSemiMarkovModel",
    "NHCoreSequence",
    "NHWaitingTail",
    "NHIntervalKernel",
    "lift_homogeneous",
    "nh_core",
    "nh_waiting_time_pmf",
    "nh_interval_recursive",
    "nh_interval_closed",
    "nh_return_probability",
    "random_nh_model",
]


class NHSemiMarkovModel:
    """Semi-Markov chain with one embedded matrix per coding position.

    Parameters
    ----------
    states : StateSpace
    Pk : array_like, shape (s, N, N)
        Pk[k] governs transitions out of states entered at coding
        position k.  Each slice has a zero diagonal and stochastic rows.
    H : array_like, shape (m_max, N, N)
        Holding-time pmfs shared by all coding positions.
    """

    def __init__(self, states: StateSpace, Pk, H, *, renormalize: bool = False):
        Pk = np.array(Pk, dtype=float)
        H = np.array(H, dtype=float)
        if Pk.ndim != 3 or Pk.shape[0] < 1:
            raise ValueError(
                "coding-position matrices must have shape (s, N, N), got %r" % (Pk.shape,)
            )
        if renormalize:
            # the shared pmf table only needs mass on pairs used by some position
            H = _renormalize_holding(Pk.max(axis=0), H)
        for k in range(Pk.shape[0]):
            _validate_embedded(Pk[k], states, label="embedded matrix for position %d" % k)
        _validate_holding(Pk.max(axis=0), H, states)
        Pk.setflags(write=False)
        H.setflags(write=False)
        self.states = states
        self.Pk = Pk
        self.H = H

    @property
    def s(self) -> int:
        return self.Pk.shape[0]

    @property
    def n_states(self) -> int:
        return self.states.size

    @property
    def m_max(self) -> int:
        return self.H.shape[0]

    def __repr__(self) -> str:
        return "NHSemiMarkovModel(states=%r, s=%d, m_max=%d)" % (
            self.states.symbols, self.s, self.m_max)


def lift_homogeneous(model: SemiMarkovModel, s: int = 1) -> NHSemiMarkovModel:
    """Replicate a homogeneous model across s coding positions."""
    if s < 1:
        raise ValueError("s must be >= 1, got %d" % s)
    Pk = np.repeat(model.P[None, :, :], s, axis=0)
    return NHSemiMarkovModel(model.states, Pk, model.H)


@dataclass(frozen=True)
class NHCoreSequence:
    """Cores C(k, m) = Pk[k] * H(m) and their survival sums over m."""

    C: np.ndarray        # (s, m_max, N, N)
    C_geq: np.ndarray    # (s, m_max, N, N)


@dataclass(frozen=True)
class NHWaitingTail:
    """Waiting-time pmf and right tail per coding position and state."""

    pmf: np.ndarray      # (s, N, m_max)
    tail: np.ndarray     # (s, N, m_max + 1)

    def tail_at(self, k: int, n: int) -> np.ndarray:
        if n < 0:
            raise ValueError("tail lag must be >= 0, got %d" % n)
        m_max = self.pmf.shape[2]
        if n > m_max:
            return np.zeros(self.pmf.shape[1])
        return self.tail[k, :, n]


@dataclass(frozen=True)
class NHIntervalKernel:
    """Interval transition matrices indexed by entry position and lag."""

    Q: np.ndarray        # (s, n_max + 1, N, N)

    @property
    def n_max(self) -> int:
        return self.Q.shape[1] - 1

    def at(self, k: int, n: int) -> np.ndarray:
        return self.Q[k, n]


def nh_core(model: NHSemiMarkovModel) -> NHCoreSequence:
    C = np.einsum("kij,mij->kmij", model.Pk, model.H)
    C_geq = np.cumsum(C[:, ::-1], axis=1)[:, ::-1]
    return NHCoreSequence(C=C, C_geq=C_geq)


def nh_waiting_time_pmf(model: NHSemiMarkovModel) -> NHWaitingTail:
    pmf = np.einsum("kij,mij->kim", model.Pk, model.H)
    s, n_states, m_max = pmf.shape
    tail = np.zeros((s, n_states, m_max + 1))
    tail[:, :, :m_max] = np.cumsum(pmf[:, :, ::-1], axis=2)[:, :, ::-1]
    return NHWaitingTail(pmf=pmf, tail=tail)


def nh_interval_recursive(model: NHSemiMarkovModel, n_max: int) -> NHIntervalKernel:
    """Kernels Q(k, n) for every entry position k and lag n <= n_max.

    Same first-jump decomposition as the homogeneous recursion, except the
    chain re-enters at coding position (k + m) mod s after a jump of
    length m, so the recursion couples the s kernel stacks.
    """
    if n_max < 0:
        raise ValueError("n_max must be >= 0, got %d" % n_max)
    core = nh_core(model)
    wt = nh_waiting_time_pmf(model)
    s, n_states = model.s, model.n_states
    Q = np.zeros((s, n_max + 1, n_states, n_states))
    Q[:, 0] = np.eye(n_states)
    for n in range(1, n_max + 1):
        for k in range(s):
            acc = np.diag(wt.tail_at(k, n))
            for m in range(1, min(n, model.m_max) + 1):
                acc += core.C[k, m - 1] @ Q[(k + m) % s, n - m]
            Q[k, n] = acc
    return NHIntervalKernel(Q=Q)


def _nh_jump_arrival_sums(C: np.ndarray, k: int, t_max: int, s: int) -> list[np.ndarray]:
    """Composition sums as in the homogeneous case, with shifting cores.

    A jump of length m taken from coding position q uses core C[q, m] and
    moves the position to (q + m) mod s.  Element t collects every ordered
    composition of t starting from position k.
    """
    m_max, n_states = C.shape[1], C.shape[2]
    sums = [np.zeros((n_states, n_states)) for _ in range(t_max + 1)]

    def extend(t: int, pos: int, prod: np.ndarray) -> None:
        for m in range(1, min(m_max, t_max - t) + 1):
            nxt = prod @ C[pos, m - 1]
            if not nxt.any():
                continue
            sums[t + m] += nxt
            extend(t + m, (pos + m) % s, nxt)

    extend(0, k, np.eye(n_states))
    return sums


def nh_interval_closed(model: NHSemiMarkovModel, k: int, n: int) -> np.ndarray:
    """Closed-form Q(k, n), independent of the coupled recursion."""
    if n < 0:
        raise ValueError("n must be >= 0, got %d" % n)
    if not 0 <= k < model.s:
        raise ValueError("coding position k must be in 0..%d, got %d" % (model.s - 1, k))
    n_states = model.n_states
    if n == 0:
        return np.eye(n_states)
    core = nh_core(model)
    wt = nh_waiting_time_pmf(model)

    def last_step(pos: int, length: int) -> np.ndarray:
        out = np.diag(wt.tail_at(pos, length))
        if 1 <= length <= model.m_max:
            out = out + core.C[pos, length - 1]
        return out

    q = last_step(k, n)
    arrivals = _nh_jump_arrival_sums(core.C, k, n - 1, model.s)
    for j in range(2, n + 1):
        pos = (k + j - 1) % model.s
        q = q + arrivals[j - 1] @ last_step(pos, n - j + 1)
    return q


def _return_from_tables(core: NHCoreSequence, wt: NHWaitingTail, Q: np.ndarray,
                        k: int, d: int, s: int, m_max: int, variant: str) -> np.ndarray:
    K = core.C_geq if variant == "paper-survival" else core.C
    p = wt.tail_at(k, d).copy()
    for x in range(1, min(d, m_max) + 1):
        p += np.einsum("ij,ji->i", K[k, x - 1], Q[(k + x) % s, d - x])
    return p


def nh_return_probability(model: NHSemiMarkovModel, k: int, d: int,
                          variant: str = "paper-survival") -> np.ndarray:
    """Return probability at lag d for states entered at coding position k.

    Mirrors the homogeneous variant semantics: "paper-survival" uses the
    survival cores for the first departure, "exact-entry" the plain cores
    (equal to diag Q(k, d)).
    """
    if d < 1:
        raise ValueError("lag d must be >= 1, got %d" % d)
    if variant not in VARIANTS:
        raise ValueError("variant must be one of %r, got %r" % (VARIANTS, variant))
    if not 0 <= k < model.s:
        raise ValueError("coding position k must be in 0..%d, got %d" % (model.s - 1, k))
    core = nh_core(model)
    wt = nh_waiting_time_pmf(model)
    kernel = nh_interval_recursive(model, d - 1)
    return _return_from_tables(core, wt, kernel.Q, k, d, model.s, model.m_max, variant)


def all_position_return_probability(model: NHSemiMarkovModel, d: int,
                                    variant: str = "paper-survival") -> np.ndarray:
    """Return probabilities for all coding positions at once, shape (s, N).

    Shares the kernel stack across positions, which matters when this is
    evaluated once per rolling re-estimation step.
    """
    if d < 1:
        raise ValueError("lag d must be >= 1, got %d" % d)
    if variant not in VARIANTS:
        raise ValueError("variant must be one of %r, got %r" % (VARIANTS, variant))
    core = nh_core(model)
    wt = nh_waiting_time_pmf(model)
    kernel = nh_interval_recursive(model, d - 1)
    out = np.empty((model.s, model.n_states))
    for k in range(model.s):
        out[k] = _return_from_tables(core, wt, kernel.Q, k, d, model.s, model.m_max, variant)
    return out


def random_nh_model(seed, s: int = 3, n_states: int = 4, m_max: int = 6,
                    states: StateSpace | None = None) -> NHSemiMarkovModel:
    """Random strictly positive non-homogeneous model."""
    rng = np.random.default_rng(seed)
    if states is None:
        if n_states == 4:
            states = StateSpace.dna()
        else:
            states = StateSpace(tuple("S%d" % i for i in range(n_states)))
    n = states.size
    Pk = rng.gamma(1.0, size=(s, n, n))
    for k in range(s):
        np.fill_diagonal(Pk[k], 0.0)
    Pk /= Pk.sum(axis=2, keepdims=True)
    H = rng.gamma(1.0, size=(m_max, n, n))
    H /= H.sum(axis=0, keepdims=True)
    return NHSemiMarkovModel(states, Pk, H)
