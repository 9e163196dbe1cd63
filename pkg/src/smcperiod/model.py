"""Discrete semi-Markov chains over a finite symbol alphabet.

A model is given by an embedded transition matrix P (no self loops) and
conditional holding-time distributions H(m), m = 1..M, one pmf per ordered
state pair.  From these we derive the interval transition kernels Q(n),
i.e. the probability of occupying state j exactly n positions after an
entry into state i, and the probability of returning to the current state
a fixed lag d later.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "StateSpace",
    "SemiMarkovModel",
    "CoreSequence",
    "WaitingTail",
    "IntervalKernel",
    "geometric_holding",
    "uniform_embedded",
    "build_core",
    "waiting_time_pmf",
    "interval_transition_recursive",
    "interval_transition_closed",
    "return_probability",
    "random_model",
    "VARIANTS",
]

# row/column sums of probability tables must match 1 to this tolerance
ROW_SUM_TOL = 1e-12

VARIANTS = ("paper-survival", "exact-entry")


@dataclass(frozen=True)
class StateSpace:
    """Ordered alphabet of symbols; positions in the tuple are the state ids."""

    symbols: tuple[str, ...]

    def __post_init__(self):
        if len(self.symbols) < 2:
            raise ValueError("state space needs at least two symbols, got %r" % (self.symbols,))
        if len(set(self.symbols)) != len(self.symbols):
            raise ValueError("state space symbols must be distinct, got %r" % (self.symbols,))
        object.__setattr__(self, "symbols", tuple(str(s) for s in self.symbols))

    @classmethod
    def dna(cls) -> "StateSpace":
        return cls(("A", "C", "G", "T"))

    @property
    def size(self) -> int:
        return len(self.symbols)

    def __len__(self) -> int:
        return len(self.symbols)

    def index(self, symbol: str) -> int:
        try:
            return self.symbols.index(symbol)
        except ValueError:
            raise ValueError(
                "symbol %r not in state space %r" % (symbol, self.symbols)
            ) from None


def _validate_embedded(P: np.ndarray, states: StateSpace, label: str = "embedded matrix") -> None:
    n = states.size
    if P.shape != (n, n):
        raise ValueError("%s must have shape (%d, %d), got %r" % (label, n, n, P.shape))
    if np.any(P < 0) or np.any(P > 1 + ROW_SUM_TOL):
        raise ValueError("%s entries must lie in [0, 1]" % label)
    diag = np.abs(np.diag(P))
    if diag.max() > 0:
        i = int(diag.argmax())
        raise ValueError(
            "%s has a nonzero diagonal entry for state %s; self transitions "
            "are not allowed" % (label, states.symbols[i])
        )
    row_sums = P.sum(axis=1)
    bad = np.abs(row_sums - 1.0) > ROW_SUM_TOL
    if bad.any():
        i = int(np.flatnonzero(bad)[0])
        raise ValueError(
            "%s row for state %s sums to %.17g, expected 1 within %g"
            % (label, states.symbols[i], row_sums[i], ROW_SUM_TOL)
        )


def _validate_holding(P: np.ndarray, H: np.ndarray, states: StateSpace) -> None:
    n = states.size
    if H.ndim != 3 or H.shape[1:] != (n, n) or H.shape[0] < 1:
        raise ValueError(
            "holding-time table must have shape (m_max, %d, %d) with m_max >= 1, "
            "got %r" % (n, n, H.shape)
        )
    if np.any(H < 0) or np.any(H > 1 + ROW_SUM_TOL):
        raise ValueError("holding-time entries must lie in [0, 1]")
    sums = H.sum(axis=0)
    support = P > 0
    bad = support & (np.abs(sums - 1.0) > ROW_SUM_TOL)
    if bad.any():
        i, j = (int(x) for x in np.argwhere(bad)[0])
        raise ValueError(
            "holding-time pmf for pair %s->%s sums to %.17g, expected 1 within %g"
            % (states.symbols[i], states.symbols[j], sums[i, j], ROW_SUM_TOL)
        )


def _renormalize_holding(P: np.ndarray, H: np.ndarray) -> np.ndarray:
    """Rescale each pmf on the truncated support 1..m_max to total mass 1."""
    sums = H.sum(axis=0)
    out = H.copy()
    support = P > 0
    zero = support & (sums <= 0)
    if zero.any():
        i, j = (int(x) for x in np.argwhere(zero)[0])
        raise ValueError(
            "cannot renormalize holding-time pmf with zero mass for pair (%d, %d)" % (i, j)
        )
    scale = np.where(sums > 0, sums, 1.0)
    out /= scale
    return out


class SemiMarkovModel:
    """Homogeneous semi-Markov chain: one embedded matrix, shared clock.

    Parameters
    ----------
    states : StateSpace
    P : array_like, shape (N, N)
        Embedded transition probabilities, zero diagonal, rows sum to 1.
    H : array_like, shape (m_max, N, N)
        H[m-1, i, j] is the probability of holding state i exactly m
        positions given the next state is j.  Durations beyond m_max carry
        no mass; pass renormalize=True to fold a truncated tail back in.
    """

    def __init__(self, states: StateSpace, P, H, *, renormalize: bool = False):
        P = np.array(P, dtype=float)
        H = np.array(H, dtype=float)
        if renormalize:
            H = _renormalize_holding(P, H)
        _validate_embedded(P, states)
        _validate_holding(P, H, states)
        P.setflags(write=False)
        H.setflags(write=False)
        self.states = states
        self.P = P
        self.H = H

    @property
    def n_states(self) -> int:
        return self.states.size

    @property
    def m_max(self) -> int:
        return self.H.shape[0]

    def __repr__(self) -> str:
        return "SemiMarkovModel(states=%r, m_max=%d)" % (self.states.symbols, self.m_max)


@dataclass(frozen=True)
class CoreSequence:
    """Core matrices C(m) = P * H(m) and survival cores sum_{u>=m} C(u)."""

    C: np.ndarray        # (m_max, N, N)
    C_geq: np.ndarray    # (m_max, N, N)


@dataclass(frozen=True)
class WaitingTail:
    """Unconditional waiting-time pmf per state and its right tail.

    pmf[i, m-1] is the probability that a fresh entry into state i lasts
    exactly m positions.  tail[i, n] is the probability it lasts longer
    than n positions, for n = 0..m_max; beyond m_max the tail is zero.
    """

    pmf: np.ndarray      # (N, m_max)
    tail: np.ndarray     # (N, m_max + 1)

    def tail_at(self, n: int) -> np.ndarray:
        if n < 0:
            raise ValueError("tail lag must be >= 0, got %d" % n)
        m_max = self.pmf.shape[1]
        if n > m_max:
            return np.zeros(self.pmf.shape[0])
        return self.tail[:, n]


@dataclass(frozen=True)
class IntervalKernel:
    """Stack of interval transition matrices Q(0)..Q(n_max)."""

    Q: np.ndarray        # (n_max + 1, N, N)

    @property
    def n_max(self) -> int:
        return self.Q.shape[0] - 1

    def __getitem__(self, n: int) -> np.ndarray:
        return self.Q[n]


def geometric_holding(success: float, m_max: int) -> np.ndarray:
    """Geometric duration pmf on 1..m_max, renormalized after truncation."""
    if not 0 < success <= 1:
        raise ValueError("success probability must be in (0, 1], got %r" % success)
    if m_max < 1:
        raise ValueError("m_max must be >= 1, got %d" % m_max)
    m = np.arange(1, m_max + 1)
    pmf = success * (1 - success) ** (m - 1)
    return pmf / pmf.sum()


def uniform_embedded(states: StateSpace) -> np.ndarray:
    """Embedded matrix with equal mass on all off-diagonal targets."""
    n = states.size
    P = np.full((n, n), 1.0 / (n - 1))
    np.fill_diagonal(P, 0.0)
    return P


def build_core(model: SemiMarkovModel) -> CoreSequence:
    """Elementwise products C(m) = P * H(m) plus survival cores."""
    C = model.P[None, :, :] * model.H
    C_geq = np.cumsum(C[::-1], axis=0)[::-1]
    return CoreSequence(C=C, C_geq=C_geq)


def waiting_time_pmf(model: SemiMarkovModel) -> WaitingTail:
    """Mix holding pmfs over destinations to get per-state waiting times."""
    pmf = np.einsum("ij,mij->im", model.P, model.H)
    m_max = model.m_max
    tail = np.zeros((model.n_states, m_max + 1))
    tail[:, m_max] = 0.0
    # tail[:, n] = P(wait > n); tail[:, 0] is the full mass
    tail[:, :m_max] = np.cumsum(pmf[:, ::-1], axis=1)[:, ::-1]
    return WaitingTail(pmf=pmf, tail=tail)


def interval_transition_recursive(model: SemiMarkovModel, n_max: int) -> IntervalKernel:
    """All interval transition matrices Q(0)..Q(n_max) by forward recursion.

    Q(n)[i, j] is the probability of occupying j exactly n positions after
    an entry into i.  Q(0) = I and

        Q(n) = diag(tail(n)) + sum_{m=1..min(n, m_max)} C(m) @ Q(n - m),

    where the diagonal term covers trajectories still in their first
    holding period and the sum conditions on the first jump time m.
    """
    if n_max < 0:
        raise ValueError("n_max must be >= 0, got %d" % n_max)
    core = build_core(model)
    wt = waiting_time_pmf(model)
    n_states = model.n_states
    Q = np.zeros((n_max + 1, n_states, n_states))
    Q[0] = np.eye(n_states)
    for n in range(1, n_max + 1):
        mm = min(n, model.m_max)
        # pair C(m) with Q(n - m) for m = 1..mm
        acc = np.einsum("mij,mjk->ik", core.C[:mm], Q[n - mm:n][::-1])
        acc[np.diag_indices(n_states)] += wt.tail_at(n)
        Q[n] = acc
    return IntervalKernel(Q=Q)


def _jump_arrival_sums(C: np.ndarray, t_max: int) -> list[np.ndarray]:
    """Sum of core products over every ordered jump composition of t.

    Element t of the returned list is sum over all L >= 1 and all
    (m_1, .., m_L) with m_1 + .. + m_L = t of C(m_1) @ .. @ C(m_L).  The
    enumeration is literal (depth-first over compositions), so cost grows
    exponentially with t_max; intended for cross-validation horizons only.
    """
    m_max, n_states = C.shape[0], C.shape[1]
    sums = [np.zeros((n_states, n_states)) for _ in range(t_max + 1)]

    def extend(t: int, prod: np.ndarray) -> None:
        for m in range(1, min(m_max, t_max - t) + 1):
            nxt = prod @ C[m - 1]
            if not nxt.any():
                continue
            sums[t + m] += nxt
            extend(t + m, nxt)

    for m in range(1, min(m_max, t_max) + 1):
        if not C[m - 1].any():
            continue
        sums[m] += C[m - 1]
        extend(m, C[m - 1])
    return sums


def interval_transition_closed(model: SemiMarkovModel, n: int) -> np.ndarray:
    """Single interval transition matrix Q(n) in closed form.

    Splits trajectories by the time of the last jump inside the window:
    no jump at all (waiting tail), a single jump at n (core C(n)), or a
    chain of jumps arriving at j - 1 followed by one final step of length
    n - j + 1 (or survival past the window end).  The arrival weights are
    expanded as explicit sums over jump compositions rather than reusing
    the recursion, so the two evaluations are independent.
    """
    if n < 0:
        raise ValueError("n must be >= 0, got %d" % n)
    n_states = model.n_states
    if n == 0:
        return np.eye(n_states)
    core = build_core(model)
    wt = waiting_time_pmf(model)

    def last_step(length: int) -> np.ndarray:
        out = np.diag(wt.tail_at(length))
        if 1 <= length <= model.m_max:
            out = out + core.C[length - 1]
        return out

    q = last_step(n)
    arrivals = _jump_arrival_sums(core.C, n - 1)
    for j in range(2, n + 1):
        q = q + arrivals[j - 1] @ last_step(n - j + 1)
    return q


def return_probability(model: SemiMarkovModel, d: int, variant: str = "paper-survival") -> np.ndarray:
    """Probability of showing the current symbol again d positions later.

    For each state i this accumulates: never leaving i within the window
    (waiting tail at d), plus leaving at some lag x and being back in i
    after the remaining d - x positions.

    variant "paper-survival" weights the first departure with the survival
    core sum_{u>=x} C(u), counting trajectories whose first holding period
    merely reaches x; it can exceed the exact occupancy probability and is
    reported unclamped.  variant "exact-entry" weights with C(x) itself and
    equals diag(Q(d)).
    """
    if d < 1:
        raise ValueError("lag d must be >= 1, got %d" % d)
    if variant not in VARIANTS:
        raise ValueError("variant must be one of %r, got %r" % (VARIANTS, variant))
    core = build_core(model)
    wt = waiting_time_pmf(model)
    kernel = interval_transition_recursive(model, d - 1)
    K = core.C_geq if variant == "paper-survival" else core.C
    p = wt.tail_at(d).copy()
    for x in range(1, min(d, model.m_max) + 1):
        p += np.einsum("ij,ji->i", K[x - 1], kernel.Q[d - x])
    return p


def random_model(seed, n_states: int = 4, m_max: int = 6,
                 states: StateSpace | None = None) -> SemiMarkovModel:
    """Random strictly positive model, useful for cross-validation sweeps."""
    rng = np.random.default_rng(seed)
    if states is None:
        if n_states == 4:
            states = StateSpace.dna()
        else:
            states = StateSpace(tuple("S%d" % i for i in range(n_states)))
    n = states.size
    P = rng.gamma(1.0, size=(n, n))
    np.fill_diagonal(P, 0.0)
    P /= P.sum(axis=1, keepdims=True)
    H = rng.gamma(1.0, size=(m_max, n, n))
    H /= H.sum(axis=0, keepdims=True)
    return SemiMarkovModel(states, P, H)
