"""Symbol sequence handling: FASTA I/O, synthetic generators, simulators.

Sequences are stored as integer state ids against an explicit alphabet.
Generators cover the three synthetic designs used throughout: an i.i.d.
uniform baseline, a letter placed deterministically every period-th
position, and the uniform baseline with periodic stretches embedded in
selected intervals.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .model import SemiMarkovModel, StateSpace
from .nhmodel import NHSemiMarkovModel, lift_homogeneous

__all__ = [
    "SymbolSequence",
    "GeneratorSpec",
    "read_sequence",
    "write_fasta",
    "generate",
    "simulate_smc",
    "mc_return_probability",
    "RNG_NAME",
    "GENERATOR_KINDS",
    "UNKNOWN_POLICIES",
]

RNG_NAME = "numpy-pcg64"

GENERATOR_KINDS = ("uniform", "periodic", "embedded")
UNKNOWN_POLICIES = ("skip-unknown", "error")


@dataclass(frozen=True)
class SymbolSequence:
    """Immutable symbol sequence encoded as state indices."""

    states: StateSpace
    symbols: np.ndarray
    name: str = ""

    def __post_init__(self):
        arr = np.ascontiguousarray(self.symbols, dtype=np.int64)
        if arr.ndim != 1:
            raise ValueError("symbol array must be one dimensional")
        if arr.size and (arr.min() < 0 or arr.max() >= self.states.size):
            raise ValueError("symbol indices must lie in 0..%d" % (self.states.size - 1))
        arr.setflags(write=False)
        object.__setattr__(self, "symbols", arr)

    @classmethod
    def from_string(cls, text: str, states: StateSpace | None = None,
                    policy: str = "skip-unknown", name: str = "") -> "SymbolSequence":
        """Build from raw text, upper-casing and applying the unknown policy."""
        if states is None:
            states = StateSpace.dna()
        if policy not in UNKNOWN_POLICIES:
            raise ValueError("policy must be one of %r, got %r" % (UNKNOWN_POLICIES, policy))
        lookup = {sym: i for i, sym in enumerate(states.symbols)}
        out = []
        for ch in text:
            idx = lookup.get(ch.upper())
            if idx is None:
                if policy == "error":
                    raise ValueError("unknown symbol %r in sequence %r" % (ch, name or "<input>"))
                continue
            out.append(idx)
        return cls(states, np.asarray(out, dtype=np.int64), name=name)

    def __len__(self) -> int:
        return int(self.symbols.size)

    def to_string(self) -> str:
        return "".join(self.states.symbols[i] for i in self.symbols)


def _parse_fasta(handle, record: int) -> tuple[str, str]:
    header = None
    chunks: list[str] = []
    n_seen = -1
    for raw in handle:
        line = raw.strip()
        if not line:
            continue
        if line.startswith(">"):
            n_seen += 1
            if n_seen > record:
                break
            if n_seen == record:
                header = line[1:].strip()
            continue
        if n_seen == record:
            chunks.append(line)
    if header is None:
        raise ValueError("FASTA record %d not found in input" % record)
    return header, "".join(chunks)


def read_sequence(source, fmt: str = "fasta", states: StateSpace | None = None,
                  policy: str = "skip-unknown", record: int = 0) -> SymbolSequence:
    """Read a sequence from a path or open text handle.

    fmt "fasta" extracts the record-th entry; fmt "plain" treats the whole
    input (minus whitespace) as one sequence.  Unknown characters are
    dropped or rejected according to policy.
    """
    if fmt not in ("fasta", "plain"):
        raise ValueError("format must be 'fasta' or 'plain', got %r" % fmt)
    if hasattr(source, "read"):
        handle = source
        close = False
    else:
        handle = open(Path(source), "r", encoding="utf-8")
        close = True
    try:
        if fmt == "fasta":
            name, text = _parse_fasta(handle, record)
        else:
            name = getattr(source, "name", None) or str(source)
            text = "".join(line.strip() for line in handle)
    finally:
        if close:
            handle.close()
    return SymbolSequence.from_string(text, states=states, policy=policy, name=name)


def write_fasta(seq: SymbolSequence, target, header: str | None = None,
                width: int = 70) -> None:
    """Write one FASTA record to a path or open text handle."""
    if width < 1:
        raise ValueError("line width must be >= 1, got %d" % width)
    text = seq.to_string()
    if hasattr(target, "write"):
        handle = target
        close = False
    else:
        handle = open(Path(target), "w", encoding="utf-8")
        close = True
    try:
        handle.write(">%s\n" % (header if header is not None else (seq.name or "sequence")))
        for start in range(0, len(text), width):
            handle.write(text[start:start + width] + "\n")
        if not text:
            handle.write("\n")
    finally:
        if close:
            handle.close()


@dataclass(frozen=True)
class GeneratorSpec:
    """Recipe for a synthetic sequence.

    kind "uniform" draws i.i.d. uniform symbols.  kind "periodic" does the
    same but overwrites every period-th position (phase 0) with letter.
    kind "embedded" plants that periodic pattern only inside the given
    1-indexed inclusive intervals, leaving the rest uniform.
    """

    kind: str
    length: int
    seed: int = 0
    period: int = 3
    letter: str = "A"
    intervals: tuple[tuple[int, int], ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.kind not in GENERATOR_KINDS:
            raise ValueError("kind must be one of %r, got %r" % (GENERATOR_KINDS, self.kind))
        if self.length < 0:
            raise ValueError("length must be >= 0, got %d" % self.length)
        if self.period < 1:
            raise ValueError("period must be >= 1, got %d" % self.period)
        ivs = tuple((int(a), int(b)) for a, b in self.intervals)
        for a, b in ivs:
            if not 1 <= a <= b:
                raise ValueError("interval bounds must satisfy 1 <= start <= end, got (%d, %d)" % (a, b))
            if b > self.length:
                raise ValueError("interval (%d, %d) exceeds sequence length %d" % (a, b, self.length))
        object.__setattr__(self, "intervals", ivs)

    def metadata(self) -> dict:
        meta = {"kind": self.kind, "length": self.length, "seed": self.seed,
                "rng": RNG_NAME}
        if self.kind in ("periodic", "embedded"):
            meta["period"] = self.period
            meta["letter"] = self.letter
        if self.kind == "embedded":
            meta["intervals"] = ",".join("%d-%d" % iv for iv in self.intervals)
        return meta

    def header(self) -> str:
        return "synthetic " + " ".join("%s=%s" % kv for kv in self.metadata().items())


def generate(spec: GeneratorSpec, states: StateSpace | None = None) -> SymbolSequence:
    """Draw a synthetic sequence according to spec (reproducible by seed)."""
    if states is None:
        states = StateSpace.dna()
    rng = np.random.default_rng(spec.seed)
    idx = rng.integers(0, states.size, size=spec.length)
    if spec.kind != "uniform":
        letter_id = states.index(spec.letter)
        if spec.kind == "periodic":
            idx[::spec.period] = letter_id
        else:
            for a, b in spec.intervals:
                # substitution grid re-anchors at each interval start
                idx[a - 1:b:spec.period] = letter_id
    return SymbolSequence(states, idx, name=spec.header())


def _as_nh(model) -> NHSemiMarkovModel:
    if isinstance(model, SemiMarkovModel):
        return lift_homogeneous(model, 1)
    if isinstance(model, NHSemiMarkovModel):
        return model
    raise TypeError("expected a SemiMarkovModel or NHSemiMarkovModel, got %r" % type(model))


def simulate_smc(model, length: int, seed, start_state: int | None = None,
                 name: str = "") -> SymbolSequence:
    """Sample a symbol sequence of the given length from a model.

    The chain starts at position 0 (coding position 0 for non-homogeneous
    models) in start_state, or in a uniformly drawn state.  Runs are laid
    down until the target length is reached; the final run is truncated.
    """
    if length < 0:
        raise ValueError("length must be >= 0, got %d" % length)
    nh = _as_nh(model)
    rng = np.random.default_rng(seed)
    n = nh.n_states
    p_cdf, h_cdf = _sampling_cdfs(nh)
    if start_state is None:
        state = int(rng.integers(0, n))
    else:
        if not 0 <= start_state < n:
            raise ValueError("start_state must be in 0..%d, got %r" % (n - 1, start_state))
        state = int(start_state)
    out = np.empty(length, dtype=np.int64)
    pos = 0
    while pos < length:
        k = pos % nh.s
        nxt = int(np.searchsorted(p_cdf[k, state], rng.random(), side="right"))
        dur = 1 + int(np.searchsorted(h_cdf[state, nxt], rng.random(), side="right"))
        end = min(pos + dur, length)
        out[pos:end] = state
        pos = pos + dur
        state = nxt
    return SymbolSequence(nh.states, out, name=name)


def _sampling_cdfs(nh: NHSemiMarkovModel) -> tuple[np.ndarray, np.ndarray]:
    """Cumulative tables for inverse-cdf sampling; last entry pinned to 1."""
    p_cdf = np.cumsum(nh.Pk, axis=2)                          # (s, n, n)
    h_cdf = np.cumsum(np.transpose(nh.H, (1, 2, 0)), axis=2)  # (n, n, m_max)
    p_cdf[..., -1] = 1.0
    h_cdf[..., -1] = 1.0
    return p_cdf, h_cdf


def mc_return_probability(model, d: int, trials: int = 200_000, seed=0) -> tuple[np.ndarray, np.ndarray]:
    """Monte Carlo estimate of the exact-entry return probability.

    For each start state, simulates trials independent trajectories that
    enter the state at position 0 and records whether position d shows the
    same state again.  Returns (estimates, standard errors), both shaped
    (n_states,).  Serves as an independent check on the analytic kernels.
    """
    if d < 1:
        raise ValueError("lag d must be >= 1, got %d" % d)
    if trials < 1:
        raise ValueError("trials must be >= 1, got %d" % trials)
    nh = _as_nh(model)
    rng = np.random.default_rng(seed)
    n, s = nh.n_states, nh.s
    p_cdf, h_cdf = _sampling_cdfs(nh)
    est = np.empty(n)
    se = np.empty(n)
    for i in range(n):
        cur = np.full(trials, i, dtype=np.int64)
        pos = np.zeros(trials, dtype=np.int64)
        final = np.full(trials, -1, dtype=np.int64)
        active = np.arange(trials)
        while active.size:
            k = pos[active] % s
            u = rng.random(active.size)
            nxt = (u[:, None] > p_cdf[k, cur[active]]).sum(axis=1)
            u = rng.random(active.size)
            dur = 1 + (u[:, None] > h_cdf[cur[active], nxt]).sum(axis=1)
            newpos = pos[active] + dur
            crossed = newpos > d
            final[active[crossed]] = cur[active[crossed]]
            keep = ~crossed
            pos[active[keep]] = newpos[keep]
            cur[active[keep]] = nxt[keep]
            active = active[keep]
        hits = (final == i).mean()
        est[i] = hits
        se[i] = np.sqrt(hits * (1.0 - hits) / trials)
    return est, se
