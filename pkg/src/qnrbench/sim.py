"""Dense statevector simulation, sampling and Pauli-noise trajectories."""
from __future__ import annotations

import datetime as _dt
import json
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Sequence

import numpy as np

from .circuit import Circuit, FlipZero, Gate, H
from .errors import InvalidArgumentError, WidthLimitError

MAX_SIM_WIDTH = 26
NORM_TOL = 1e-10
EPOCH = "1970-01-01T00:00:00+00:00"

_SQRT_HALF = 1 / math.sqrt(2)


@lru_cache(maxsize=32)
def _indices(width: int) -> np.ndarray:
    idx = np.arange(1 << width, dtype=np.int64)
    idx.flags.writeable = False
    return idx


def _bit(width: int, q: int) -> np.ndarray:
    return (_indices(width) >> q) & 1


def _all_ones(width: int, qubits: Sequence[int]) -> np.ndarray:
    mask = sum(1 << q for q in qubits)
    return (_indices(width) & mask) == mask


def _gather(width: int, qubits: Sequence[int]) -> np.ndarray:
    """Sub-register value of every basis index, qubits[0] as the low bit."""
    idx = _indices(width)
    out = np.zeros_like(idx)
    for i, q in enumerate(qubits):
        out |= ((idx >> q) & 1) << i
    return out


def _apply_1q(amps: np.ndarray, m: np.ndarray, q: int, width: int) -> np.ndarray:
    lead = amps.shape[:-1]
    view = amps.reshape(*lead, 1 << (width - q - 1), 2, 1 << q)
    a0, a1 = view[..., 0, :], view[..., 1, :]
    out = np.empty_like(view)
    out[..., 0, :] = m[0, 0] * a0 + m[0, 1] * a1
    out[..., 1, :] = m[1, 0] * a0 + m[1, 1] * a1
    return out.reshape(amps.shape)


_HADAMARD = np.array([[_SQRT_HALF, _SQRT_HALF], [_SQRT_HALF, -_SQRT_HALF]], dtype=complex)


def apply_gate(amps: np.ndarray, g: Gate, width: int) -> np.ndarray:
    """Apply ``g`` along the last axis of ``amps`` (one or many states)."""
    kind = g.kind
    if kind == "H":
        return _apply_1q(amps, _HADAMARD, g.qubits[0], width)
    if kind == "X":
        return amps[..., _indices(width) ^ (1 << g.qubits[0])]
    if kind in ("CNOT", "Toffoli"):
        flip = _all_ones(width, g.controls).astype(np.int64) << g.qubits[0]
        return amps[..., _indices(width) ^ flip]
    if kind in ("CZ", "CCZ"):
        return np.where(_all_ones(width, g.qubits), -amps, amps)
    if kind == "Phase":
        on = _all_ones(width, g.controls + g.qubits)
        return np.where(on, amps * complex(math.cos(g.angle), math.sin(g.angle)), amps)
    if kind == "FlipZero":
        mask = sum(1 << q for q in g.qubits)
        return np.where((_indices(width) & mask) == 0, -amps, amps)
    if kind == "OracleIndicator":
        table = np.asarray(g.table, dtype=np.int64)
        flip = table[_gather(width, g.controls)] << g.qubits[0]
        return amps[..., _indices(width) ^ flip]
    if kind == "PermutationGate":
        table = np.asarray(g.table, dtype=np.int64)
        inv = np.empty_like(table)
        inv[table] = np.arange(len(table))
        src_sub = inv[_gather(width, g.qubits)]
        mask = sum(1 << q for q in g.qubits)
        src = _indices(width) & ~mask
        for i, q in enumerate(g.qubits):
            src = src | (((src_sub >> i) & 1) << q)
        return amps[..., src]
    raise InvalidArgumentError(f"cannot simulate gate kind {kind!r}")


_PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
_PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
_PAULIS = (None, _PAULI_X, _PAULI_Y, _PAULI_Z)
# Upper bound on amplitudes held at once by batched trajectories.
_BATCH_AMPLITUDES = 1 << 20


@dataclass
class StateVector:
    width: int
    amplitudes: np.ndarray

    @classmethod
    def zero(cls, width: int) -> StateVector:
        if width > MAX_SIM_WIDTH:
            raise WidthLimitError(f"statevector width {width} exceeds {MAX_SIM_WIDTH}")
        amps = np.zeros(1 << width, dtype=complex)
        amps[0] = 1.0
        return cls(width, amps)

    @property
    def mean(self) -> complex:
        return complex(self.amplitudes.mean())

    @property
    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.amplitudes) ** 2)))

    def apply(self, g: Gate) -> StateVector:
        return StateVector(self.width, apply_gate(self.amplitudes, g, self.width))

    def copy(self) -> StateVector:
        return StateVector(self.width, self.amplitudes.copy())


def run(c: Circuit, initial: StateVector | None = None) -> StateVector:
    """Exact final state of ``c`` starting from |0...0> (or ``initial``)."""
    if c.width > MAX_SIM_WIDTH:
        raise WidthLimitError(f"circuit width {c.width} exceeds {MAX_SIM_WIDTH}")
    state = StateVector.zero(c.width) if initial is None else initial.copy()
    amps = state.amplitudes
    for g in c.gates:
        amps = apply_gate(amps, g, c.width)
    return StateVector(c.width, amps)


def invert_about_mean(s: StateVector, qubits: Sequence[int]) -> StateVector:
    """alpha_x -> 2*mean - alpha_x over the register ``qubits``.

    Realised as H on the register, a zero-state phase flip, H again and a
    global factor -1.
    """
    amps = s.amplitudes
    for q in qubits:
        amps = apply_gate(amps, H(q), s.width)
    amps = apply_gate(amps, FlipZero(qubits), s.width)
    for q in qubits:
        amps = apply_gate(amps, H(q), s.width)
    return StateVector(s.width, -amps)


def probabilities(s: StateVector, qubits: Sequence[int] | None = None) -> np.ndarray:
    """Marginal outcome distribution over ``qubits`` (qubits[0] is the low bit)."""
    p = np.abs(s.amplitudes) ** 2
    if qubits is None or list(qubits) == list(range(s.width)):
        return p
    for q in qubits:
        if not 0 <= q < s.width:
            raise InvalidArgumentError(f"qubit {q} out of range for width {s.width}")
    if len(set(qubits)) != len(qubits):
        raise InvalidArgumentError("duplicate qubit in measured subset")
    return np.bincount(_gather(s.width, qubits), weights=p, minlength=1 << len(qubits))


def bitstring(value: int, nbits: int) -> str:
    return format(value, f"0{nbits}b")


@dataclass
class RunResult:
    """Measurement counts keyed by most-significant-first bitstrings."""

    counts: dict[str, int]
    shots: int
    prime: int | None = None
    device: str = "simulator"
    timestamp: str = EPOCH
    extra: dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        d = {
            "prime": self.prime,
            "shots": self.shots,
            "counts": dict(sorted(self.counts.items())),
            "device": self.device,
            "timestamp": self.timestamp,
        }
        d.update(self.extra)
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1)

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> RunResult:
        d = dict(d)
        counts = {str(k): int(v) for k, v in d.pop("counts").items()}
        shots = int(d.pop("shots", sum(counts.values())))
        prime = d.pop("prime", None)
        return cls(
            counts=counts,
            shots=shots,
            prime=None if prime is None else int(prime),
            device=str(d.pop("device", "unknown")),
            timestamp=str(d.pop("timestamp", EPOCH)),
            extra=d,
        )

    @classmethod
    def from_json(cls, text: str) -> RunResult:
        return cls.from_dict(json.loads(text))


def now_iso() -> str:
    return _dt.datetime.now(_dt.timezone.utc).replace(microsecond=0).isoformat()


def _counts_from_outcomes(outcomes: np.ndarray, nbits: int) -> dict[str, int]:
    values, freq = np.unique(outcomes, return_counts=True)
    return {bitstring(int(v), nbits): int(f) for v, f in zip(values, freq)}


def sample(
    s: StateVector,
    shots: int,
    seed: int | None = None,
    qubits: Sequence[int] | None = None,
    prime: int | None = None,
) -> RunResult:
    """Multinomial draw of ``shots`` measurements; deterministic for a fixed seed."""
    if shots < 1:
        raise InvalidArgumentError("shots must be at least 1")
    qubits = list(range(s.width)) if qubits is None else list(qubits)
    p = probabilities(s, qubits)
    p = np.clip(p, 0.0, None)
    p /= p.sum()
    rng = np.random.default_rng(seed)
    drawn = rng.multinomial(shots, p)
    counts = {bitstring(int(v), len(qubits)): int(drawn[v]) for v in np.flatnonzero(drawn)}
    return RunResult(counts=counts, shots=shots, prime=prime)


@dataclass(frozen=True)
class NoiseModel:
    """Stochastic Pauli noise.

    ``depolarizing``: after every gate, each qubit it touches suffers X, Y or
    Z with probability epsilon/3 each. ``bitflip_readout``: every measured
    bit is flipped with probability epsilon.
    """

    kind: str = "none"
    epsilon: float = 0.0

    def __post_init__(self):
        if self.kind not in ("none", "depolarizing", "bitflip_readout"):
            raise InvalidArgumentError(f"unknown noise kind {self.kind!r}")
        if not 0.0 <= self.epsilon <= 1.0:
            raise InvalidArgumentError(f"epsilon must lie in [0, 1], got {self.epsilon}")

    @classmethod
    def parse(cls, text: str) -> NoiseModel:
        """Parse ``depolarizing:EPS`` / ``readout:EPS`` / ``none``."""
        if text == "none":
            return cls()
        name, _, eps = text.partition(":")
        kinds = {"depolarizing": "depolarizing", "readout": "bitflip_readout",
                 "bitflip_readout": "bitflip_readout"}
        if name not in kinds or not eps:
            raise InvalidArgumentError(f"bad noise spec {text!r}; expected depolarizing:EPS or readout:EPS")
        try:
            value = float(eps)
        except ValueError:
            raise InvalidArgumentError(f"bad noise epsilon {eps!r}") from None
        return cls(kinds[name], value)


def run_noisy(
    c: Circuit,
    noise: NoiseModel,
    shots: int,
    seed: int | None = None,
    qubits: Sequence[int] | None = None,
) -> RunResult:
    """Per-shot trajectory simulation under ``noise``.

    Error patterns are drawn for every shot up front; shots sharing a
    pattern share one pure-state simulation, which keeps the common
    low-noise case cheap without changing the sampled distribution.
    """
    if shots < 1:
        raise InvalidArgumentError("shots must be at least 1")
    if c.width > MAX_SIM_WIDTH:
        raise WidthLimitError(f"circuit width {c.width} exceeds {MAX_SIM_WIDTH}")
    qubits = c.register_qubits if qubits is None else list(qubits)
    nbits = len(qubits)
    rng = np.random.default_rng(seed)
    prime = None if c.instance is None else c.instance.p

    slots = [(i, q) for i, g in enumerate(c.gates) for q in g.all_qubits]
    if noise.kind == "depolarizing" and noise.epsilon > 0 and slots:
        u = rng.random((shots, len(slots)))
        which = rng.integers(1, 4, size=(shots, len(slots)))
        patterns = np.where(u < noise.epsilon, which, 0).astype(np.int8)
    else:
        patterns = np.zeros((shots, 0), dtype=np.int8)

    uniq, inverse, multiplicity = np.unique(patterns, axis=0, return_inverse=True, return_counts=True)
    inverse = inverse.reshape(-1)
    outcomes = np.empty(shots, dtype=np.int64)
    chunk = max(1, _BATCH_AMPLITUDES >> c.width)
    for start in range(0, len(uniq), chunk):
        block = _trajectories(c, slots, uniq[start : start + chunk])
        for offset, amps in enumerate(block):
            k = start + offset
            probs = probabilities(StateVector(c.width, amps), qubits)
            probs = np.clip(probs, 0.0, None)
            probs /= probs.sum()
            outcomes[inverse == k] = rng.choice(len(probs), size=int(multiplicity[k]), p=probs)

    if noise.kind == "bitflip_readout" and noise.epsilon > 0:
        flips = rng.random((shots, nbits)) < noise.epsilon
        outcomes ^= (flips.astype(np.int64) << np.arange(nbits)).sum(axis=1)

    return RunResult(counts=_counts_from_outcomes(outcomes, nbits), shots=shots, prime=prime,
                     extra={"noise": {"kind": noise.kind, "epsilon": noise.epsilon}})


def _trajectories(c: Circuit, slots, patterns: np.ndarray) -> np.ndarray:
    """Final amplitudes for a batch of error patterns, one row per pattern."""
    amps = np.zeros((len(patterns), 1 << c.width), dtype=complex)
    amps[:, 0] = 1.0
    by_gate: dict[int, list[int]] = {}
    if patterns.shape[1]:
        for j, (gi, _) in enumerate(slots):
            by_gate.setdefault(gi, []).append(j)
    for gi, g in enumerate(c.gates):
        amps = apply_gate(amps, g, c.width)
        for j in by_gate.get(gi, ()):
            column = patterns[:, j]
            q = slots[j][1]
            for code in (1, 2, 3):
                rows = np.flatnonzero(column == code)
                if rows.size:
                    amps[rows] = _apply_1q(amps[rows], _PAULIS[code], q, c.width)
    return amps
