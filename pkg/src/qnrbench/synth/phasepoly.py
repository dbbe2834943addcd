"""Phase-polynomial networks: diagonal unitaries from CNOTs and phase gates.

A diagonal gate diag(e^{i phi(y)}) on m qubits equals, up to global phase,
a product of rotations Phase(a_s) applied to the parity y.s for every
nonzero mask s, with a_s = -2 * (Walsh coefficient of phi at s). The parity
of each mask is formed on the wire of its highest set bit by walking the
lower bits in Gray-code order, one CNOT per step.
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from ..circuit import CNOT, Circuit, Gate, Phase
from ..errors import InvalidArgumentError

ANGLE_EPS = 1e-12
GROVER_WIDTHS = range(2, 9)


def gray(k: int) -> int:
    return k ^ (k >> 1)


def parity(v: int) -> int:
    return bin(v).count("1") & 1


@dataclass(frozen=True)
class GroverGatePlan:
    """Gray-ordered parity schedule that flips the sign of |0...0>.

    ``cnot_schedule[i]`` lists the (control, target) CNOTs applied right
    before the phase on ``combinations[i]``; ``restore`` returns every wire
    to its input value. Each mask's parity lives on its highest set bit.
    """

    width: int
    phase_per_combination: float
    combinations: tuple[int, ...]
    cnot_schedule: tuple[tuple[tuple[int, int], ...], ...]
    restore: tuple[tuple[int, int], ...]

    @classmethod
    def build(cls, width: int) -> GroverGatePlan:
        if width < 1:
            raise InvalidArgumentError(f"width must be positive, got {width}")
        combos, schedule = [], []
        carry: list[tuple[int, int]] = []
        for _, entries, restore in _gray_blocks(width):
            for i, (mask, cnots) in enumerate(entries):
                combos.append(mask)
                schedule.append(tuple(carry + cnots) if i == 0 else tuple(cnots))
            carry = list(restore)
        return cls(width, math.pi / 2 ** (width - 1), tuple(combos), tuple(schedule), tuple(carry))

    def wire_of(self, mask: int) -> int:
        return mask.bit_length() - 1


def _gray_blocks(width: int):
    """Per top wire: (top, [(mask, CNOTs before its phase)], restoring CNOTs)."""
    blocks = []
    for top in range(width):
        entries = []
        for k in range(1 << top):
            cnots = []
            if k:
                flipped = (gray(k) ^ gray(k - 1)).bit_length() - 1
                cnots.append((flipped, top))
            entries.append(((1 << top) | gray(k), cnots))
        # gray(2^top - 1) leaves only bit top-1 set.
        restore = [(top - 1, top)] if top else []
        blocks.append((top, entries, restore))
    return blocks


def walsh_phases(phi: np.ndarray) -> np.ndarray:
    """Per-mask rotation angles a_s reproducing diag(e^{i phi}) up to global phase."""
    m = int(phi.size).bit_length() - 1
    if phi.size != 1 << m:
        raise InvalidArgumentError("phase table length must be a power of two")
    w = np.asarray(phi, dtype=float).copy()
    h = 1
    while h < w.size:
        w = w.reshape(-1, 2, h)
        w = np.stack((w[:, 0] + w[:, 1], w[:, 0] - w[:, 1]), axis=1).reshape(-1)
        h *= 2
    return -2.0 * w / w.size


def phase_network(qubits: Sequence[int], angles: dict[int, float] | np.ndarray) -> list[Gate]:
    """CNOT + Phase gates applying ``angles[s]`` to the parity of each mask s.

    Mask bit i refers to ``qubits[i]``. Blocks whose angles are all zero are
    skipped entirely.
    """
    if isinstance(angles, np.ndarray):
        angles = {s: float(angles[s]) for s in range(1, angles.size)}
    gates: list[Gate] = []
    for top, entries, restore in _gray_blocks(len(qubits)):
        block_angles = [_wrap(angles.get(mask, 0.0)) for mask, _ in entries]
        if all(abs(a) < ANGLE_EPS for a in block_angles):
            continue
        for (mask, cnots), a in zip(entries, block_angles):
            gates += [CNOT(qubits[c], qubits[t]) for c, t in cnots]
            if abs(a) >= ANGLE_EPS:
                gates.append(Phase(qubits[top], a))
        gates += [CNOT(qubits[c], qubits[t]) for c, t in restore]
    return gates


def _wrap(a: float) -> float:
    """Reduce an angle to (-pi, pi]."""
    r = math.remainder(a, 2 * math.pi)
    return math.pi if math.isclose(r, -math.pi, abs_tol=ANGLE_EPS) else r


def diagonal_gates(qubits: Sequence[int], phase_fn: Callable[[np.ndarray], np.ndarray]) -> list[Gate]:
    """Lower diag(e^{i phase_fn(y)}) over ``qubits`` (qubits[0] low) to CNOT + Phase."""
    y = np.arange(1 << len(qubits))
    return phase_network(qubits, walsh_phases(np.asarray(phase_fn(y), dtype=float)))


def controlled_phase_gates(qubits: Sequence[int], angle: float) -> list[Gate]:
    """Phase ``angle`` on the all-ones state of ``qubits``."""
    full = (1 << len(qubits)) - 1
    return diagonal_gates(qubits, lambda y: angle * (y == full))


def _nn_greedy_cnots(width: int) -> list[tuple[int, int] | int]:
    """Nearest-neighbour schedule covering every nonzero parity, for width <= 4.

    Greedy: breadth-first search over linear reversible states (tuples of
    wire masks) to the closest state exposing an uncovered mask, place a
    phase there, repeat, then take the shortest path back to the identity.
    Returns CNOT pairs interleaved with wire indices marking phase slots.
    """
    moves = [(i, i + 1) for i in range(width - 1)] + [(i + 1, i) for i in range(width - 1)]
    identity = tuple(1 << i for i in range(width))

    def step(state, move):
        c, t = move
        s = list(state)
        s[t] ^= s[c]
        return tuple(s)

    def shortest(start, done):
        prev = {start: None}
        queue = deque([start])
        while queue:
            s = queue.popleft()
            if done(s):
                path = []
                while prev[s] is not None:
                    s, mv = prev[s]
                    path.append(mv)
                return path[::-1]
            for mv in moves:
                nxt = step(s, mv)
                if nxt not in prev:
                    prev[nxt] = (s, mv)
                    queue.append(nxt)
        raise AssertionError("linear reversible group is connected")

    out: list[tuple[int, int] | int] = []
    covered: set[int] = set()
    state = identity
    while True:
        for wire, mask in enumerate(state):
            if mask not in covered:
                covered.add(mask)
                out.append(wire)
        if len(covered) == (1 << width) - 1:
            break
        for mv in shortest(state, lambda s: any(v not in covered for v in s)):
            state = step(state, mv)
            out.append(mv)
    for mv in shortest(state, lambda s: s == identity):
        out.append(mv)
    return out


NN_GREEDY_MAX_WIDTH = 4


def build_grover_gate(width: int, nearest_neighbor: bool = False) -> Circuit:
    """CNOT + Phase(pi/2^(width-1)) circuit equal to FlipZero(width) up to global phase.

    Every nonzero parity x.s receives the same rotation; the accumulated
    phase is pi on every nonzero input and 0 on |0...0>, i.e. -FlipZero.
    """
    if width not in GROVER_WIDTHS:
        raise InvalidArgumentError(f"Grover gate width must be in 2..8, got {width}")
    plan = GroverGatePlan.build(width)
    angle = plan.phase_per_combination
    gates: list[Gate] = []
    if nearest_neighbor and width <= NN_GREEDY_MAX_WIDTH:
        for item in _nn_greedy_cnots(width):
            gates.append(Phase(item, angle) if isinstance(item, int) else CNOT(*item))
        provenance = f"grover gate width {width}, nearest-neighbour greedy parity walk"
    else:
        for mask, cnots in zip(plan.combinations, plan.cnot_schedule):
            gates += [CNOT(c, t) for c, t in cnots]
            gates.append(Phase(plan.wire_of(mask), angle))
        gates += [CNOT(c, t) for c, t in plan.restore]
        provenance = f"grover gate width {width}, Gray-code parity walk"
    circuit = Circuit(width, tuple(gates), provenance=provenance)
    if nearest_neighbor and width > NN_GREEDY_MAX_WIDTH:
        from .lowering import route_nearest_neighbor

        circuit = route_nearest_neighbor(circuit)
        circuit = Circuit(width, circuit.gates, provenance=provenance + ", swap-routed")
    return circuit
