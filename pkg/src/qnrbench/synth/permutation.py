"""Search for a reversible {X, CNOT, Toffoli} circuit computing a balanced
boolean function in place on one output wire."""
from __future__ import annotations

import itertools
import math
import os
from dataclasses import dataclass
from typing import Sequence

from ..circuit import CNOT, Circuit, Gate, Toffoli, X
from ..errors import InvalidArgumentError, SearchBudgetExceeded

DEFAULT_SEARCH_NODE_LIMIT = 10**7
DEFAULT_MAX_GATES = 12


def search_node_limit() -> int:
    """Node budget: ``QNR_SEARCH_LIMIT`` from the environment, else the default."""
    raw = os.environ.get("QNR_SEARCH_LIMIT")
    if raw:
        try:
            return int(raw)
        except ValueError:
            raise InvalidArgumentError(f"QNR_SEARCH_LIMIT must be an integer, got {raw!r}") from None
    return DEFAULT_SEARCH_NODE_LIMIT


@dataclass(frozen=True)
class PermutationSearchResult:
    circuit: Circuit
    toffoli_count: int
    cnot_count: int
    coordinate_wire: int
    nodes_expanded: int = 0

    def permutation(self) -> list[int]:
        return circuit_permutation(self.circuit)

    def inverse_circuit(self) -> Circuit:
        return self.circuit.inverse()


def circuit_permutation(c: Circuit) -> list[int]:
    """Basis permutation of an {X, CNOT, Toffoli} circuit by classical evaluation."""
    perm = []
    for x in range(1 << c.width):
        for g in c.gates:
            if g.kind not in ("X", "CNOT", "Toffoli"):
                raise InvalidArgumentError(f"not a classical reversible gate: {g.kind}")
            if all((x >> q) & 1 for q in g.controls):
                x ^= 1 << g.qubits[0]
        perm.append(x)
    return perm


def algebraic_degree(table: Sequence[int]) -> int:
    """Degree of the algebraic normal form of a truth table."""
    coeffs = [int(bool(v)) for v in table]
    n = len(coeffs).bit_length() - 1
    for i in range(n):
        for x in range(len(coeffs)):
            if x >> i & 1:
                coeffs[x] ^= coeffs[x ^ (1 << i)]
    return max((bin(m).count("1") for m, c in enumerate(coeffs) if c), default=0)


# Gate encoding used inside the search: (kind_rank, controls, target).
_X, _CNOT, _TOF = 0, 1, 2


def _gate_alphabet(width: int):
    alphabet = [(_X, (), t) for t in range(width)]
    alphabet += [(_CNOT, (c,), t) for c in range(width) for t in range(width) if c != t]
    alphabet += [
        (_TOF, pair, t)
        for pair in itertools.combinations(range(width), 2)
        for t in range(width)
        if t not in pair
    ]
    return alphabet


def _commute(g, h) -> bool:
    # All three kinds XOR into their target, so they commute unless one
    # gate's target is a control of the other.
    return g[2] not in h[1] and h[2] not in g[1]


def _in_affine_span(funcs: Sequence[int], target: int, ones: int) -> bool:
    basis: list[int] = []
    for v in list(funcs) + [ones]:
        for b in basis:
            v = min(v, v ^ b)
        if v:
            basis.append(v)
    for b in basis:
        target = min(target, target ^ b)
    return target == 0


def synthesize_indicator_permutation(
    table: Sequence[int],
    coordinate_wire: int = 1,
    fixed_wire: int = 0,
    node_limit: int | None = None,
    max_gates: int = DEFAULT_MAX_GATES,
) -> PermutationSearchResult:
    """Find the cheapest {X, CNOT, Toffoli} circuit whose ``coordinate_wire``
    output equals ``table`` while ``fixed_wire`` passes through unchanged.

    Cost is (Toffoli count, total gates), searched by iterative deepening;
    among equal-cost circuits the lexicographically smallest gate sequence
    wins (X < CNOT < Toffoli, then by qubit indices). Adjacent commuting
    gates are only tried in increasing order, which cannot remove the
    lexicographic minimum.
    """
    size = len(table)
    width = size.bit_length() - 1
    if size != 1 << width or width < 2:
        raise InvalidArgumentError("table length must be a power of two >= 4")
    if sum(bool(v) for v in table) != size // 2:
        raise InvalidArgumentError("table must be balanced to be a permutation coordinate")
    if not (0 <= coordinate_wire < width and 0 <= fixed_wire < width) or coordinate_wire == fixed_wire:
        raise InvalidArgumentError("coordinate and fixed wires must be distinct and in range")
    limit = search_node_limit() if node_limit is None else node_limit

    ones = (1 << size) - 1
    start = tuple(sum(1 << x for x in range(size) if x >> i & 1) for i in range(width))
    goal = sum(1 << x for x, v in enumerate(table) if v)
    alphabet = _gate_alphabet(width)
    nodes = 0

    def dfs(state, remaining, toffolis_left, path):
        nonlocal nodes
        nodes += 1
        if nodes > limit:
            raise SearchBudgetExceeded(f"indicator permutation search exceeded {limit} nodes")
        if remaining == 0:
            return toffolis_left == 0 and state[coordinate_wire] == goal and state[fixed_wire] == start[fixed_wire]
        if toffolis_left == 0 and not (
            _in_affine_span(state, goal, ones) and _in_affine_span(state, start[fixed_wire], ones)
        ):
            return False
        last = alphabet[path[-1]] if path else None
        for gi, g in enumerate(alphabet):
            if path and (gi == path[-1] or (gi < path[-1] and _commute(g, last))):
                continue
            is_tof = g[0] == _TOF
            if is_tof and not toffolis_left:
                continue
            if not is_tof and remaining - 1 < toffolis_left:
                continue
            kind, controls, t = g
            s = list(state)
            if kind == _X:
                s[t] ^= ones
            elif kind == _CNOT:
                s[t] ^= s[controls[0]]
            else:
                s[t] ^= s[controls[0]] & s[controls[1]]
            path.append(gi)
            if dfs(tuple(s), remaining - 1, toffolis_left - is_tof, path):
                return True
            path.pop()
        return False

    degree = algebraic_degree(table)
    min_toffolis = 0 if degree <= 1 else math.ceil(math.log2(degree))
    for toffolis in range(min_toffolis, max_gates + 1):
        for length in range(toffolis, max_gates + 1):
            path: list[int] = []
            if dfs(start, length, toffolis, path):
                gates = [_to_gate(alphabet[i]) for i in path]
                circuit = Circuit(width, tuple(gates), provenance="indicator permutation search")
                return PermutationSearchResult(
                    circuit=circuit,
                    toffoli_count=toffolis,
                    cnot_count=sum(g.kind == "CNOT" for g in gates),
                    coordinate_wire=coordinate_wire,
                    nodes_expanded=nodes,
                )
    raise SearchBudgetExceeded(f"no circuit with at most {max_gates} gates")


def _to_gate(code) -> Gate:
    kind, controls, t = code
    if kind == _X:
        return X(t)
    if kind == _CNOT:
        return CNOT(controls[0], t)
    return Toffoli(controls[0], controls[1], t)
