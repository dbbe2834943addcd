"""Lowering to {H, X, Phase, CNOT, CZ} and nearest-neighbour routing on a line."""
from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from ..circuit import CNOT, CZ, Circuit, Gate, H, X
from ..errors import UnsupportedGateError
from .phasepoly import NN_GREEDY_MAX_WIDTH, build_grover_gate, controlled_phase_gates, diagonal_gates

LOWERED_KINDS = frozenset({"H", "X", "Phase", "CNOT", "CZ"})
# Truth-table gates wider than this are refused: the parity network is
# exponential in the number of inputs.
ORACLE_INPUT_LIMIT = 10
PERMUTATION_QUBIT_LIMIT = 6


def is_lowered(c: Circuit, nearest_neighbor: bool = False) -> bool:
    for g in c.gates:
        if g.kind not in LOWERED_KINDS or (g.kind == "Phase" and g.controls):
            return False
        if nearest_neighbor and len(g.all_qubits) == 2:
            a, b = g.all_qubits
            if abs(a - b) != 1:
                return False
    return True


def toffoli_gates(c1: int, c2: int, target: int) -> list[Gate]:
    """Textbook H / 6-CNOT / T network for a Toffoli."""
    return [H(target), *controlled_phase_gates((c1, c2, target), math.pi), H(target)]


def mct_gates(controls: Sequence[int], target: int) -> list[Gate]:
    """Multi-controlled X with positive controls."""
    if not controls:
        return [X(target)]
    if len(controls) == 1:
        return [CNOT(controls[0], target)]
    return [H(target), *controlled_phase_gates((*controls, target), math.pi), H(target)]


def transformation_synthesis(perm: Sequence[int]) -> list[tuple[tuple[int, ...], int]]:
    """Basic transformation-based reversible synthesis.

    Returns (controls, target) multi-controlled X gates in application order;
    bit indices refer to positions within the permuted register.
    """
    f = list(perm)
    n = len(f).bit_length() - 1
    applied = []  # gates applied on the output side, first to last

    def push(controls_mask, j):
        applied.append((tuple(b for b in range(n) if controls_mask >> b & 1), j))
        for k, v in enumerate(f):
            if v & controls_mask == controls_mask:
                f[k] = v ^ (1 << j)

    for i in range(len(f)):
        y = f[i]
        if y == i:
            continue
        for j in range(n):
            if (i >> j & 1) and not (y >> j & 1):
                push(y, j)
                y = f[i]
        for j in range(n):
            if (y >> j & 1) and not (i >> j & 1):
                push(i, j)
                y = f[i]
    return applied[::-1]


def _lower_gate(g: Gate, width: int, nearest_neighbor: bool) -> list[Gate]:
    kind = g.kind
    if kind in ("H", "X", "CNOT", "CZ"):
        return [g]
    if kind == "Phase":
        if not g.controls:
            return [g]
        return controlled_phase_gates((*g.controls, g.qubits[0]), g.angle)
    if kind == "Toffoli":
        return toffoli_gates(g.controls[0], g.controls[1], g.qubits[0])
    if kind == "CCZ":
        return controlled_phase_gates(g.qubits, math.pi)
    if kind == "FlipZero":
        qs = list(g.qubits)
        if len(qs) == 1:
            # diag(-1, 1) = X Z X up to global phase.
            return [X(qs[0]), *controlled_phase_gates(qs, math.pi), X(qs[0])]
        contiguous = qs == list(range(qs[0], qs[0] + len(qs)))
        if 2 <= len(qs) <= 8 and (not nearest_neighbor or (contiguous and len(qs) <= NN_GREEDY_MAX_WIDTH)):
            grover = build_grover_gate(len(qs), nearest_neighbor=nearest_neighbor)
            return [_remap(h, qs) for h in grover.gates]
        return diagonal_gates(qs, lambda y: math.pi * (y != 0))
    if kind == "OracleIndicator":
        if len(g.controls) > ORACLE_INPUT_LIMIT:
            raise UnsupportedGateError(
                f"OracleIndicator with {len(g.controls)} inputs exceeds the lowering limit {ORACLE_INPUT_LIMIT}"
            )
        table = np.asarray(g.table, dtype=float)
        size = len(table)
        anc = g.qubits[0]
        qs = (*g.controls, anc)
        # Phase pi * anc * f(x) between two Hadamards on the ancilla.
        return [H(anc), *diagonal_gates(qs, lambda y: math.pi * (y >= size) * table[y % size]), H(anc)]
    if kind == "PermutationGate":
        if len(g.qubits) > PERMUTATION_QUBIT_LIMIT:
            raise UnsupportedGateError(
                f"PermutationGate on {len(g.qubits)} qubits exceeds the lowering limit {PERMUTATION_QUBIT_LIMIT}"
            )
        out = []
        for controls, target in transformation_synthesis(g.table):
            out += mct_gates([g.qubits[c] for c in controls], g.qubits[target])
        return out
    raise UnsupportedGateError(f"cannot lower gate kind {kind!r}")


def _remap(g: Gate, qubits: Sequence[int]) -> Gate:
    return Gate(g.kind, tuple(qubits[q] for q in g.qubits), tuple(qubits[q] for q in g.controls), g.angle, g.table)


def _swap(a: int, b: int) -> list[Gate]:
    return [CNOT(a, b), CNOT(b, a), CNOT(a, b)]


def route_nearest_neighbor(c: Circuit) -> Circuit:
    """Make every two-qubit gate act on adjacent line positions.

    A distant gate is bracketed by SWAPs (3 CNOTs each) that walk its lower
    qubit up next to the other one and back again.
    """
    out: list[Gate] = []
    for g in c.gates:
        qs = g.all_qubits
        if len(qs) > 2 or (g.kind == "Phase" and g.controls):
            raise UnsupportedGateError(f"route only lowered circuits; found {g.kind} on {list(qs)}")
        if len(qs) < 2 or abs(qs[0] - qs[1]) == 1:
            out.append(g)
            continue
        lo, hi = sorted(qs)
        path = []
        for q in range(lo, hi - 1):
            path += _swap(q, q + 1)
        moved = {lo: hi - 1}
        out += path
        out.append(Gate(g.kind, tuple(moved.get(q, q) for q in g.qubits),
                        tuple(moved.get(q, q) for q in g.controls), g.angle, g.table))
        out += path[::-1]
    return c.with_gates(out)


def lower(c: Circuit, nearest_neighbor: bool = False) -> Circuit:
    """Rewrite ``c`` into H, X, Phase, CNOT and CZ gates only.

    With ``nearest_neighbor`` the result also respects a line topology.
    Already-lowered input is returned unchanged.
    """
    if is_lowered(c, nearest_neighbor):
        return c
    gates: list[Gate] = []
    for g in c.gates:
        gates += _lower_gate(g, c.width, nearest_neighbor)
    suffix = " | lowered" + (" nn" if nearest_neighbor else "")
    lowered = c.with_gates(gates, provenance=(c.provenance + suffix).strip(" |"))
    if nearest_neighbor:
        lowered = route_nearest_neighbor(lowered)
    return lowered
