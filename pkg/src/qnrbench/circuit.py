"""Quantum circuit intermediate representation.

Qubit 0 is the least significant bit of a basis index; bitstrings are
printed most-significant-first. ``Phase(target, angle, controls)`` is
diag(1, e^{i angle}) on the target, applied when every control is 1, so
S = Phase(pi/2), T = Phase(pi/4) and sqrt(T) = Phase(pi/8).
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from typing import Any, Iterable, Sequence

import numpy as np

from .errors import CircuitValidationError, InvalidArgumentError, WidthLimitError
from .numtheory import ProblemInstance

MAX_DENSE_WIDTH = 12

KINDS = (
    "H",
    "X",
    "CNOT",
    "CZ",
    "Toffoli",
    "CCZ",
    "Phase",
    "FlipZero",
    "OracleIndicator",
    "PermutationGate",
)

# kind -> (number of target qubits, number of controls); None means "any".
_ARITY = {
    "H": (1, 0),
    "X": (1, 0),
    "CNOT": (1, 1),
    "CZ": (2, 0),
    "Toffoli": (1, 2),
    "CCZ": (3, 0),
    "Phase": (1, None),
    "FlipZero": (None, 0),
    "OracleIndicator": (1, None),
    "PermutationGate": (None, 0),
}


@dataclass(frozen=True)
class Gate:
    """One IR instruction.

    ``qubits`` holds targets and ``controls`` holds control qubits. For
    ``OracleIndicator`` the controls are the input register (controls[0] is
    the low bit of the table index) and the single target is the ancilla
    that receives ``table[x]`` by XOR. ``PermutationGate`` maps basis index
    x (over ``qubits``, qubits[0] low) to ``table[x]``.
    """

    kind: str
    qubits: tuple[int, ...]
    controls: tuple[int, ...] = ()
    angle: float = 0.0
    table: tuple[int, ...] | None = None

    @property
    def all_qubits(self) -> tuple[int, ...]:
        return self.controls + self.qubits

    def inverse(self) -> Gate:
        if self.kind == "Phase":
            return replace(self, angle=-self.angle)
        if self.kind == "PermutationGate":
            inv = [0] * len(self.table)
            for x, y in enumerate(self.table):
                inv[y] = x
            return replace(self, table=tuple(inv))
        return self

    def to_dict(self) -> dict[str, Any]:
        d: dict[str, Any] = {
            "kind": self.kind,
            "qubits": list(self.qubits),
            "controls": list(self.controls),
            "angle": self.angle,
        }
        if self.table is not None:
            d["table"] = list(self.table)
        return d

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> Gate:
        table = d.get("table")
        return cls(
            kind=d["kind"],
            qubits=tuple(int(q) for q in d["qubits"]),
            controls=tuple(int(q) for q in d.get("controls", ())),
            angle=float(d.get("angle", 0.0)),
            table=None if table is None else tuple(int(v) for v in table),
        )


# Constructors, named after the gates they build.
def H(q: int) -> Gate:
    return Gate("H", (q,))


def X(q: int) -> Gate:
    return Gate("X", (q,))


def CNOT(control: int, target: int) -> Gate:
    return Gate("CNOT", (target,), (control,))


def CZ(a: int, b: int) -> Gate:
    return Gate("CZ", (a, b))


def Toffoli(c1: int, c2: int, target: int) -> Gate:
    return Gate("Toffoli", (target,), (c1, c2))


def CCZ(a: int, b: int, c: int) -> Gate:
    return Gate("CCZ", (a, b, c))


def Phase(target: int, angle: float, controls: Sequence[int] = ()) -> Gate:
    return Gate("Phase", (target,), tuple(controls), float(angle))


def S(q: int) -> Gate:
    return Phase(q, math.pi / 2)


def T(q: int) -> Gate:
    return Phase(q, math.pi / 4)


def FlipZero(qubits: Sequence[int]) -> Gate:
    return Gate("FlipZero", tuple(qubits))


def OracleIndicator(table: Sequence[int], inputs: Sequence[int], ancilla: int) -> Gate:
    return Gate("OracleIndicator", (ancilla,), tuple(inputs), table=tuple(int(bool(v)) for v in table))


def PermutationGate(table: Sequence[int], qubits: Sequence[int]) -> Gate:
    return Gate("PermutationGate", tuple(qubits), table=tuple(int(v) for v in table))


@dataclass(frozen=True)
class Circuit:
    width: int
    gates: tuple[Gate, ...] = ()
    instance: ProblemInstance | None = None
    provenance: str = ""
    # Register qubits are 0..register-1; None means the whole width.
    register: int | None = None
    extra: dict[str, Any] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))

    @property
    def register_qubits(self) -> list[int]:
        return list(range(self.width if self.register is None else self.register))

    def with_gates(self, gates: Iterable[Gate], **changes) -> Circuit:
        return replace(self, gates=tuple(gates), **changes)

    def prefix(self, k: int) -> Circuit:
        return replace(self, gates=self.gates[:k])

    def inverse(self) -> Circuit:
        return replace(self, gates=tuple(g.inverse() for g in reversed(self.gates)))

    def census(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for g in self.gates:
            counts[g.kind] = counts.get(g.kind, 0) + 1
        return counts

    def to_dict(self) -> dict[str, Any]:
        meta: dict[str, Any] = {"prime": None if self.instance is None else self.instance.p,
                                "provenance": self.provenance}
        if self.register is not None:
            meta["register"] = self.register
        meta.update(self.extra)
        return {"width": self.width, "gates": [g.to_dict() for g in self.gates], "metadata": meta}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1)

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> Circuit:
        meta = dict(d.get("metadata") or {})
        prime = meta.pop("prime", None)
        provenance = meta.pop("provenance", "")
        register = meta.pop("register", None)
        return cls(
            width=int(d["width"]),
            gates=tuple(Gate.from_dict(g) for g in d.get("gates", ())),
            instance=None if prime is None else ProblemInstance.from_prime(int(prime)),
            provenance=provenance,
            register=register,
            extra=meta,
        )

    @classmethod
    def from_json(cls, text: str) -> Circuit:
        return cls.from_dict(json.loads(text))


def _gate_problems(g: Gate, width: int) -> list[str]:
    if g.kind not in _ARITY:
        return [f"unknown gate kind {g.kind!r}"]
    problems = []
    n_targets, n_controls = _ARITY[g.kind]
    if n_targets is not None and len(g.qubits) != n_targets:
        problems.append(f"{g.kind} needs {n_targets} target qubit(s), got {len(g.qubits)}")
    if n_controls is not None and len(g.controls) != n_controls:
        problems.append(f"{g.kind} needs {n_controls} control(s), got {len(g.controls)}")
    if not g.qubits:
        problems.append(f"{g.kind} acts on no qubits")
    qs = g.all_qubits
    for q in qs:
        if not 0 <= q < width:
            problems.append(f"{g.kind}: qubit index {q} out of range for width {width}")
    if len(set(qs)) != len(qs):
        problems.append(f"{g.kind}: duplicate qubit in {list(qs)}")
    if g.kind == "OracleIndicator":
        if g.table is None or len(g.table) != 1 << len(g.controls):
            problems.append("OracleIndicator table must have 2^(#inputs) entries")
        elif any(v not in (0, 1) for v in g.table):
            problems.append("OracleIndicator table must be boolean")
    if g.kind == "PermutationGate":
        size = 1 << len(g.qubits)
        if g.table is None or len(g.table) != size:
            problems.append("PermutationGate table must have 2^(#qubits) entries")
        elif sorted(g.table) != list(range(size)):
            problems.append("PermutationGate table is not a bijection")
    if not math.isfinite(g.angle):
        problems.append(f"{g.kind}: non-finite angle")
    return problems


def validate(c: Circuit) -> list[str]:
    """Every invariant violation in ``c``; an empty list means valid."""
    problems = []
    if c.width < 1:
        problems.append(f"width must be positive, got {c.width}")
    for i, g in enumerate(c.gates):
        problems += [f"gate {i}: {msg}" for msg in _gate_problems(g, c.width)]
    if c.instance is not None:
        problems += [f"metadata: {msg}" for msg in c.instance.check()]
    if c.register is not None and not 0 < c.register <= c.width:
        problems.append(f"register size {c.register} outside 1..{c.width}")
    return problems


def check(c: Circuit) -> Circuit:
    problems = validate(c)
    if problems:
        raise CircuitValidationError(problems)
    return c


def gate_unitary(g: Gate, width: int) -> np.ndarray:
    """Dense 2^width x 2^width unitary of ``g`` acting on the full register."""
    if width > MAX_DENSE_WIDTH:
        raise WidthLimitError(f"dense unitaries are limited to {MAX_DENSE_WIDTH} qubits")
    problems = _gate_problems(g, width)
    if problems:
        raise InvalidArgumentError("; ".join(problems))
    from .sim import apply_gate

    dim = 1 << width
    # Columns are the images of basis states.
    return apply_gate(np.eye(dim, dtype=complex).T.copy(), g, width).T


def circuit_unitary(c: Circuit) -> np.ndarray:
    if c.width > MAX_DENSE_WIDTH:
        raise WidthLimitError(f"dense unitaries are limited to {MAX_DENSE_WIDTH} qubits")
    from .sim import apply_gate

    rows = np.eye(1 << c.width, dtype=complex)
    for g in c.gates:
        rows = apply_gate(rows, g, c.width)
    return rows.T


def equivalent_up_to_global_phase(
    a: Circuit, b: Circuit, tol: float = 1e-10, clean_qubits: Sequence[int] = ()
) -> bool:
    """True iff U_a = e^{i phi} U_b entrywise within ``tol``.

    ``clean_qubits`` restricts the comparison to input columns where those
    qubits are |0>, for constructions that borrow scratch qubits.
    """
    if a.width != b.width:
        raise InvalidArgumentError(f"width mismatch: {a.width} vs {b.width}")
    ua, ub = circuit_unitary(a), circuit_unitary(b)
    if clean_qubits:
        mask = sum(1 << q for q in clean_qubits)
        cols = [x for x in range(1 << a.width) if not x & mask]
        ua, ub = ua[:, cols], ub[:, cols]
    # Align on the largest entry of ub, then compare entrywise.
    k = np.unravel_index(np.argmax(np.abs(ub)), ub.shape)
    if abs(ua[k]) < tol:
        return False
    phase = ua[k] / ub[k]
    phase /= abs(phase)
    return bool(np.max(np.abs(ua - phase * ub)) < tol)
