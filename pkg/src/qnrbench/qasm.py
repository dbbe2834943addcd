"""OpenQASM 2.0 emitter and parser for lowered circuits.

Supported subset: ``h x s sdg t tdg u1(angle) cx cz`` and ``measure``,
one quantum and at most one classical register. See docs/qasm-subset.md.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction

from .circuit import CNOT, CZ, Circuit, Gate, H, Phase, X
from .errors import QasmError, UnsupportedGateError

HEADER = 'OPENQASM 2.0;\ninclude "qelib1.inc";\n'
MAX_REGISTER = 1024
_SYMBOLIC_TOL = 1e-12
_MAX_POW2 = 32

# Exact multiples of pi with a dedicated qelib1 gate name.
_NAMED_PHASES = {Fraction(1, 2): "s", Fraction(-1, 2): "sdg", Fraction(1, 4): "t", Fraction(-1, 4): "tdg"}
_PARAMLESS = {"h": 1, "x": 1, "s": 1, "sdg": 1, "t": 1, "tdg": 1, "cx": 2, "cz": 2}


def pi_fraction(angle: float) -> Fraction | None:
    """k/2^j with angle = k*pi/2^j (within 1e-12), else None."""
    r = angle / math.pi
    for j in range(_MAX_POW2 + 1):
        scaled = r * (1 << j)
        k = round(scaled)
        if abs(scaled - k) * math.pi / (1 << j) <= _SYMBOLIC_TOL:
            return Fraction(k, 1 << j)
    return None


def format_angle(angle: float) -> str:
    frac = pi_fraction(angle)
    if frac is None:
        return format(angle, ".17g")
    k, d = frac.numerator, frac.denominator
    if k == 0:
        return "0"
    sign = "-" if k < 0 else ""
    k = abs(k)
    num = "pi" if k == 1 else f"{k}*pi"
    return f"{sign}{num}" if d == 1 else f"{sign}{num}/{d}"


def _emit_gate(g: Gate) -> str:
    if g.kind == "H":
        return f"h q[{g.qubits[0]}];"
    if g.kind == "X":
        return f"x q[{g.qubits[0]}];"
    if g.kind == "CNOT":
        return f"cx q[{g.controls[0]}],q[{g.qubits[0]}];"
    if g.kind == "CZ":
        return f"cz q[{g.qubits[0]}],q[{g.qubits[1]}];"
    if g.kind == "Phase" and not g.controls:
        frac = pi_fraction(g.angle)
        if frac in _NAMED_PHASES:
            return f"{_NAMED_PHASES[frac]} q[{g.qubits[0]}];"
        return f"u1({format_angle(g.angle)}) q[{g.qubits[0]}];"
    raise UnsupportedGateError(f"gate {g.kind} must be lowered before QASM emission")


def emit(c: Circuit) -> str:
    """Deterministic OpenQASM 2.0 text; measures qubit i into bit i."""
    lines = [HEADER.rstrip("\n"), f"qreg q[{c.width}];", f"creg c[{c.width}];"]
    lines += [_emit_gate(g) for g in c.gates]
    lines += [f"measure q[{i}] -> c[{i}];" for i in range(c.width)]
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------- parser

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<comment>//[^\n]*)
  | (?P<number>(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?)
  | (?P<id>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<string>"[^"\n]*")
  | (?P<arrow>->)
  | (?P<op>[\[\]\(\),;+\-*/])
    """,
    re.VERBOSE,
)


@dataclass
class _Token:
    kind: str
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        col = pos - line_start + 1
        if m is None:
            raise QasmError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind not in ("ws", "comment"):
            tokens.append(_Token(kind, m.group(), line, col))
        pos = m.end()
    tokens.append(_Token("eof", "", line, pos - line_start + 1))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0
        self.qreg: tuple[str, int] | None = None
        self.creg: tuple[str, int] | None = None
        self.gates: list[Gate] = []
        self.measurements: list[tuple[int, int]] = []

    # token helpers
    @property
    def tok(self) -> _Token:
        return self.tokens[self.i]

    def error(self, msg: str, tok: _Token | None = None) -> QasmError:
        tok = tok or self.tok
        return QasmError(msg, tok.line, tok.col)

    def advance(self) -> _Token:
        t = self.tok
        if t.kind != "eof":
            self.i += 1
        return t

    def expect(self, text: str) -> _Token:
        if self.tok.text != text:
            found = self.tok.text or "end of input"
            raise self.error(f"expected {text!r}, found {found!r}")
        return self.advance()

    def expect_kind(self, kind: str, what: str) -> _Token:
        if self.tok.kind != kind:
            found = self.tok.text or "end of input"
            raise self.error(f"expected {what}, found {found!r}")
        return self.advance()

    # grammar
    def parse(self) -> Circuit:
        self.expect("OPENQASM")
        version = self.expect_kind("number", "version number")
        if version.text != "2.0":
            raise self.error(f"only OpenQASM 2.0 is supported, got {version.text}", version)
        self.expect(";")
        if self.tok.text == "include":
            self.advance()
            inc = self.expect_kind("string", "include file name")
            if inc.text != '"qelib1.inc"':
                raise self.error(f"unsupported include {inc.text}", inc)
            self.expect(";")
        while self.tok.kind != "eof":
            self.statement()
        if self.qreg is None:
            raise self.error("program declares no quantum register")
        c = Circuit(
            self.qreg[1],
            tuple(self.gates),
            provenance="parsed from OpenQASM 2.0",
            extra={"measurements": [list(m) for m in self.measurements]},
        )
        return c

    def statement(self) -> None:
        t = self.tok
        if t.kind != "id":
            raise self.error(f"expected a statement, found {t.text!r}")
        if t.text in ("qreg", "creg"):
            self.declaration()
        elif t.text == "measure":
            self.measure()
        elif t.text == "u1":
            self.advance()
            self.expect("(")
            angle = self.expression()
            self.expect(")")
            (q,) = self.qargs(1, t)
            self.expect(";")
            self.gates.append(Phase(q, angle))
        elif t.text in _PARAMLESS:
            self.advance()
            qs = self.qargs(_PARAMLESS[t.text], t)
            self.expect(";")
            self.gates.append(_named_gate(t.text, qs))
        else:
            raise self.error(f"unsupported statement or gate {t.text!r}")

    def declaration(self) -> None:
        kw = self.advance()
        name = self.expect_kind("id", "register name")
        self.expect("[")
        size_tok = self.expect_kind("number", "register size")
        size = _as_int(size_tok, self)
        self.expect("]")
        self.expect(";")
        if not 1 <= size <= MAX_REGISTER:
            raise self.error(f"register size {size} outside 1..{MAX_REGISTER}", size_tok)
        if kw.text == "qreg":
            if self.qreg is not None:
                raise self.error("only one quantum register is supported", kw)
            if self.gates:
                raise self.error("qreg must precede gates", kw)
            self.qreg = (name.text, size)
        else:
            if self.creg is not None:
                raise self.error("only one classical register is supported", kw)
            self.creg = (name.text, size)

    def arg(self, reg: tuple[str, int] | None, what: str) -> int:
        name = self.expect_kind("id", f"{what} register")
        if reg is None or name.text != reg[0]:
            raise self.error(f"undeclared {what} register {name.text!r}", name)
        if self.tok.text != "[":
            raise self.error("whole-register arguments are not supported; index the register")
        self.advance()
        idx_tok = self.expect_kind("number", "register index")
        idx = _as_int(idx_tok, self)
        self.expect("]")
        if not 0 <= idx < reg[1]:
            raise self.error(f"index {idx} out of range for {reg[0]}[{reg[1]}]", idx_tok)
        return idx

    def qargs(self, count: int, gate_tok: _Token) -> list[int]:
        qs = [self.arg(self.qreg, "quantum")]
        while self.tok.text == ",":
            self.advance()
            qs.append(self.arg(self.qreg, "quantum"))
        if len(qs) != count:
            raise self.error(f"{gate_tok.text} takes {count} qubit(s), got {len(qs)}", gate_tok)
        if len(set(qs)) != len(qs):
            raise self.error(f"duplicate qubit in {gate_tok.text}", gate_tok)
        return qs

    def measure(self) -> None:
        self.advance()
        q = self.arg(self.qreg, "quantum")
        self.expect("->")
        b = self.arg(self.creg, "classical")
        self.expect(";")
        self.measurements.append((q, b))

    # expressions: sum := term (('+'|'-') term)*; term := unary (('*'|'/') unary)*
    def expression(self) -> float:
        value = self.term()
        while self.tok.text in ("+", "-"):
            op = self.advance().text
            rhs = self.term()
            value = value + rhs if op == "+" else value - rhs
        if not math.isfinite(value):
            raise self.error("angle is not finite")
        return value

    def term(self) -> float:
        value = self.unary()
        while self.tok.text in ("*", "/"):
            op_tok = self.advance()
            rhs = self.unary()
            if op_tok.text == "*":
                value *= rhs
            elif rhs == 0:
                raise self.error("division by zero", op_tok)
            else:
                value /= rhs
        return value

    def unary(self) -> float:
        if self.tok.text == "-":
            self.advance()
            return -self.unary()
        if self.tok.text == "+":
            self.advance()
            return self.unary()
        t = self.tok
        if t.text == "(":
            self.advance()
            value = self.expression()
            self.expect(")")
            return value
        if t.kind == "number":
            self.advance()
            return float(t.text)
        if t.text == "pi":
            self.advance()
            return math.pi
        raise self.error(f"expected a number, 'pi' or '(', found {t.text or 'end of input'!r}")


def _as_int(tok: _Token, parser: _Parser) -> int:
    if not tok.text.isdigit():
        raise parser.error(f"expected an integer, found {tok.text!r}", tok)
    return int(tok.text)


def _named_gate(name: str, qs: list[int]) -> Gate:
    if name == "h":
        return H(qs[0])
    if name == "x":
        return X(qs[0])
    if name == "cx":
        return CNOT(qs[0], qs[1])
    if name == "cz":
        return CZ(qs[0], qs[1])
    angle = {"s": math.pi / 2, "sdg": -math.pi / 2, "t": math.pi / 4, "tdg": -math.pi / 4}[name]
    return Phase(qs[0], angle)


def parse(text: str) -> Circuit:
    """Parse the supported OpenQASM 2.0 subset into a :class:`Circuit`.

    The measurement mapping is kept in ``circuit.extra["measurements"]`` as
    [qubit, bit] pairs. Every failure raises :class:`QasmError` with the
    offending line and column.
    """
    return _Parser(text).parse()
