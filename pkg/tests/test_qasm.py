import math

import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from qnrbench import qasm, sim
from qnrbench.circuit import CNOT, CZ, Circuit, H, Phase, Toffoli, X, equivalent_up_to_global_phase
from qnrbench.errors import QasmError, UnsupportedGateError
from qnrbench.synth import build_grover_gate, build_qnr17_reduced, lower

QNR17 = [3, 5, 6, 7, 10, 11, 12, 14]
HEAD = 'OPENQASM 2.0;\ninclude "qelib1.inc";\nqreg q[3];\ncreg c[3];\n'


def program(*lines):
    return HEAD + "\n".join(lines) + "\n"


@pytest.fixture(scope="module")
def reduced17_nn():
    return lower(build_qnr17_reduced(), nearest_neighbor=True)


class TestAngles:
    @pytest.mark.parametrize(
        "angle, text",
        [
            (math.pi / 8, "pi/8"),
            (-math.pi / 8, "-pi/8"),
            (3 * math.pi / 4, "3*pi/4"),
            (math.pi, "pi"),
            (-2 * math.pi, "-2*pi"),
            (0.0, "0"),
            (5 * math.pi / 1024, "5*pi/1024"),
        ],
    )
    def test_symbolic(self, angle, text):
        assert qasm.format_angle(angle) == text

    def test_literal(self):
        angle = math.acos(-0.6)
        text = qasm.format_angle(angle)
        assert "pi" not in text
        assert float(text) == angle

    def test_pi_fraction_tolerance(self):
        assert qasm.pi_fraction(math.pi / 8 + 1e-14) == 1 / 8
        assert qasm.pi_fraction(math.pi / 8 + 1e-9) is None


class TestEmit:
    def test_pi_over_8(self):
        assert "u1(pi/8) q[0];" in qasm.emit(Circuit(1, (Phase(0, math.pi / 8),)))

    def test_named_gates(self):
        c = Circuit(2, (H(0), X(1), CNOT(0, 1), CZ(1, 0), Phase(0, math.pi / 2), Phase(1, -math.pi / 2),
                        Phase(0, math.pi / 4), Phase(1, -math.pi / 4), Phase(0, 0.25)))
        body = qasm.emit(c).splitlines()[4:-2]
        assert body == ["h q[0];", "x q[1];", "cx q[0],q[1];", "cz q[1],q[0];", "s q[0];", "sdg q[1];",
                        "t q[0];", "tdg q[1];", "u1(0.25) q[0];"]

    def test_header_and_measurements(self):
        text = qasm.emit(Circuit(2, (H(0),)))
        lines = text.splitlines()
        assert lines[:4] == ["OPENQASM 2.0;", 'include "qelib1.inc";', "qreg q[2];", "creg c[2];"]
        assert lines[-2:] == ["measure q[0] -> c[0];", "measure q[1] -> c[1];"]
        assert text.endswith("\n")

    def test_unlowered_gate(self):
        with pytest.raises(UnsupportedGateError):
            qasm.emit(Circuit(3, (Toffoli(0, 1, 2),)))
        with pytest.raises(UnsupportedGateError):
            qasm.emit(Circuit(2, (Phase(0, 0.1, (1,)),)))

    def test_deterministic(self, reduced17_nn):
        assert qasm.emit(reduced17_nn) == qasm.emit(lower(build_qnr17_reduced(), nearest_neighbor=True))


class TestParse:
    def test_round_trip_is_idempotent(self, reduced17_nn):
        text = qasm.emit(reduced17_nn)
        assert qasm.emit(qasm.parse(text)) == text

    def test_round_trip_distribution(self, reduced17_nn):
        parsed = qasm.parse(qasm.emit(reduced17_nn))
        p = sim.probabilities(sim.run(parsed))
        expected = np.zeros(16)
        expected[QNR17] = 1 / 8
        np.testing.assert_allclose(p, expected, atol=1e-9)
        assert equivalent_up_to_global_phase(parsed, reduced17_nn)

    def test_grover_gate_round_trip(self):
        g = build_grover_gate(5, nearest_neighbor=True)
        assert equivalent_up_to_global_phase(qasm.parse(qasm.emit(g)), g)

    def test_measurements_recorded(self):
        c = qasm.parse(program("h q[0];", "measure q[0] -> c[2];", "measure q[2] -> c[0];"))
        assert c.extra["measurements"] == [[0, 2], [2, 0]]
        assert c.width == 3

    def test_expressions_comments_whitespace(self):
        text = program(
            "// a comment",
            "u1( -pi / 4 ) q[1];   // trailing",
            "u1(2*pi/8) q[0];",
            "u1((pi)) q[2];",
            "u1(1e-3 + 0.5) q[2];",
            "u1(-(-pi)/2) q[0];",
        )
        angles = [g.angle for g in qasm.parse(text).gates]
        assert angles == pytest.approx([-math.pi / 4, math.pi / 4, math.pi, 0.501, math.pi / 2])

    def test_named_gates_parse(self):
        text = program("s q[0];", "sdg q[1];", "t q[2];", "tdg q[0];", "cz q[0],q[2];", "x q[1];")
        c = qasm.parse(text)
        assert [g.angle for g in c.gates[:4]] == [math.pi / 2, -math.pi / 2, math.pi / 4, -math.pi / 4]
        assert c.gates[4] == CZ(0, 2)

    def test_include_optional(self):
        c = qasm.parse("OPENQASM 2.0;\nqreg q[1];\nh q[0];\n")
        assert c.gates == (H(0),)


def error_of(text):
    with pytest.raises(QasmError) as info:
        qasm.parse(text)
    return info.value


class TestParseErrors:
    def test_duplicate_qubit(self):
        err = error_of(program("cx q[0],q[0];"))
        assert "duplicate" in str(err)
        assert err.line == 5 and err.column == 1

    def test_unsupported_gate(self):
        err = error_of(program("ccx q[0],q[1],q[2];"))
        assert "unsupported" in str(err) and err.line == 5

    def test_undeclared_register(self):
        assert "undeclared" in str(error_of(program("h r[0];")))

    def test_index_out_of_range(self):
        err = error_of(program("h q[3];"))
        assert "out of range" in str(err)
        assert err.column == 5

    def test_wrong_version(self):
        assert error_of("OPENQASM 3.0;\nqreg q[1];\n").line == 1

    def test_missing_semicolon(self):
        err = error_of(program("h q[0]", "h q[1];"))
        assert err.line == 6 and "';'" in str(err)

    def test_whole_register_argument(self):
        assert "whole-register" in str(error_of(program("h q;")))

    def test_second_qreg(self):
        assert "one quantum register" in str(error_of(program("qreg r[2];")))

    def test_register_size(self):
        assert error_of("OPENQASM 2.0;\nqreg q[0];\n")
        assert error_of("OPENQASM 2.0;\nqreg q[2000];\n")

    def test_division_by_zero(self):
        assert "division by zero" in str(error_of(program("u1(pi/0) q[0];")))

    def test_non_finite(self):
        assert "finite" in str(error_of(program("u1(1e308*10) q[0];")))

    def test_wrong_arity(self):
        assert error_of(program("cx q[0];"))
        assert error_of(program("h q[0],q[1];"))

    def test_bad_character(self):
        err = error_of(program("h q[0]; $"))
        assert err.line == 5 and err.column == 9

    def test_no_qreg(self):
        assert error_of("OPENQASM 2.0;\n")

    def test_non_integer_index(self):
        assert error_of(program("h q[1.5];"))

    def test_unknown_include(self):
        assert error_of('OPENQASM 2.0;\ninclude "other.inc";\nqreg q[1];\n')

    def test_message_format(self):
        assert str(error_of(program("h q[9];"))).startswith("line 5, column")


VALID = program(
    "h q[0];", "cx q[0],q[1];", "u1(pi/8) q[2];", "cz q[1],q[2];", "tdg q[0];", "measure q[0] -> c[0];"
)
FRAGMENTS = ["q[", "]", ";", "(", ")", ",", "->", "pi", "/", "*", "-", "0", "9", "h", "cx", "u1", "qreg",
             "creg", "measure", "\n", " ", '"', "OPENQASM", "2.0", "//", "1e400", "$", "é"]


@st.composite
def mutated_programs(draw):
    text = VALID
    for _ in range(draw(st.integers(1, 4))):
        pos = draw(st.integers(0, len(text)))
        op = draw(st.sampled_from(["delete", "insert", "replace"]))
        if op == "delete":
            end = min(len(text), pos + draw(st.integers(1, 6)))
            text = text[:pos] + text[end:]
        elif op == "insert":
            text = text[:pos] + draw(st.sampled_from(FRAGMENTS)) + text[pos:]
        else:
            text = text[:pos] + draw(st.sampled_from(FRAGMENTS)) + text[pos + 1 :]
    return text


class TestFuzz:
    @settings(max_examples=500, deadline=None, suppress_health_check=[HealthCheck.too_slow])
    @given(mutated_programs())
    def test_only_structured_errors(self, text):
        try:
            c = qasm.parse(text)
        except QasmError as err:
            assert err.line is not None and err.column is not None
            return
        # Anything accepted must survive a round trip.
        again = qasm.parse(qasm.emit(c))
        assert again.width == c.width
        assert len(again.gates) == len(c.gates)

    @settings(max_examples=200, deadline=None)
    @given(st.text(max_size=80))
    def test_arbitrary_text(self, text):
        try:
            qasm.parse(text)
        except QasmError:
            pass
