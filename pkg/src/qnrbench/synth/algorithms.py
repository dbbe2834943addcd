"""Benchmark circuit generators for quadratic nonresidue sampling."""
from __future__ import annotations

from functools import lru_cache

from ..circuit import (
    CCZ,
    CZ,
    Circuit,
    FlipZero,
    Gate,
    H,
    OracleIndicator,
    Phase,
    S,
    Toffoli,
    X,
)
from ..errors import UnsupportedPrimeError, WidthLimitError
from ..numtheory import ProblemInstance, indicator_truth_table, jacobi
from ..sim import MAX_SIM_WIDTH
from .permutation import PermutationSearchResult, synthesize_indicator_permutation


def _hadamards(qubits) -> list[Gate]:
    return [H(q) for q in qubits]


def _grover_step(register) -> list[Gate]:
    return [*_hadamards(register), FlipZero(register), *_hadamards(register)]


def jacobi_table(p: int, width: int) -> tuple[int, ...]:
    """[(x/p) = -1] for every x < 2^width (x >= p reduces mod p)."""
    return tuple(int(jacobi(x, p) == -1) for x in range(1 << width))


def build_general_circuit(inst: ProblemInstance) -> Circuit:
    """Amplitude-amplification circuit for any prime p = 1 mod 8.

    Layout: register x on qubits 0..n-1 (qubit 0 is the parity bit x0),
    the Jacobi ancilla on n and the [x < p] ancilla on n+1. Odd nonresidues
    below p are rotated by -2*theta and all nonresidues below p by theta,
    giving the net e^{+-i theta}; one inversion about the mean then cancels
    every other amplitude exactly.
    """
    if inst.p % 8 != 1:
        raise UnsupportedPrimeError(f"p = {inst.p} is not 1 mod 8")
    n = inst.n
    width = n + 2
    if width > MAX_SIM_WIDTH:
        raise WidthLimitError(f"p = {inst.p} needs {width} qubits, limit is {MAX_SIM_WIDTH}")
    register = list(range(n))
    jac, below = n, n + 1
    is_qnr = OracleIndicator(jacobi_table(inst.p, n), register, jac)
    lt_p = OracleIndicator(tuple(int(x < inst.p) for x in range(1 << n)), register, below)
    gates = [
        *_hadamards(register),
        is_qnr,
        lt_p,
        Phase(jac, -2 * inst.theta, controls=(below, 0)),
        Phase(jac, inst.theta, controls=(below,)),
        lt_p,
        is_qnr,
        *_grover_step(register),
    ]
    return Circuit(width, tuple(gates), instance=inst, register=n,
                   provenance=f"general QNR sampler, p = {inst.p}")


def build_fermat_circuit(inst: ProblemInstance) -> Circuit:
    """Fermat-prime variant: theta = pi, so x < p is implicit and the
    rotations shrink to a CZ with the parity bit plus an S gate."""
    if not inst.is_fermat or inst.p % 8 != 1:
        raise UnsupportedPrimeError(f"p = {inst.p} is not a Fermat prime = 1 mod 8")
    k = inst.fermat_bits
    if k + 1 > MAX_SIM_WIDTH:
        raise WidthLimitError(f"p = {inst.p} needs {k + 1} qubits, limit is {MAX_SIM_WIDTH}")
    register = list(range(k))
    anc = k
    oracle = OracleIndicator(indicator_truth_table(inst.p, k).astype(int), register, anc)
    gates = [
        *_hadamards(register),
        oracle,
        CZ(0, anc),
        S(anc),
        oracle,
        *_grover_step(register),
    ]
    return Circuit(k + 1, tuple(gates), instance=inst, register=k,
                   provenance=f"Fermat QNR sampler, p = {inst.p}")


@lru_cache(maxsize=1)
def qnr17_permutation() -> PermutationSearchResult:
    """Indicator permutation for p = 17: wire 1 carries the QNR indicator."""
    return synthesize_indicator_permutation(indicator_truth_table(17, 4).astype(int))


def build_qnr17_reduced() -> Circuit:
    """Four-qubit p = 17 circuit with no ancilla.

    After the Hadamard layer every wire is |+>, which any classical
    permutation leaves unchanged, so the forward indicator permutation is
    dropped and only its inverse remains.
    """
    sigma_inv = qnr17_permutation().inverse_circuit().gates
    register = [0, 1, 2, 3]
    gates = [*_hadamards(register), CZ(0, 1), S(1), *sigma_inv, *_grover_step(register)]
    return Circuit(4, tuple(gates), instance=ProblemInstance.from_prime(17),
                   provenance="reduced QNR17 circuit")


def build_basic_zeroflip() -> Circuit:
    """4-qubit |0000> phase flip from an X-conjugated CCCZ, with qubit 4 as
    clean scratch: the scratch takes x0*x1, a CCZ fires on x2 x3 scratch,
    and a second Toffoli returns the scratch to |0>."""
    data = [0, 1, 2, 3]
    scratch = 4
    gates = [
        *[X(q) for q in data],
        Toffoli(0, 1, scratch),
        CCZ(2, 3, scratch),
        Toffoli(0, 1, scratch),
        *[X(q) for q in data],
    ]
    return Circuit(5, tuple(gates), register=4, provenance="Toffoli/CCZ zero flip with scratch")
