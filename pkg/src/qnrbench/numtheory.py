"""Exact integer number theory for the QNR benchmark.

Jacobi symbols, quadratic nonresidue enumeration (with an independent
brute-force oracle), the amplitude rotation angle and the
:class:`ProblemInstance` value type consumed by circuit synthesis.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import InvalidArgumentError, UnsupportedPrimeError

# Benchmark primes are capped well below the statevector limit anyway.
MAX_PRIME = 2**32

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def jacobi(a: int, m: int) -> int:
    """Return the Jacobi symbol (a/m) for odd positive ``m``.

    Binary algorithm: factors of two are stripped from the numerator using
    the second supplement ((2/m) = -1 iff m = 3, 5 mod 8), then quadratic
    reciprocity swaps the arguments. For prime ``m`` this is the Legendre
    symbol.
    """
    if m <= 0 or m % 2 == 0:
        raise InvalidArgumentError(f"Jacobi symbol needs an odd positive modulus, got {m}")
    a %= m
    result = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if m % 8 in (3, 5):
                result = -result
        a, m = m, a
        if a % 4 == 3 and m % 4 == 3:
            result = -result
        a %= m
    return result if m == 1 else 0


def is_prime(m: int) -> bool:
    """Deterministic Miller-Rabin, exact for every 64-bit integer."""
    if m < 2:
        return False
    for q in _MR_BASES:
        if m % q == 0:
            return m == q
    d, s = m - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, m)
        if x in (1, m - 1):
            continue
        for _ in range(s - 1):
            x = x * x % m
            if x == m - 1:
                break
        else:
            return False
    return True


def _require_odd_prime(p: int) -> None:
    if p % 2 == 0 or p < 3:
        raise InvalidArgumentError(f"expected an odd prime, got {p}")
    if p >= MAX_PRIME:
        raise InvalidArgumentError(f"prime {p} exceeds the supported range (< 2^32)")
    if not is_prime(p):
        raise InvalidArgumentError(f"{p} is composite")


def qnr_set(p: int) -> list[int]:
    """All quadratic nonresidues of ``p`` in [1, p-1], ascending."""
    _require_odd_prime(p)
    return [x for x in range(1, p) if jacobi(x, p) == -1]


def qnr_set_bruteforce(p: int) -> list[int]:
    """Nonresidues by squaring every unit and taking the complement.

    Shares no code with :func:`jacobi`; used as the oracle for it.
    """
    _require_odd_prime(p)
    x = np.arange(1, p, dtype=np.int64)
    is_square = np.zeros(p, dtype=bool)
    is_square[(x * x) % p] = True
    return [int(v) for v in np.flatnonzero(~is_square[1:]) + 1]


def register_bits(p: int) -> int:
    """Least n with 2^n > p."""
    return p.bit_length()


def fermat_exponent(p: int) -> int | None:
    """Return k when p = 2^k + 1 is a Fermat prime (k a power of two), else None."""
    k = (p - 1).bit_length() - 1
    if p - 1 == 1 << k and k >= 1 and k & (k - 1) == 0 and is_prime(p):
        return k
    return None


def rotation_angle(p: int) -> float:
    """arccos(1 - 2^n/(p-1)) with n the least width such that 2^n > p."""
    _require_odd_prime(p)
    if p % 8 != 1:
        raise UnsupportedPrimeError(
            f"p = {p} is not 1 mod 8; -1 or 2 is already a nonresidue there"
        )
    cosine = 1 - Fraction(1 << register_bits(p), p - 1)
    if cosine == -1:
        return math.pi
    return math.acos(float(cosine))


def indicator_truth_table(p: int, width: int) -> np.ndarray:
    """Boolean table t[x] = [x < p and (x/p) = -1] for x < 2^width.

    ``width`` must cover every x < p, except for a Fermat prime 2^k + 1 where
    ``width == k`` is accepted: all nonresidues are below 2^k, and 0 stands in
    for the excluded residue -1 so the table stays balanced.
    """
    _require_odd_prime(p)
    if width < 1:
        raise InvalidArgumentError(f"width must be positive, got {width}")
    if (1 << width) < p and fermat_exponent(p) != width:
        raise InvalidArgumentError(f"width {width} too small for p = {p}")
    table = np.zeros(1 << width, dtype=bool)
    table[[x for x in qnr_set(p) if x < (1 << width)]] = True
    return table


@dataclass(frozen=True)
class ProblemInstance:
    """A benchmark prime p = 1 mod 8 with its derived circuit parameters."""

    p: int
    n: int
    N: int
    theta: float
    is_fermat: bool
    fermat_bits: int | None = None

    @classmethod
    def from_prime(cls, p: int) -> ProblemInstance:
        theta = rotation_angle(p)
        n = register_bits(p)
        k = fermat_exponent(p)
        return cls(p=p, n=n, N=1 << n, theta=theta, is_fermat=k is not None, fermat_bits=k)

    @property
    def qnr_count(self) -> int:
        return (self.p - 1) // 2

    def check(self) -> list[str]:
        problems = []
        if not (self.N // 2 < self.p < self.N) or self.N != 1 << self.n:
            problems.append(f"prime {self.p} not in (N/2, N) for N = {self.N}")
        if not 0 < self.theta <= math.pi:
            problems.append(f"theta {self.theta} outside (0, pi]")
        expected = rotation_angle(self.p) if self.p % 8 == 1 and is_prime(self.p) else None
        if expected is None:
            problems.append(f"{self.p} is not a prime = 1 mod 8")
        elif not math.isclose(self.theta, expected, rel_tol=0, abs_tol=1e-12):
            problems.append(f"theta {self.theta} does not match arccos(1 - N/(p-1))")
        if self.is_fermat and self.theta != math.pi:
            problems.append("Fermat prime must have theta = pi")
        return problems
