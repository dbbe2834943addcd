"""Classical comparison samplers that set the benchmark thresholds."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import InvalidArgumentError
from .numtheory import _require_odd_prime, jacobi, qnr_set
from .synth.algorithms import qnr17_permutation


@dataclass(frozen=True)
class BaselineOutcome:
    candidate: int
    is_qnr: bool
    jacobi_calls_used: int


def _is_qnr(x: int, p: int) -> bool:
    # Euler's criterion: the scorer's judgement, outside the sampler's budget.
    return pow(x, (p - 1) // 2, p) == p - 1


def algorithm2_sample(p: int, seed=None) -> BaselineOutcome:
    """One draw of the single-Jacobi-call sampler.

    Draw x; if it is a nonresidue return it, otherwise return a fresh draw
    y without checking it.
    """
    _require_odd_prime(p)
    rng = np.random.default_rng(seed)
    x = int(rng.integers(1, p))
    if jacobi(x, p) == -1:
        return BaselineOutcome(x, True, 1)
    y = int(rng.integers(1, p))
    return BaselineOutcome(y, _is_qnr(y, p), 1)


def algorithm2_exact_success(p: int) -> Fraction:
    """Exact success probability of :func:`algorithm2_sample` by enumeration."""
    _require_odd_prime(p)
    units = p - 1
    hits = sum(1 for x in range(1, p) if jacobi(x, p) == -1)
    # Second draw is uniform and independent of the first.
    return Fraction(hits, units) + Fraction(units - hits, units) * Fraction(hits, units)


def algorithm2_monte_carlo(p: int, trials: int, seed=None) -> float:
    """Vectorised success rate of the single-Jacobi-call sampler."""
    _require_odd_prime(p)
    if trials < 1:
        raise InvalidArgumentError("trials must be at least 1")
    rng = np.random.default_rng(seed)
    is_qnr = np.zeros(p, dtype=bool)
    is_qnr[qnr_set(p)] = True
    x = rng.integers(1, p, size=trials)
    y = rng.integers(1, p, size=trials)
    returned = np.where(is_qnr[x], x, y)
    return float(is_qnr[returned].mean())


def algorithm4_sample(p: int, advice_qnr: int, seed=None, r: int | None = None) -> int:
    """advice * r^2 mod p for a uniform unit r (or the supplied ``r``)."""
    _require_odd_prime(p)
    if jacobi(advice_qnr, p) != -1:
        raise InvalidArgumentError(f"advice {advice_qnr} is not a nonresidue mod {p}")
    if r is None:
        r = int(np.random.default_rng(seed).integers(1, p))
    elif not 1 <= r < p:
        raise InvalidArgumentError(f"r must lie in [1, {p - 1}]")
    return advice_qnr * r * r % p


def algorithm4_distribution(p: int, advice_qnr: int) -> dict[int, int]:
    """Histogram of :func:`algorithm4_sample` over every r in [1, p-1]."""
    hist: dict[int, int] = {}
    for r in range(1, p):
        v = algorithm4_sample(p, advice_qnr, r=r)
        hist[v] = hist.get(v, 0) + 1
    return dict(sorted(hist.items()))


# (x3, x2, x0) carry (a, b, c); wire x1 is the indicator wire.
REVERSE_TRICK_WIRES = (3, 2, 0)


def qnr17_reverse_trick(a: int, b: int, c: int, indicator_bit: int = 1) -> int:
    """Run the p = 17 indicator permutation backwards on a chosen input.

    With 1 on the indicator wire the output is a nonresidue mod 17 for any
    (a, b, c); the permutation being a bijection, the eight inputs give the
    eight nonresidues.
    """
    result = qnr17_permutation()
    value = indicator_bit << result.coordinate_wire
    for bit, wire in zip((a, b, c), REVERSE_TRICK_WIRES):
        value |= (int(bit) & 1) << wire
    perm = result.permutation()
    return perm.index(value)
