"""Scoring of measured runs: success rate and chi-square uniformity over
the nonresidue outcomes."""
from __future__ import annotations

import csv
import io
import json
import math
import statistics
from dataclasses import asdict, dataclass
from typing import Sequence

from .errors import InvalidArgumentError
from .numtheory import _require_odd_prime, qnr_set, register_bits
from .sim import RunResult

PVALUE_FLOOR = 1e-6
NOISE_THRESHOLD = 0.5
CLASSICAL_THRESHOLD = 0.75

_EPS = 1e-16
_MAX_ITER = 10_000


def _lower_series(a: float, x: float) -> float:
    """Regularized lower incomplete gamma P(a, x) by its power series."""
    term = 1.0 / a
    total = term
    ap = a
    for _ in range(_MAX_ITER):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * _EPS:
            break
    return total * math.exp(-x + a * math.log(x) - math.lgamma(a))


def _upper_fraction(a: float, x: float) -> float:
    """Regularized upper incomplete gamma Q(a, x) by modified Lentz."""
    tiny = 1e-300
    b = x + 1.0 - a
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_ITER):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            break
    return math.exp(-x + a * math.log(x) - math.lgamma(a)) * h


def regularized_upper_gamma(a: float, x: float) -> float:
    if a <= 0:
        raise InvalidArgumentError("shape must be positive")
    if x < 0:
        raise InvalidArgumentError("argument must be non-negative")
    if x == 0:
        return 1.0
    if x < a + 1.0:
        return min(1.0, max(0.0, 1.0 - _lower_series(a, x)))
    return min(1.0, max(0.0, _upper_fraction(a, x)))


def chi2_pvalue(chi2: float, dof: int) -> float:
    """Upper-tail probability of a chi-square statistic, Q(dof/2, chi2/2)."""
    if chi2 < 0 or math.isnan(chi2):
        raise InvalidArgumentError(f"chi-square statistic must be non-negative, got {chi2}")
    if dof < 1:
        raise InvalidArgumentError(f"degrees of freedom must be positive, got {dof}")
    return regularized_upper_gamma(dof / 2.0, chi2 / 2.0)


@dataclass(frozen=True)
class ScoreReport:
    prime: int
    shots: int
    k: int
    success_rate: float
    observed: dict[int, int]
    expected: float | None
    chi2: float | None
    dof: int
    p_value: float | None
    p_value_plot: float | None

    @property
    def beats_noise(self) -> bool:
        return self.success_rate > NOISE_THRESHOLD

    @property
    def beats_classical(self) -> bool:
        return self.success_rate > CLASSICAL_THRESHOLD

    def to_dict(self) -> dict:
        d = asdict(self)
        d["observed"] = {str(q): n for q, n in self.observed.items()}
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1)


def _outcome_value(key: str, max_bits: int) -> int:
    if not key or len(key) > max_bits or any(ch not in "01" for ch in key):
        raise InvalidArgumentError(f"malformed bitstring {key!r} (expected up to {max_bits} binary digits)")
    return int(key, 2)


def score(r: RunResult, p: int) -> ScoreReport:
    """Success rate and nonresidue uniformity for one run.

    Outcomes that are residues, zero, or >= p count as failures. The
    chi-square test is conditioned on the k successful shots: each of the
    m = (p-1)/2 nonresidues expects k/m observations, with m-1 degrees of
    freedom. With k = 0 the statistic and p-value are None.
    """
    _require_odd_prime(p)
    if r.shots < 1:
        raise InvalidArgumentError("run has zero shots")
    if any(v < 0 for v in r.counts.values()):
        raise InvalidArgumentError("negative count in run")
    if sum(r.counts.values()) != r.shots:
        raise InvalidArgumentError(f"counts sum to {sum(r.counts.values())}, run declares {r.shots} shots")
    nbits = register_bits(p)
    qnrs = qnr_set(p)
    observed = dict.fromkeys(qnrs, 0)
    for key, n in r.counts.items():
        value = _outcome_value(key, nbits)
        if value in observed:
            observed[value] += n
    k = sum(observed.values())
    m = len(qnrs)
    if k == 0:
        expected = chi2 = p_value = p_plot = None
    else:
        expected = k / m
        chi2 = sum((o - expected) ** 2 for o in observed.values()) / expected
        p_value = chi2_pvalue(chi2, m - 1)
        p_plot = max(p_value, PVALUE_FLOOR)
    return ScoreReport(
        prime=p,
        shots=r.shots,
        k=k,
        success_rate=k / r.shots,
        observed=observed,
        expected=expected,
        chi2=chi2,
        dof=m - 1,
        p_value=p_value,
        p_value_plot=p_plot,
    )


def logit(v: float) -> float:
    if v <= 0.0:
        return -math.inf
    if v >= 1.0:
        return math.inf
    return math.log(v / (1.0 - v))


def _fmt(v: float | None) -> str:
    return "" if v is None else format(v, ".6g")


def plot_data(reports: Sequence[tuple[str, ScoreReport]]) -> str:
    """CSV rows (device, score, p_value_plot, logit) for strip and scatter plots.

    Devices are ordered by decreasing median score; rows keep their input
    order within a device.
    """
    if not reports:
        raise InvalidArgumentError("no reports to export")
    by_device: dict[str, list[ScoreReport]] = {}
    for label, rep in reports:
        by_device.setdefault(label, []).append(rep)
    order = sorted(by_device, key=lambda d: (-statistics.median(r.success_rate for r in by_device[d]), d))
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["device", "score", "p_value_plot", "logit(p_value_plot)"])
    for device in order:
        for rep in by_device[device]:
            pv = rep.p_value_plot
            writer.writerow([device, _fmt(rep.success_rate), _fmt(pv), _fmt(None if pv is None else logit(pv))])
    return buf.getvalue()
