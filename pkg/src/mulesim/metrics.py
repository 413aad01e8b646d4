"""Objective reduction and batch statistics.

Downtime and travel records reduce to four objectives: average and max
downtime, average and max travel. Note the average downtime divides by
the number of failures, matching how per-failure results are reported,
not by the node count. Batch comparisons use Welch's unequal-variance
t-test with a self-contained regularized-incomplete-beta evaluation
(continued fraction, absolute accuracy better than 1e-8).
"""

import math
from dataclasses import dataclass
from typing import Sequence

__all__ = [
    "ObjectiveSummary",
    "BatchStats",
    "TTestResult",
    "summarize",
    "aggregate",
    "welch_t_test",
]


@dataclass(frozen=True)
class ObjectiveSummary:
    avg_downtime: float
    max_downtime: float
    avg_travel: float
    max_travel: float

    FIELDS = ("avg_downtime", "max_downtime", "avg_travel", "max_travel")


@dataclass(frozen=True)
class BatchStats:
    """Per-field mean and sample (n-1) standard deviation of a batch."""

    mean: ObjectiveSummary
    sd: ObjectiveSummary


@dataclass(frozen=True)
class TTestResult:
    t: float
    dof: float
    p: float


def summarize(result) -> ObjectiveSummary:
    """Reduce one run to the four objectives; no downtimes means zeros."""
    downs = result.downtimes
    travels = result.travel_totals
    if downs:
        avg_d = sum(downs) / len(downs)
        max_d = max(downs)
    else:
        avg_d = max_d = 0.0
    avg_t = sum(travels) / len(travels) if travels else 0.0
    max_t = max(travels) if travels else 0.0
    return ObjectiveSummary(avg_d, max_d, avg_t, max_t)


def _mean_sd(values: Sequence[float]) -> tuple[float, float]:
    n = len(values)
    mean = sum(values) / n
    if n < 2:
        return mean, 0.0
    var = sum((x - mean) ** 2 for x in values) / (n - 1)
    return mean, math.sqrt(var)


def aggregate(batch: Sequence[ObjectiveSummary]) -> BatchStats:
    """Field-wise mean and sample standard deviation over a batch."""
    if not batch:
        raise ValueError("cannot aggregate an empty batch")
    means = {}
    sds = {}
    for field in ObjectiveSummary.FIELDS:
        means[field], sds[field] = _mean_sd([getattr(s, field) for s in batch])
    return BatchStats(ObjectiveSummary(**means), ObjectiveSummary(**sds))


def welch_t_test(a: Sequence[float], b: Sequence[float]) -> TTestResult:
    """Welch's unequal-variance two-sided t-test.

    Requires two samples of size >= 2 with at least one nonzero variance.
    The p-value comes from the t-distribution via the identity
    p = I_x(dof/2, 1/2) with x = dof / (dof + t^2).
    """
    na, nb = len(a), len(b)
    if na < 2 or nb < 2:
        raise ValueError("both samples need at least 2 elements")
    ma, mb = sum(a) / na, sum(b) / nb
    va = sum((x - ma) ** 2 for x in a) / (na - 1)
    vb = sum((x - mb) ** 2 for x in b) / (nb - 1)
    if va == 0.0 and vb == 0.0:
        raise ValueError("both samples have zero variance")
    sa, sb = va / na, vb / nb
    se2 = sa + sb
    t = (ma - mb) / math.sqrt(se2)
    dof = se2 * se2 / (sa * sa / (na - 1) + sb * sb / (nb - 1))
    x = dof / (dof + t * t)
    p = regularized_incomplete_beta(0.5 * dof, 0.5, x)
    return TTestResult(t, dof, min(p, 1.0))


def regularized_incomplete_beta(a: float, b: float, x: float) -> float:
    """I_x(a, b) by Lentz's continued fraction, |error| < 1e-8.

    Uses the symmetry I_x(a,b) = 1 - I_{1-x}(b,a) to keep the fraction in
    its fast-converging regime.
    """
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    ln_front = (
        math.lgamma(a + b)
        - math.lgamma(a)
        - math.lgamma(b)
        + a * math.log(x)
        + b * math.log1p(-x)
    )
    front = math.exp(ln_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _beta_cf(a, b, x) / a
    return 1.0 - front * _beta_cf(b, a, 1.0 - x) / b


def _beta_cf(a: float, b: float, x: float, max_iter: int = 300, eps: float = 1e-14):
    tiny = 1e-300
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < tiny:
        d = tiny
    d = 1.0 / d
    h = d
    for m in range(1, max_iter + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < eps:
            break
    return h
