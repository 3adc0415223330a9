"""Violation detection with finite-shot uncertainty propagation.

A family value S = sum_k w_k R_k estimated from independent R_k carries

    sigma_S = sqrt( sum_k w_k^2 sigma_k^2 )

and counts as a detection when S < -3 sigma_S (strictly below -1e-12 for
exact series, where sigma_S = 0).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .bounds import (
    InequalityCoefficients,
    OptimizedBoundResult,
    _sn_weights,
    optimized_three_cycle,
    sn_coefficients,
)
from .evolve import RecurrenceSeries
from .special import erfc

_EXACT_EPS = 1e-12


def propagate(coeffs: InequalityCoefficients, series: RecurrenceSeries) -> tuple[float, float]:
    """Value and standard deviation of one inequality on a measured series."""
    k = len(coeffs)
    if len(series) < k:
        raise ValueError(f"series has {len(series)} entries, need {k}")
    value = float(np.dot(coeffs.w, series.values[:k]))
    sigma = float(math.sqrt(np.dot(coeffs.w ** 2, series.sigmas[:k] ** 2)))
    return value, sigma


def _violated(value: float, sigma: float, bias: float = 0.0) -> bool:
    if sigma > 0.0:
        return value + bias < -3.0 * sigma
    return value + bias < -_EXACT_EPS


@dataclass(frozen=True)
class MemberRecord:
    """One family member evaluated on the series."""

    n: int
    value: float
    sigma: float
    violated: bool


@dataclass(frozen=True)
class OptimizedRecord:
    """Three-cycle optimized bound with its governing detector form.

    The simplified quartic governs when its validity conditions
    (R0 - R2 >= 0 and member two >= 0) hold on the measured values;
    otherwise the stationary value of L governs.  ``sigma`` propagates
    measurement uncertainty through the simplified quartic including the
    second-order (Hessian) term, which dominates near R_k = 1 where the
    gradient vanishes.  ``bias`` is the expected inflation of the plug-in
    quartic, -(sigma_0^2 - sigma_1^2 - sigma_2^2); the violation verdict
    uses the debiased value so squared-noise terms such as
    E[(R1-R2)^2] = (R1-R2)^2 + sigma_1^2 + sigma_2^2 cannot fake a
    negative reading.
    """

    result: OptimizedBoundResult
    governing: str
    value: float
    sigma: float
    bias: float
    violated: bool


@dataclass(frozen=True)
class DetectionReport:
    records: tuple[MemberRecord, ...]
    optimized: Optional[OptimizedRecord]
    first_violation_n: Optional[int]


# Constant Hessian of the simplified quartic in (R_0, R_1, R_2, R_3).
_QUARTIC_HESSIAN = np.array(
    [
        [2.0, -1.0, 0.0, -1.0],
        [-1.0, -2.0, 2.0, 1.0],
        [0.0, 2.0, -2.0, 0.0],
        [-1.0, 1.0, 0.0, 0.0],
    ]
)


def _optimized_sigma(series: RecurrenceSeries) -> float:
    r = series.values[:4]
    s2 = series.sigmas[:4] ** 2
    grad = np.array(
        [
            2.0 * r[0] - r[1] - r[3],
            -r[0] - 2.0 * (r[1] - r[2]) + r[3],
            2.0 * (r[1] - r[2]),
            -r[0] + r[1],
        ]
    )
    first = float(np.dot(grad ** 2, s2))
    second = 0.5 * float(s2 @ (_QUARTIC_HESSIAN ** 2) @ s2)
    return math.sqrt(first + second)


def _optimized_record(series: RecurrenceSeries) -> OptimizedRecord:
    result = optimized_three_cycle(series)
    r = series.values
    s = series.sigmas
    member2 = float(np.dot(_sn_weights(2), r[:3]))
    # The raw stationary value is a ratio whose denominator vanishes at the
    # convex/saddle boundary, so it may only take over when the measured
    # data places the series in the saddle regime *decisively* (beyond its
    # own 3-sigma slack); anything borderline is treated as convex.
    sigma_02 = 3.0 * math.sqrt(s[0] ** 2 + s[2] ** 2)
    sigma_m2 = 3.0 * float(math.sqrt(np.dot(_sn_weights(2) ** 2, s[:3] ** 2)))
    conditions_hold = (r[0] - r[2]) >= -sigma_02 and member2 >= -sigma_m2
    if conditions_hold or result.value is None:
        governing, value = "simplified", result.simplified_value
    else:
        governing, value = "raw", result.value
    sigma = _optimized_sigma(series)
    s2 = series.sigmas[:4] ** 2
    bias = float(s2[1] + s2[2] - s2[0])  # debiasing shift, added before thresholding
    return OptimizedRecord(
        result=result,
        governing=governing,
        value=value,
        sigma=sigma,
        bias=bias,
        violated=_violated(value, sigma, bias=bias),
    )


def detect(
    series: RecurrenceSeries, n_max: int, include_optimized: bool = True
) -> DetectionReport:
    """Evaluate members 2..n_max (as far as the series allows) plus the
    optimized three-cycle bound, and report the earliest violation."""
    if n_max < 2:
        raise ValueError("n_max must be >= 2")
    top = min(n_max, len(series) - 1)
    records = []
    first: Optional[int] = None
    for n in range(2, top + 1):
        value, sigma = propagate(sn_coefficients(n), series)
        hit = _violated(value, sigma)
        records.append(MemberRecord(n=n, value=value, sigma=sigma, violated=hit))
        if hit and first is None:
            first = n
    optimized = None
    if include_optimized and n_max >= 3 and len(series) >= 4:
        optimized = _optimized_record(series)
        if optimized.violated:
            first = 3 if first is None else min(first, 3)
    return DetectionReport(records=tuple(records), optimized=optimized, first_violation_n=first)


@dataclass(frozen=True)
class ExtrapolatedRecord:
    """Member n evaluated from a measured prefix with a worst-case tail bound."""

    n: int
    value: float
    sigma: float
    error_bound: float
    violated: bool


@dataclass(frozen=True)
class ExtrapolationReport:
    cutoff: int
    records: tuple[ExtrapolatedRecord, ...]
    first_violation_n: Optional[int]


def extrapolate(series: RecurrenceSeries, n_max: int) -> ExtrapolationReport:
    """Evaluate members beyond the measured horizon by zero-filling the tail.

    With R_0..R_L measured, member n > L is estimated as
    sum_{k<=L} w_k R_k; the dropped tail is bounded by
    erfc(xi) + e^{-xi^2}/sqrt(pi n) at xi = L/sqrt(n).  A violation is
    claimed only when the estimate stays below threshold after *adding*
    the full bound, so every claim is conservative.
    """
    cutoff = len(series) - 1
    if cutoff < 1:
        raise ValueError("need at least R_0 and R_1")
    if n_max < cutoff:
        raise ValueError("n_max must reach the measured cutoff")
    records = []
    first: Optional[int] = None
    for n in range(cutoff, n_max + 1):
        w = _sn_weights(n)
        m = min(len(series), n + 1)
        value = float(np.dot(w[:m], series.values[:m]))
        sigma = float(math.sqrt(np.dot(w[:m] ** 2, series.sigmas[:m] ** 2)))
        if n <= cutoff:
            bound = 0.0
        else:
            xi = cutoff / math.sqrt(n)
            bound = erfc(xi) + math.exp(-xi * xi) / math.sqrt(math.pi * n)
        hit = _violated(value, sigma, bias=bound)
        records.append(
            ExtrapolatedRecord(n=n, value=value, sigma=sigma, error_bound=bound, violated=hit)
        )
        if hit and first is None:
            first = n
    return ExtrapolationReport(cutoff=cutoff, records=tuple(records), first_violation_n=first)
