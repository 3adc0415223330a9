"""Multi-cycle recurrence inequalities: coefficients, truncation, optimization.

For a state driven by a fixed period, the recurrence probabilities
R_k = tr[rho_0 rho_k] of any unitary evolution obey a family of linear
inequalities sum_k w_k R_k >= 0 with sum_k w_k = 0.  Every inequality here
comes from one recipe: pick stencil weights alpha_0..alpha_N, form
r_0 = sum_j alpha_j rho_j, expand tr[r_0 (r_0 - r_M)] >= 0, and rewrite
each tr[rho_a rho_b] as R_|a-b|.  The n-th member of the main family uses
the (n-1)-th discrete-derivative stencil with M = 1 and is normalized to
sum_k |w_k| = 1; its exact weights are

    w_0 = C(2n, n) / 4^n,     w_k = 2 (-1)^k C(2n, n+k) / 4^n .

Violation of any member certifies that the evolution is not a fixed
repeated unitary (noise, drift, or environment coupling).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .evolve import RecurrenceSeries
from .linalg import ConvergenceError, dagger, hermitian_eig, hermitianize, is_unitary
from .special import erfc

_EXACT_N_MAX = 30  # up to here coefficients come from integer binomials


@dataclass(frozen=True)
class StencilSpec:
    """Stencil weights alpha_0..alpha_N and the comparison offset M >= 1."""

    alphas: tuple[float, ...]
    m: int = 1

    def __post_init__(self):
        object.__setattr__(self, "alphas", tuple(float(a) for a in self.alphas))
        if not self.alphas:
            raise ValueError("stencil needs at least one weight")
        if all(a == 0.0 for a in self.alphas):
            raise ValueError("stencil weights are all zero")
        if self.m < 1:
            raise ValueError("comparison offset m must be >= 1")


@dataclass(frozen=True)
class InequalityCoefficients:
    """Weights w_0..w_K of one inequality sum_k w_k R_k >= 0."""

    w: np.ndarray
    normalized: bool = False

    def __post_init__(self):
        w = np.asarray(self.w, dtype=float).copy()
        if w.ndim != 1 or w.size < 2:
            raise ValueError("need a 1-d weight vector with at least two entries")
        w.flags.writeable = False
        object.__setattr__(self, "w", w)

    def __len__(self) -> int:
        return int(self.w.size)

    def normalize(self) -> "InequalityCoefficients":
        total = float(np.sum(np.abs(self.w)))
        if total == 0.0:
            raise ValueError("cannot normalize zero coefficients")
        return InequalityCoefficients(self.w / total, normalized=True)


def expand_stencil(stencil: StencilSpec) -> InequalityCoefficients:
    """Turn a stencil into inequality weights via the quadratic-form recipe.

    w_k collects [|i-j| = k] - [|j+M-i| = k] over all weight pairs, so the
    weights always sum to zero exactly.
    """
    alphas = stencil.alphas
    n = len(alphas) - 1
    w = np.zeros(n + stencil.m + 1)
    for i, ai in enumerate(alphas):
        for j, aj in enumerate(alphas):
            prod = ai * aj
            w[abs(i - j)] += prod
            w[abs(j + stencil.m - i)] -= prod
    scale = float(np.sum(np.abs(w)))
    if abs(float(np.sum(w))) > 1e-12 * max(1.0, scale):
        raise AssertionError("stencil weights failed the zero-sum identity")
    return InequalityCoefficients(w, normalized=False)


def derivative_stencil(order: int) -> StencilSpec:
    """Shifted discrete-derivative weights: (-1)^(order-j) C(order, j)."""
    if order < 0:
        raise ValueError("order must be >= 0")
    alphas = [(-1) ** (order - j) * math.comb(order, j) for j in range(order + 1)]
    return StencilSpec(tuple(float(a) for a in alphas), m=1)


def sn_exact_fractions(n: int) -> list[Fraction]:
    """Exact rational weights of the n-th family member (any n, slow for big n)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    denom = 4 ** n
    out = [Fraction(math.comb(2 * n, n), denom)]
    for k in range(1, n + 1):
        out.append(Fraction(2 * (-1) ** k * math.comb(2 * n, n + k), denom))
    return out


_SN_CACHE: dict[int, np.ndarray] = {}


def _sn_weights(n: int) -> np.ndarray:
    cached = _SN_CACHE.get(n)
    if cached is not None:
        return cached
    if n <= _EXACT_N_MAX:
        w = np.array([float(f) for f in sn_exact_fractions(n)])
    else:
        # multiplicative recurrence; every factor is < 1 so it cannot overflow
        j = np.arange(1, n + 1, dtype=float)
        w0 = float(np.prod((2.0 * j - 1.0) / (2.0 * j)))  # C(2n,n)/4^n
        k = np.arange(0, n, dtype=float)
        mags = 2.0 * w0 * np.cumprod((n - k) / (n + k + 1.0))
        w = np.empty(n + 1)
        w[0] = w0
        w[1:] = mags * ((-1.0) ** np.arange(1, n + 1))
    w.flags.writeable = False
    _SN_CACHE[n] = w
    return w


def sn_coefficients(n: int) -> InequalityCoefficients:
    """Weights of the n-th family member; exact rationals through n = 30."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return InequalityCoefficients(_sn_weights(n), normalized=True)


def gaussian_sn_coefficients(n: int) -> InequalityCoefficients:
    """Large-n asymptotic weights: w_k ~ 2 (-1)^k e^{-k^2/n} / sqrt(pi n).

    Only asymptotically zero-sum; useful for error budgets, not as an
    exact inequality at small n.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    k = np.arange(0, n + 1, dtype=float)
    w = 2.0 * np.exp(-(k ** 2) / n) / math.sqrt(math.pi * n) * ((-1.0) ** k)
    w[0] = 1.0 / math.sqrt(math.pi * n)
    return InequalityCoefficients(w, normalized=False)


def _series_values(series) -> np.ndarray:
    if isinstance(series, RecurrenceSeries):
        return series.values
    return np.asarray(series, dtype=float)


def evaluate_inequality(coeffs: InequalityCoefficients, series) -> float:
    """sum_k w_k R_k over the full coefficient range."""
    r = _series_values(series)
    if r.size < len(coeffs):
        raise ValueError(f"series has {r.size} entries, need {len(coeffs)}")
    return float(np.dot(coeffs.w, r[: len(coeffs)]))


def truncated_sn(series, n: int) -> float:
    """The n-th family value using only the measured prefix, zero-filled tail.

    With L + 1 measured points this is sum_{k<=L} w_k R_k; the dropped tail
    is bounded by the matching :func:`truncation_plan` error bound.
    """
    r = _series_values(series)
    w = _sn_weights(n)
    m = min(r.size, n + 1)
    return float(np.dot(w[:m], r[:m]))


@dataclass(frozen=True)
class TruncationPlan:
    """Measurement budget: keep R_0..R_cutoff when evaluating member n."""

    n: int
    xi: float
    cutoff: int
    error_bound: float


def _bound_formula(n: int, xi: float) -> float:
    return erfc(xi) + math.exp(-xi * xi) / math.sqrt(math.pi * n)


def truncation_plan(
    n: int, xi: Optional[float] = None, epsilon: Optional[float] = None
) -> TruncationPlan:
    """Plan a truncated evaluation of member n.

    Give either the tail parameter ``xi`` directly (cutoff = ceil(xi sqrt(n)))
    or a target ``epsilon``; the bound erfc(xi) + e^{-xi^2}/sqrt(pi n) is
    monotone in xi, so epsilon is inverted by bisection.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if (xi is None) == (epsilon is None):
        raise ValueError("give exactly one of xi or epsilon")
    if xi is None:
        if not 0.0 < epsilon:
            raise ValueError("epsilon must be positive")
        lo, hi = 0.0, 30.0
        if _bound_formula(n, lo) <= epsilon:
            xi = lo
        elif _bound_formula(n, hi) >= epsilon:
            raise ValueError(f"epsilon {epsilon} is below the achievable bound")
        else:
            for _ in range(200):
                mid = 0.5 * (lo + hi)
                if _bound_formula(n, mid) > epsilon:
                    lo = mid
                else:
                    hi = mid
            xi = 0.5 * (lo + hi)
    if xi < 0.0:
        raise ValueError("xi must be >= 0")
    cutoff = int(math.ceil(xi * math.sqrt(n)))
    return TruncationPlan(n=n, xi=float(xi), cutoff=cutoff, error_bound=_bound_formula(n, xi))


def unitary_eigenphases(u: np.ndarray, tol: float = 1e-8) -> tuple[np.ndarray, np.ndarray]:
    """Eigenphases E_a and eigenvectors of a unitary, U v_a = e^{-i E_a} v_a.

    Diagonalizes the Hermitian part (U + U†)/2, then splits any degenerate
    cosine cluster with the anti-Hermitian part restricted to that cluster.
    """
    u = np.asarray(u, dtype=complex)
    if not is_unitary(u, 1e-9):
        raise ValueError("matrix is not unitary within 1e-9")
    hc = hermitianize(0.5 * (u + dagger(u)))
    hs = hermitianize((u - dagger(u)) / 2j)
    eig = hermitian_eig(hc)
    v = eig.vectors.copy()
    d = u.shape[0]
    start = 0
    while start < d:
        stop = start + 1
        while stop < d and eig.values[stop] - eig.values[start] <= tol:
            stop += 1
        if stop - start > 1:
            block = v[:, start:stop]
            sub = hermitian_eig(hermitianize(dagger(block) @ hs @ block))
            v[:, start:stop] = block @ sub.vectors
        start = stop
    lam = np.einsum("ia,ij,ja->a", v.conj(), u, v)
    residual = np.max(np.abs(u @ v - v * lam))
    if residual > 1e-7:
        raise ConvergenceError(f"unitary diagonalization residual {residual:.2e}")
    phases = -np.angle(lam)
    return phases, v


def spectral_oracle(u: np.ndarray, rho0: np.ndarray, ns: Sequence[int]) -> np.ndarray:
    """Family values for a fixed unitary via its spectrum.

    In the eigenbasis of U every member reduces to a positive combination,
    S_n = sum_{a,b} |<a|rho_0|b>|^2 (sin^2(Delta_ab / 2))^n, which makes
    nonnegativity and monotone decrease in n explicit.
    """
    phases, v = unitary_eigenphases(u)
    rho_eig = dagger(v) @ np.asarray(rho0, dtype=complex) @ v
    p = np.abs(rho_eig) ** 2
    delta = phases[:, None] - phases[None, :]
    s = np.sin(0.5 * delta) ** 2
    out = np.empty(len(ns))
    for i, n in enumerate(ns):
        if n < 1:
            raise ValueError("members are indexed from n = 1")
        out[i] = float(np.sum(p * s ** n))
    return out


@dataclass(frozen=True)
class OptimizedBoundResult:
    """Minimum of the quadratic three-cycle form L(x, y) over stencils 1 + x + y.

    ``value`` is L at the stationary point (the minimum when convex, a saddle
    when hyperbolic, absent when degenerate).  ``simplified_value`` is the
    sign-equivalent quartic

        R0^2 - R0 (R1 + R3) - (R1 - R2)^2 + R1 R3

    which is a valid detector whenever R0 - R2 >= 0 and the second family
    member is nonnegative.  ``discriminant`` is the Hessian determinant of L,
    identically (R0 - R2)(3 R0 - 4 R1 + R2).
    """

    x_min: Optional[float]
    y_min: Optional[float]
    value: Optional[float]
    simplified_value: float
    discriminant: float
    shape: str


def optimized_three_cycle(series, tol: Optional[float] = None) -> OptimizedBoundResult:
    """Optimize the three-cycle stencil rho_0 + x rho_1 + y rho_2 against R_0..R_3.

    L(x, y) = (1 - x + x^2 + y^2 - x y) R0 + (-1 + 2 x - y - (x - y)^2) R1
              + (-x + 2 y - x y) R2 - y R3

    holds >= 0 for every (x, y) under fixed unitary driving, so its minimum
    is the sharpest member of this three-parameter family.  A paraboloid
    opening downward (possible only when R1 > R0, itself already a
    violation) carries no finite minimum and reports shape "degenerate".
    """
    r = _series_values(series)
    if r.size < 4:
        raise ValueError("need R_0..R_3 for the optimized three-cycle bound")
    r0, r1, r2, r3 = (float(x) for x in r[:4])
    if tol is None:
        tol = 1e-12 * max(1.0, r0 * r0)

    # quadratic form data: L = c + g.(x,y) + 1/2 (x,y) H (x,y)^T
    half_hxx = r0 - r1                  # = 1/2 d^2L/dx^2 = 1/2 d^2L/dy^2
    hxy = 2.0 * r1 - r0 - r2            # = d^2L/dxdy
    gx = 2.0 * r1 - r0 - r2
    gy = 2.0 * r2 - r1 - r3
    c = r0 - r1
    disc = (r0 - r2) * (3.0 * r0 - 4.0 * r1 + r2)

    simplified = r0 * r0 - r0 * (r1 + r3) - (r1 - r2) ** 2 + r1 * r3

    if abs(disc) <= tol:
        return OptimizedBoundResult(None, None, None, simplified, disc, "degenerate")
    if disc > 0.0 and half_hxx <= 0.0:
        return OptimizedBoundResult(None, None, None, simplified, disc, "degenerate")
    # stationary point of the quadratic: H v = -g, det H = disc
    x_min = -(2.0 * half_hxx * gx - hxy * gy) / disc
    y_min = -(-hxy * gx + 2.0 * half_hxx * gy) / disc
    value = c + 0.5 * (gx * x_min + gy * y_min)
    shape = "convex" if disc > 0.0 else "hyperbolic"
    return OptimizedBoundResult(x_min, y_min, value, simplified, disc, shape)


def evaluate_three_cycle(series, x: float, y: float) -> float:
    """L(x, y) evaluated directly from R_0..R_3."""
    r = _series_values(series)
    if r.size < 4:
        raise ValueError("need R_0..R_3")
    r0, r1, r2, r3 = (float(v) for v in r[:4])
    return (
        (1.0 - x + x * x + y * y - x * y) * r0
        + (-1.0 + 2.0 * x - y - (x - y) ** 2) * r1
        + (-x + 2.0 * y - x * y) * r2
        - y * r3
    )
