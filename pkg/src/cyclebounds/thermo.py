"""Thermodynamic consistency checks the recurrence inequalities outperform.

Three baselines from two-point energy statistics — the exponential work
identity, the mean-work second-law bound, and passivity-style bounds — plus
the closed-form temperature threshold below which one cycle of heat exchange
cannot be flagged by any passivity argument.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence, Union

import numpy as np

from .channels import KrausChannel
from .linalg import DensityMatrix, dagger, hermitian_eig, hermitianize, matrix_fn, neg_log


@dataclass(frozen=True)
class WorkStatistics:
    """Two-point measurement statistics of one drive applied to a diagonal H.

    ``populations[i]`` is the chance of starting in energy eigenstate i;
    ``transitions[i, j]`` the chance of ending in j given i.  ``beta`` is the
    inverse temperature entering the exponential averages.
    """

    energies: tuple[float, ...]
    populations: tuple[float, ...]
    transitions: np.ndarray
    beta: float

    def __post_init__(self):
        e = tuple(float(x) for x in self.energies)
        p = tuple(float(x) for x in self.populations)
        t = np.asarray(self.transitions, dtype=float)
        if len(e) != len(p) or t.shape != (len(e), len(e)):
            raise ValueError("energies, populations and transitions sizes disagree")
        if abs(sum(p) - 1.0) > 1e-10 or min(p) < -1e-12:
            raise ValueError("populations must form a distribution")
        if np.min(t) < -1e-12 or np.max(np.abs(t.sum(axis=1) - 1.0)) > 1e-10:
            raise ValueError("transition rows must form distributions")
        if self.beta < 0.0:
            raise ValueError("beta must be >= 0")
        object.__setattr__(self, "energies", e)
        object.__setattr__(self, "populations", p)
        t.flags.writeable = False
        object.__setattr__(self, "transitions", t)

    @classmethod
    def from_unitary(
        cls,
        u: np.ndarray,
        energies: Sequence[float],
        beta: float,
        populations: Sequence[float] | None = None,
    ) -> "WorkStatistics":
        """Transition probabilities |<j|U|i>|^2; populations default to Gibbs."""
        u = np.asarray(u, dtype=complex)
        if populations is None:
            populations = gibbs_populations(beta, energies)
        t = np.abs(u.T) ** 2  # t[i, j] = |<j|U|i>|^2
        return cls(tuple(energies), tuple(populations), t, beta)


def gibbs_populations(beta: float, energies: Sequence[float]) -> tuple[float, ...]:
    """Thermal distribution over the given energies; beta may be math.inf."""
    e = np.asarray(energies, dtype=float)
    if math.isinf(beta):
        p = (e == e.min()).astype(float)
        return tuple(p / p.sum())
    logp = -beta * (e - e.min())
    p = np.exp(logp - _logsumexp(logp))
    return tuple(p)


def _logsumexp(x: np.ndarray) -> float:
    m = float(np.max(x))
    if math.isinf(m):
        return m
    return m + math.log(float(np.sum(np.exp(x - m))))


def jarzynski_moment(ws: WorkStatistics) -> float:
    """The exponential work average sum_{ij} p_i p_{i->j} e^{-beta (E_j - E_i)}.

    Equals 1 exactly when the populations are Gibbs at the same beta and the
    transition matrix is doubly stochastic.  Computed in the log domain once
    beta spreads the exponents past ~700 to dodge overflow.
    """
    e = np.asarray(ws.energies)
    de = e[None, :] - e[:, None]
    p = np.asarray(ws.populations)
    if ws.beta * (np.max(np.abs(de)) if de.size else 0.0) <= 700.0:
        return float(np.sum(p[:, None] * ws.transitions * np.exp(-ws.beta * de)))
    weights = p[:, None] * ws.transitions
    mask = weights > 0.0
    logs = np.log(weights[mask]) - ws.beta * de[mask]
    return math.exp(_logsumexp(logs))


def mean_work(ws: WorkStatistics) -> float:
    e = np.asarray(ws.energies)
    de = e[None, :] - e[:, None]
    return float(np.sum(np.asarray(ws.populations)[:, None] * ws.transitions * de))


def required_shots(ws: WorkStatistics) -> float:
    """e^{beta <W>}: sample count at which the exponential average converges.

    Returns math.inf when the exponent passes the double-precision range.
    """
    x = ws.beta * mean_work(ws)
    if x > 700.0:
        return math.inf
    return math.exp(x)


Evolution = Union[np.ndarray, KrausChannel]


def _apply_evolution(rho: np.ndarray, evolution: Evolution) -> np.ndarray:
    if isinstance(evolution, KrausChannel):
        return evolution.apply(rho)
    u = np.asarray(evolution, dtype=complex)
    return u @ rho @ dagger(u)


def second_law_gap(beta: float, energies: Sequence[float], evolution: Evolution) -> float:
    """Energy gained by driving a thermal state: tr[rho_f H] - tr[rho_beta H].

    Nonnegative for every unitary and every unital channel; a negative gap
    certifies non-unital external action.  ``beta = math.inf`` starts from
    the ground state.
    """
    e = np.asarray(energies, dtype=float)
    p = np.asarray(gibbs_populations(beta, energies))
    rho = np.diag(p).astype(complex)
    rho_f = _apply_evolution(rho, evolution)
    return float(np.real(np.diag(rho_f)) @ e - p @ e)


def one_minus_x(values: np.ndarray) -> np.ndarray:
    """Spectral map x -> 1 - x (a passivity witness usable for pure states)."""
    return 1.0 - np.asarray(values, dtype=float)


def reciprocal_reg(eps: float = 1e-6) -> Callable[[np.ndarray], np.ndarray]:
    """Spectral map factory x -> 1/(x + eps)."""

    def f(values: np.ndarray) -> np.ndarray:
        return 1.0 / (np.asarray(values, dtype=float) + eps)

    return f


_PASSIVITY_MAPS: dict[str, Callable[[np.ndarray], np.ndarray]] = {
    "neg_log": neg_log,
    "one_minus_x": one_minus_x,
    "reciprocal_reg": reciprocal_reg(),
}


def passivity_gap(rho0: DensityMatrix, rho_f: DensityMatrix, f="neg_log") -> float:
    """tr[rho_f B] - tr[rho_0 B] with B = f(rho_0) taken spectrally.

    Any antitone f makes B a monotone witness: the gap is >= 0 under every
    unitary and every unital channel.  ``f`` is a name from {neg_log,
    one_minus_x, reciprocal_reg} or a callable on the spectrum.
    """
    if rho0.dim != rho_f.dim:
        raise ValueError("states have different dimensions")
    fn = _PASSIVITY_MAPS.get(f, f) if isinstance(f, str) else f
    if isinstance(fn, str):
        raise ValueError(f"unknown passivity map {f!r}")
    b = matrix_fn(rho0.matrix, fn)
    return float(np.einsum("ij,ji->", rho_f.matrix - rho0.matrix, b).real)


@dataclass(frozen=True)
class UndetectabilityInput:
    env_energies: tuple[float, ...]
    rho_sys: DensityMatrix


def t_undetectable(inp: UndetectabilityInput) -> float:
    """Environment temperature below which one heat exchange evades passivity.

    T = (max E_env - min E_env) / (smallest gap of the -ln rho_sys spectrum).
    Eigenvalue duplicates collapse at 1e-9; a degenerate witness spectrum
    (e.g. a maximally mixed system) makes every temperature undetectable and
    returns math.inf.
    """
    if not inp.env_energies:
        raise ValueError("need at least one environment energy")
    vals = hermitian_eig(hermitianize(inp.rho_sys.matrix)).values
    b = np.sort(neg_log(vals))  # raises unless rho_sys is full rank
    distinct = [float(b[0])]
    for x in b[1:]:
        if x - distinct[-1] > 1e-9:
            distinct.append(float(x))
    if len(distinct) < 2:
        return math.inf
    min_gap = min(b - a for a, b in zip(distinct, distinct[1:]))
    spread = max(inp.env_energies) - min(inp.env_energies)
    return spread / min_gap
