"""Cycle-by-cycle state evolution and recurrence-probability series."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .channels import KrausChannel
from .gates import CycleSpec, cycle_unitary
from .linalg import DensityMatrix, dagger, hs_overlap, partial_trace, tensor_product


@dataclass(frozen=True)
class RecurrenceSeries:
    """Estimates of R_k = tr[rho_0 rho_k] for k = 0 .. len-1.

    ``shots = 0`` marks an exact series (all sigmas zero).
    """

    values: np.ndarray
    sigmas: np.ndarray
    shots: int = 0

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        s = np.asarray(self.sigmas, dtype=float)
        if v.ndim != 1 or s.shape != v.shape:
            raise ValueError("values and sigmas must be equal-length 1-d arrays")
        if v.size == 0:
            raise ValueError("series must not be empty")
        if np.min(v) < -1e-9 or np.max(v) > 1.0 + 1e-9:
            raise ValueError("recurrence values must lie in [0, 1]")
        v = np.clip(v, 0.0, 1.0)
        if np.min(s) < 0.0:
            raise ValueError("sigmas must be nonnegative")
        if self.shots < 0:
            raise ValueError("shots must be >= 0")
        v.flags.writeable = False
        s.flags.writeable = False
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "sigmas", s)

    def __len__(self) -> int:
        return int(self.values.size)

    @property
    def exact(self) -> bool:
        return self.shots == 0


def evolve(
    rho0_sys: DensityMatrix,
    spec: CycleSpec,
    channels: Sequence[KrausChannel] = (),
    n_cycles: int = 0,
) -> list[DensityMatrix]:
    """Run ``n_cycles`` periods and return the system states rho_0 .. rho_n.

    Each cycle applies the (possibly drifting) cycle unitary to the joint
    system+environment state and then every channel in order.  Channels act
    on the joint register, so lift single-qubit channels first.
    """
    if n_cycles < 0:
        raise ValueError("n_cycles must be >= 0")
    sys_dim = 2 ** spec.n_system_qubits
    if rho0_sys.dim != sys_dim:
        raise ValueError(f"initial state dim {rho0_sys.dim} != 2^{spec.n_system_qubits}")
    joint_dim = 2 ** spec.n_qubits
    for ch in channels:
        if ch.dim != joint_dim:
            raise ValueError(f"channel {ch.label} dim {ch.dim} != register dim {joint_dim}")
    rho0_sys.validate()
    if spec.env_initial is not None:
        spec.env_initial.validate()

    sys_dims = (2,) * spec.n_system_qubits
    joint_dims = (2,) * spec.n_qubits
    keep = range(spec.n_system_qubits)
    fixed_u = None if spec.has_drift else cycle_unitary(spec, 1)

    states = [DensityMatrix(rho0_sys.matrix.copy(), sys_dims)]
    if spec.n_env_qubits == 0:
        sigma = rho0_sys.matrix.copy()
        for k in range(1, n_cycles + 1):
            u = fixed_u if fixed_u is not None else cycle_unitary(spec, k)
            sigma = u @ sigma @ dagger(u)
            for ch in channels:
                sigma = ch.apply(sigma)
            states.append(DensityMatrix(sigma, sys_dims))
        return states

    if spec.env_mode == "persistent":
        sigma = tensor_product(rho0_sys.matrix, spec.env_initial.matrix)
        for k in range(1, n_cycles + 1):
            u = fixed_u if fixed_u is not None else cycle_unitary(spec, k)
            sigma = u @ sigma @ dagger(u)
            for ch in channels:
                sigma = ch.apply(sigma)
            states.append(partial_trace(DensityMatrix(sigma, joint_dims), keep))
        return states

    # reset_each_cycle: trace out and re-prepare the environment every period
    current = rho0_sys
    for k in range(1, n_cycles + 1):
        u = fixed_u if fixed_u is not None else cycle_unitary(spec, k)
        sigma = tensor_product(current.matrix, spec.env_initial.matrix)
        sigma = u @ sigma @ dagger(u)
        for ch in channels:
            sigma = ch.apply(sigma)
        current = partial_trace(DensityMatrix(sigma, joint_dims), keep)
        states.append(current)
    return states


def recurrence_exact(rho0: DensityMatrix, rhos: Sequence[DensityMatrix]) -> RecurrenceSeries:
    """Exact R_k = tr[rho_0 rho_k] for each state in ``rhos``."""
    values = np.array([hs_overlap(rho0.matrix, r.matrix) for r in rhos])
    return RecurrenceSeries(values, np.zeros_like(values), shots=0)


def recurrence_sampled(series: RecurrenceSeries, shots: int, seed: int) -> RecurrenceSeries:
    """Binomial finite-shot estimate of an exact series.

    Each R_k is replaced by Binomial(shots, R_k)/shots.  The reported
    sigma_k uses the Agresti-Coull (plus-4) variance, i.e. the plug-in
    deviation evaluated at v~ = (x+2)/(shots+4) instead of x/shots.  The
    plain Wald deviation collapses when a count lands on 0 or ``shots``,
    and that collapse is *correlated* with the value fluctuation itself,
    which turns 3-sigma detection thresholds into coin flips near the
    extremes; the adjusted variance keeps thresholds meaningful there.
    """
    if shots < 1:
        raise ValueError("shots must be >= 1")
    rng = np.random.default_rng(seed)
    x = rng.binomial(shots, series.values)
    v = x / shots
    v_adj = (x + 2.0) / (shots + 4.0)
    sig = np.sqrt(v_adj * (1.0 - v_adj) / shots)
    return RecurrenceSeries(v, sig, shots=shots)


def gibbs_qubit(beta: float, gap: float = 1.0) -> DensityMatrix:
    """Thermal qubit diag(1, e^{-beta*gap}) / Z; beta may be math.inf."""
    if gap <= 0.0:
        raise ValueError("gap must be positive")
    if beta != beta or beta < 0.0:
        raise ValueError("beta must be >= 0 or +inf")
    if math.isinf(beta):
        return DensityMatrix(np.diag([1.0, 0.0]).astype(complex), (2,))
    w = math.exp(-beta * gap)
    return DensityMatrix(np.diag([1.0 / (1.0 + w), w / (1.0 + w)]).astype(complex), (2,))


_QUBIT_VECTORS = {
    "0": np.array([1.0, 0.0], dtype=complex),
    "1": np.array([0.0, 1.0], dtype=complex),
    "+": np.array([1.0, 1.0], dtype=complex) / np.sqrt(2.0),
    "-": np.array([1.0, -1.0], dtype=complex) / np.sqrt(2.0),
}


def product_state(labels: str) -> DensityMatrix:
    """Pure product state from a label string over {0, 1, +, -}."""
    if not labels:
        raise ValueError("empty state label")
    vec = np.array([1.0], dtype=complex)
    for ch in labels:
        if ch not in _QUBIT_VECTORS:
            raise ValueError(f"unknown qubit label {ch!r}")
        vec = np.kron(vec, _QUBIT_VECTORS[ch])
    return DensityMatrix(np.outer(vec, vec.conj()), (2,) * len(labels))


def gibbs_product(betas: Sequence[float], gap: float = 1.0) -> DensityMatrix:
    """Tensor product of thermal qubits, one per listed beta."""
    mats = [gibbs_qubit(b, gap).matrix for b in betas]
    return DensityMatrix(tensor_product(*mats), (2,) * len(betas))
