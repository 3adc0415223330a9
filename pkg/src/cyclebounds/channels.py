"""Kraus-operator noise channels.

A channel is a list of operators K_i acting on the full register, applied as

    rho  ->  sum_i  K_i rho K_i^dag

Trace preservation (sum_i K_i^dag K_i = 1) is checked at construction.
Single-qubit constructors return 2x2 operator sets; use :func:`lift` (or
:func:`on_qubits`) to place them on a register.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .gates import embed_operator
from .linalg import dagger


@dataclass(frozen=True)
class KrausChannel:
    operators: tuple[np.ndarray, ...]
    label: str = "channel"

    def __post_init__(self):
        ops = tuple(np.asarray(k, dtype=complex) for k in self.operators)
        if not ops:
            raise ValueError("channel needs at least one Kraus operator")
        d = ops[0].shape[0]
        for k in ops:
            if k.shape != (d, d):
                raise ValueError("Kraus operators must share one square shape")
        total = sum(dagger(k) @ k for k in ops)
        if np.max(np.abs(total - np.eye(d))) > 1e-10:
            raise ValueError("Kraus operators do not sum to identity within 1e-10")
        object.__setattr__(self, "operators", ops)

    @property
    def dim(self) -> int:
        return self.operators[0].shape[0]

    def apply(self, rho: np.ndarray) -> np.ndarray:
        if rho.shape != (self.dim, self.dim):
            raise ValueError(f"state dim {rho.shape} does not match channel dim {self.dim}")
        out = np.zeros_like(rho)
        for k in self.operators:
            out += k @ rho @ dagger(k)
        return out

    def is_unital(self, tol: float = 1e-10) -> bool:
        total = sum(k @ dagger(k) for k in self.operators)
        return bool(np.max(np.abs(total - np.eye(self.dim))) <= tol)


def amplitude_damping(gamma: float) -> KrausChannel:
    """Decay toward |0> with probability gamma per application.

    K0 = [[1, 0], [0, sqrt(1-gamma)]],  K1 = [[0, sqrt(gamma)], [0, 0]]
    """
    if not 0.0 <= gamma <= 1.0:
        raise ValueError(f"gamma must be in [0, 1], got {gamma}")
    k0 = np.array([[1.0, 0.0], [0.0, np.sqrt(1.0 - gamma)]], dtype=complex)
    k1 = np.array([[0.0, np.sqrt(gamma)], [0.0, 0.0]], dtype=complex)
    return KrausChannel((k0, k1), label=f"amplitude_damping({gamma})")


def depolarizing(p: float) -> KrausChannel:
    """Mix toward the maximally mixed state: rho -> (1-p) rho + p 1/2."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must be in [0, 1], got {p}")
    eye = np.eye(2, dtype=complex)
    x = np.array([[0, 1], [1, 0]], dtype=complex)
    y = np.array([[0, -1j], [1j, 0]], dtype=complex)
    z = np.array([[1, 0], [0, -1]], dtype=complex)
    ops = (
        np.sqrt(1.0 - 0.75 * p) * eye,
        np.sqrt(p / 4.0) * x,
        np.sqrt(p / 4.0) * y,
        np.sqrt(p / 4.0) * z,
    )
    return KrausChannel(ops, label=f"depolarizing({p})")


def dephasing(p: float) -> KrausChannel:
    """Phase flip with probability p: rho -> (1-p) rho + p Z rho Z."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must be in [0, 1], got {p}")
    eye = np.eye(2, dtype=complex)
    z = np.array([[1, 0], [0, -1]], dtype=complex)
    return KrausChannel((np.sqrt(1.0 - p) * eye, np.sqrt(p) * z), label=f"dephasing({p})")


def custom(operators, label: str = "custom") -> KrausChannel:
    return KrausChannel(tuple(operators), label=label)


def lift(channel: KrausChannel, targets, n_qubits: int) -> KrausChannel:
    """Embed a small channel onto specific qubits of a register."""
    ops = tuple(embed_operator(k, tuple(targets), n_qubits) for k in channel.operators)
    return KrausChannel(ops, label=f"{channel.label}@{tuple(targets)}")


def on_qubits(channel: KrausChannel, qubits, n_qubits: int) -> list[KrausChannel]:
    """One lifted copy of a single-qubit channel per listed qubit."""
    if channel.dim != 2:
        raise ValueError("on_qubits expects a single-qubit channel")
    return [lift(channel, (q,), n_qubits) for q in qubits]
