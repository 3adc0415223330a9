"""Qubit gates, per-cycle drift, and circuit assembly.

Conventions, fixed once here and relied on everywhere else:

* qubit 0 is the leftmost / most significant bit of a basis label, so
  ``|110>`` is index 6 of an 8-dimensional register;
* rotations are ``R_a(theta) = exp(-i * theta/2 * sigma_a)`` for a in x, y, z;
* the two-qubit XX rotation carries a *positive* exponent,
  ``RXX(theta) = exp(+i * theta/2 * X (x) X)``, so ``RXX(pi) = i * X (x) X``;
* a drifting gate applied at cycle k (1-indexed) uses the angle
  ``theta0 + (k - 1) * drift``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .linalg import DensityMatrix, is_unitary

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)

_CNOT = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)

_FIXED_KINDS = {"CNOT", "TOFFOLI", "CSWAP"}
_ROTATION_KINDS = {"RX", "RY", "RZ", "RXX"}
_ARITY = {"RX": 1, "RY": 1, "RZ": 1, "RXX": 2, "CNOT": 2, "TOFFOLI": 3, "CSWAP": 3}


def _toffoli() -> np.ndarray:
    u = np.eye(8, dtype=complex)
    u[[6, 7]] = u[[7, 6]]
    return u


def _cswap() -> np.ndarray:
    u = np.eye(8, dtype=complex)
    u[[5, 6]] = u[[6, 5]]
    return u


@dataclass(frozen=True)
class GateSpec:
    """One gate in a cycle: kind, target qubits, and optional angle drift.

    ``targets`` are ordered: (control, target) for CNOT, (control, control,
    target) for TOFFOLI, (control, a, b) for CSWAP.  ``matrix`` is only for
    kind CUSTOM and must be unitary on 2**len(targets) dimensions.
    """

    kind: str
    targets: tuple[int, ...]
    theta0: float = 0.0
    drift: float = 0.0
    matrix: Optional[np.ndarray] = None

    def __post_init__(self):
        object.__setattr__(self, "targets", tuple(int(t) for t in self.targets))
        if len(set(self.targets)) != len(self.targets):
            raise ValueError(f"repeated target in {self.targets}")
        if self.kind == "CUSTOM":
            if self.matrix is None:
                raise ValueError("CUSTOM gate needs a matrix")
            m = np.asarray(self.matrix, dtype=complex)
            if m.shape != (2 ** len(self.targets),) * 2:
                raise ValueError(f"CUSTOM matrix shape {m.shape} does not fit {len(self.targets)} qubits")
            if not is_unitary(m, 1e-10):
                raise ValueError("CUSTOM matrix is not unitary within 1e-10")
            object.__setattr__(self, "matrix", m)
            if self.drift != 0.0:
                raise ValueError("CUSTOM gates cannot drift")
        elif self.kind in _ARITY:
            if len(self.targets) != _ARITY[self.kind]:
                raise ValueError(f"{self.kind} takes {_ARITY[self.kind]} targets, got {len(self.targets)}")
            if self.kind in _FIXED_KINDS and (self.theta0 != 0.0 or self.drift != 0.0):
                raise ValueError(f"{self.kind} takes no angle")
        else:
            raise ValueError(f"unknown gate kind {self.kind!r}")


def gate_unitary(gate: GateSpec, cycle_index: int) -> np.ndarray:
    """Matrix of ``gate`` on its own qubits at the given 1-indexed cycle."""
    if cycle_index < 1:
        raise ValueError(f"cycle_index is 1-based, got {cycle_index}")
    theta = gate.theta0 + (cycle_index - 1) * gate.drift
    c, s = np.cos(theta / 2.0), np.sin(theta / 2.0)
    if gate.kind == "RX":
        return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)
    if gate.kind == "RY":
        return np.array([[c, -s], [s, c]], dtype=complex)
    if gate.kind == "RZ":
        return np.array([[c - 1j * s, 0], [0, c + 1j * s]], dtype=complex)
    if gate.kind == "RXX":
        eye = np.eye(4, dtype=complex)
        return c * eye + 1j * s * np.kron(PAULI_X, PAULI_X)
    if gate.kind == "CNOT":
        return _CNOT.copy()
    if gate.kind == "TOFFOLI":
        return _toffoli()
    if gate.kind == "CSWAP":
        return _cswap()
    return gate.matrix.copy()


def embed_operator(op: np.ndarray, targets: Sequence[int], n_qubits: int) -> np.ndarray:
    """Lift an operator on ``targets`` to the full ``n_qubits`` register."""
    m = len(targets)
    if op.shape != (2 ** m, 2 ** m):
        raise ValueError(f"operator shape {op.shape} does not fit {m} qubits")
    if any(t < 0 or t >= n_qubits for t in targets):
        raise ValueError(f"targets {targets} out of range for {n_qubits} qubits")
    dim = 2 ** n_qubits
    big = np.kron(op, np.eye(2 ** (n_qubits - m), dtype=complex))
    order = list(targets) + [q for q in range(n_qubits) if q not in targets]
    idx = np.zeros(dim, dtype=np.intp)
    basis = np.arange(dim)
    for pos, q in enumerate(order):
        idx |= ((basis >> (n_qubits - 1 - q)) & 1) << (n_qubits - 1 - pos)
    return big[np.ix_(idx, idx)]


@dataclass(frozen=True)
class CycleSpec:
    """One driving period: an ordered gate list over system + environment qubits.

    Qubits 0..n_system_qubits-1 are the system; environment qubits follow.
    ``env_mode`` is "persistent" (the environment keeps its state across
    cycles) or "reset_each_cycle" (it is traced out and re-prepared in
    ``env_initial`` before every cycle).
    """

    n_system_qubits: int
    gates: tuple[GateSpec, ...]
    n_env_qubits: int = 0
    env_initial: Optional[DensityMatrix] = None
    env_mode: str = "persistent"

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        if self.n_system_qubits < 1:
            raise ValueError("need at least one system qubit")
        if self.n_env_qubits < 0:
            raise ValueError("n_env_qubits must be >= 0")
        if self.env_mode not in ("persistent", "reset_each_cycle"):
            raise ValueError(f"unknown env_mode {self.env_mode!r}")
        n = self.n_qubits
        for g in self.gates:
            if any(t >= n for t in g.targets):
                raise ValueError(f"gate {g.kind} targets {g.targets} exceed {n} qubits")
        if self.n_env_qubits > 0:
            if self.env_initial is None:
                raise ValueError("environment qubits need env_initial")
            if self.env_initial.dim != 2 ** self.n_env_qubits:
                raise ValueError("env_initial dimension does not match n_env_qubits")
        elif self.env_initial is not None:
            raise ValueError("env_initial given but n_env_qubits is 0")

    @property
    def n_qubits(self) -> int:
        return self.n_system_qubits + self.n_env_qubits

    @property
    def has_drift(self) -> bool:
        return any(g.drift != 0.0 for g in self.gates)


def cycle_unitary(spec: CycleSpec, cycle_index: int) -> np.ndarray:
    """Full-register unitary for one cycle; gates apply in list order."""
    dim = 2 ** spec.n_qubits
    u = np.eye(dim, dtype=complex)
    for g in spec.gates:
        u = embed_operator(gate_unitary(g, cycle_index), g.targets, spec.n_qubits) @ u
    return u
