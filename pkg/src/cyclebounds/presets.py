"""Pinned experiment constructions used throughout the test suite and CLI.

Each preset bundles a cycle specification, an initial system state, and any
noise channels into an :class:`Experiment`.  Presets accept a small dict of
overridable parameters (angles, damping rates, toggles); everything else is
frozen so that golden values stay reproducible.

Registry
--------
``drift4q``
    Four qubits from |0000>, one cycle = RX(0.1) on every qubit followed by
    RXX(0.3) on the chain pairs (0,1), (1,2), (2,3).  Every angle drifts
    linearly: the RXX angles by ``dtheta`` per cycle and the RX angles by
    1.5 * ``dtheta``, modelling slow miscalibration of all controls at once.
``cnot-env``
    Two system qubits from |+1> driven by CNOT(1 -> 0), plus one persistent
    environment qubit in |0> coupled through a controlled-RX kick on (1, 2)
    and a feedback controlled-RX on (2, 1).  ``decoupled`` removes both
    couplings, leaving the bare drive.
``santiago-like``
    Two qubits from |00>, one cycle = Ry(theta) on qubit 0 then CNOT(0 -> 1),
    with per-cycle amplitude damping of rate ``gamma`` on both qubits.
``hot-env``
    Two-qubit working medium prepared in Gibbs states at betas (0.6, 3.5)
    with a persistent environment qubit at beta 0.5.  One cycle partially
    swaps the two system qubits (angle ``theta``) and then partially swaps
    the cold qubit with the environment (angle ``phi``).  ``couple=False``
    drops the environment swap.
``toffoli``
    Three qubits from |110>, one Toffoli per cycle.
``toffoli2``
    Same input with two Toffolis per cycle; the cycle unitary is the
    identity, so the recurrence series is constant 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional

import numpy as np

from .channels import KrausChannel, amplitude_damping, on_qubits
from .evolve import gibbs_product, gibbs_qubit, product_state
from .gates import CycleSpec, GateSpec
from .linalg import DensityMatrix


@dataclass(frozen=True)
class Experiment:
    """A fully specified runnable experiment."""

    name: str
    spec: CycleSpec
    rho0: DensityMatrix
    channels: tuple[KrausChannel, ...] = ()
    params: Mapping[str, float | bool] = field(default_factory=dict)


def partial_swap(angle: float) -> np.ndarray:
    """Two-qubit partial swap cos(a/2) I + i sin(a/2) SWAP."""
    swap = np.array(
        [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex
    )
    return np.cos(angle / 2.0) * np.eye(4, dtype=complex) + 1j * np.sin(angle / 2.0) * swap


def controlled_rx(angle: float) -> np.ndarray:
    """Controlled-RX(angle): identity on the control-0 block."""
    c, s = np.cos(angle / 2.0), np.sin(angle / 2.0)
    u = np.eye(4, dtype=complex)
    u[2:, 2:] = np.array([[c, -1j * s], [-1j * s, c]])
    return u


def _drift4q(params: Mapping) -> Experiment:
    dtheta = float(params["dtheta"])
    gates = tuple(
        GateSpec(kind="RX", targets=(q,), theta0=0.1, drift=1.5 * dtheta)
        for q in range(4)
    ) + tuple(
        GateSpec(kind="RXX", targets=pair, theta0=0.3, drift=dtheta)
        for pair in ((0, 1), (1, 2), (2, 3))
    )
    spec = CycleSpec(n_system_qubits=4, gates=gates)
    return Experiment("drift4q", spec, product_state("0000"), params=dict(params))


def _cnot_env(params: Mapping) -> Experiment:
    phi = float(params["phi"])
    decoupled = bool(params["decoupled"])
    drive = (GateSpec(kind="CNOT", targets=(1, 0)),)
    if decoupled:
        spec = CycleSpec(n_system_qubits=2, gates=drive)
    else:
        coupling = (
            GateSpec(kind="CUSTOM", targets=(1, 2), matrix=controlled_rx(phi)),
            GateSpec(kind="CUSTOM", targets=(2, 1), matrix=controlled_rx(phi)),
        )
        spec = CycleSpec(
            n_system_qubits=2,
            gates=drive + coupling,
            n_env_qubits=1,
            env_initial=product_state("0"),
            env_mode="persistent",
        )
    return Experiment("cnot-env", spec, product_state("+1"), params=dict(params))


def _santiago_like(params: Mapping) -> Experiment:
    theta = float(params["theta"])
    gamma = float(params["gamma"])
    gates = (
        GateSpec(kind="RY", targets=(0,), theta0=theta),
        GateSpec(kind="CNOT", targets=(0, 1)),
    )
    spec = CycleSpec(n_system_qubits=2, gates=gates)
    channels = tuple(on_qubits(amplitude_damping(gamma), (0, 1), 2))
    return Experiment("santiago-like", spec, product_state("00"), channels, dict(params))


def _hot_env(params: Mapping) -> Experiment:
    theta = float(params["theta"])
    phi = float(params["phi"])
    couple = bool(params["couple"])
    gates = (GateSpec(kind="CUSTOM", targets=(0, 1), matrix=partial_swap(theta)),)
    if couple:
        gates += (GateSpec(kind="CUSTOM", targets=(1, 2), matrix=partial_swap(phi)),)
        spec = CycleSpec(
            n_system_qubits=2,
            gates=gates,
            n_env_qubits=1,
            env_initial=gibbs_qubit(0.5),
            env_mode="persistent",
        )
    else:
        spec = CycleSpec(n_system_qubits=2, gates=gates)
    return Experiment("hot-env", spec, gibbs_product([0.6, 3.5]), params=dict(params))


def _toffoli(params: Mapping) -> Experiment:
    spec = CycleSpec(
        n_system_qubits=3, gates=(GateSpec(kind="TOFFOLI", targets=(0, 1, 2)),)
    )
    return Experiment("toffoli", spec, product_state("110"), params=dict(params))


def _toffoli2(params: Mapping) -> Experiment:
    gates = (
        GateSpec(kind="TOFFOLI", targets=(0, 1, 2)),
        GateSpec(kind="TOFFOLI", targets=(0, 1, 2)),
    )
    spec = CycleSpec(n_system_qubits=3, gates=gates)
    return Experiment("toffoli2", spec, product_state("110"), params=dict(params))


_Builder = Callable[[Mapping], Experiment]

_REGISTRY: dict[str, tuple[_Builder, dict, str]] = {
    "drift4q": (
        _drift4q,
        {"dtheta": 1e-3},
        "4-qubit RX+RXX cycle with linear parameter drift",
    ),
    "cnot-env": (
        _cnot_env,
        {"phi": 1.2, "decoupled": False},
        "CNOT drive with controlled-RX kick/feedback to one environment qubit",
    ),
    "santiago-like": (
        _santiago_like,
        {"theta": 1.0, "gamma": 0.01},
        "Ry+CNOT cycle with per-cycle amplitude damping on both qubits",
    ),
    "hot-env": (
        _hot_env,
        {"theta": 3.0, "phi": 3.0, "couple": True},
        "two-temperature working medium partial-swapped with a warm environment",
    ),
    "toffoli": (_toffoli, {}, "|110> under one Toffoli per cycle (period 2)"),
    "toffoli2": (_toffoli2, {}, "|110> under two Toffolis per cycle (identity)"),
}


def preset_names() -> tuple[str, ...]:
    return tuple(_REGISTRY)


def preset_defaults(name: str) -> dict:
    """Default parameter dict for a preset (copy; mutate freely)."""
    if name not in _REGISTRY:
        raise KeyError(f"unknown preset {name!r}")
    return dict(_REGISTRY[name][1])


def preset_description(name: str) -> str:
    if name not in _REGISTRY:
        raise KeyError(f"unknown preset {name!r}")
    return _REGISTRY[name][2]


def build_preset(name: str, params: Optional[Mapping] = None) -> Experiment:
    """Construct a named experiment, overriding selected default parameters."""
    if name not in _REGISTRY:
        raise KeyError(f"unknown preset {name!r}; have {', '.join(_REGISTRY)}")
    builder, defaults, _ = _REGISTRY[name]
    merged = dict(defaults)
    if params:
        unknown = set(params) - set(defaults)
        if unknown:
            raise KeyError(f"preset {name!r} has no parameters {sorted(unknown)}")
        merged.update(params)
    return builder(merged)
