"""JSON experiment configuration: schema, validation, and construction.

A config file is a UTF-8 JSON object.  All angles are radians, as plain JSON
numbers.  Top-level keys:

``experiment``
    Preset name (see :mod:`cyclebounds.presets`); mutually exclusive with
    ``circuit``.  ``params`` holds preset parameter overrides.
``circuit``
    Inline cycle description: ``{"n_system_qubits": int, "gates": [...],
    "n_env_qubits": int, "env_initial": state, "env_mode": str}``.  Each gate
    is ``{"kind": ..., "targets": [...], "theta0": num, "drift": num}``;
    kind ``CUSTOM`` instead carries ``"matrix": {"real": [[...]],
    "imag": [[...]]}``.
``initial_state``
    A basis string over ``01+-`` (one symbol per qubit), or
    ``{"gibbs": {"betas": [...], "gap": num}}``, or an explicit density
    matrix ``{"real": [[...]], "imag": [[...]]}``.  Required with
    ``circuit``; with ``experiment`` it overrides the preset's input.
``channels``
    List of ``{"kind": "amplitude_damping"|"depolarizing"|"dephasing",
    <rate>, "qubits": [...]}`` applied after each cycle, in order, acting
    independently on each listed qubit (default: every register qubit).
    Rate keys: ``gamma`` for amplitude damping, ``p`` otherwise.
``shots``
    Measurement shots per cycle; 0 (default) means exact values.
``seed``
    RNG seed for shot sampling (default 0).
``n_cycles``
    Number of driving periods to simulate (the series has n_cycles+1 points).
``bounds``
    ``{"sn_max": int, "optimized": bool, "truncation": {"xi": num} or
    {"epsilon": num}}``.  ``sn_max`` (default 10) caps the family members
    evaluated; members beyond the measured window come from zero-fill
    extrapolation.  ``truncation`` restricts the extrapolation to a measured
    prefix of the planned length instead of the full simulated series.

:class:`ConfigError` marks any schema problem, and is what the CLI turns
into exit code 2.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

import numpy as np

from .channels import KrausChannel, amplitude_damping, dephasing, depolarizing, on_qubits
from .evolve import gibbs_product, product_state
from .gates import CycleSpec, GateSpec
from .linalg import DensityMatrix
from .presets import Experiment, build_preset, preset_names

_STATE_SYMBOLS = set("01+-")
_CHANNEL_KINDS = {"amplitude_damping": ("gamma", amplitude_damping),
                  "depolarizing": ("p", depolarizing),
                  "dephasing": ("p", dephasing)}


class ConfigError(ValueError):
    """Schema violation or malformed input; maps to CLI exit code 2."""


@dataclass(frozen=True)
class BoundsConfig:
    sn_max: int = 10
    optimized: bool = True
    truncation_xi: Optional[float] = None
    truncation_epsilon: Optional[float] = None


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated experiment description, ready to build and run."""

    experiment: Optional[str]
    params: Mapping
    circuit: Optional[CycleSpec]
    initial_state: Optional[DensityMatrix]
    channels: tuple[KrausChannel, ...]
    shots: int
    seed: int
    n_cycles: int
    bounds: BoundsConfig = field(default_factory=BoundsConfig)


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise ConfigError(message)


def _as_int(obj, key: str, default=None, minimum=None):
    value = obj.get(key, default)
    _require(value is not None, f"missing required field {key!r}")
    _require(isinstance(value, int) and not isinstance(value, bool),
             f"{key!r} must be an integer, got {value!r}")
    if minimum is not None:
        _require(value >= minimum, f"{key!r} must be >= {minimum}, got {value}")
    return value


def _as_number(obj, key: str, default=None):
    value = obj.get(key, default)
    _require(value is not None, f"missing required field {key!r}")
    _require(isinstance(value, (int, float)) and not isinstance(value, bool)
             and math.isfinite(value), f"{key!r} must be a finite number, got {value!r}")
    return float(value)


def _parse_matrix(obj, context: str) -> np.ndarray:
    _require(isinstance(obj, dict) and "real" in obj,
             f"{context}: matrix needs {{'real': [[...]], 'imag': [[...]]}}")
    try:
        real = np.asarray(obj["real"], dtype=float)
        imag = np.asarray(obj.get("imag", np.zeros_like(real)), dtype=float)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{context}: non-numeric matrix entries ({exc})") from None
    _require(real.ndim == 2 and real.shape[0] == real.shape[1],
             f"{context}: matrix must be square, got shape {real.shape}")
    _require(imag.shape == real.shape, f"{context}: real/imag shapes differ")
    return real + 1j * imag


def parse_state(obj, n_qubits: int, context: str) -> DensityMatrix:
    """Parse an initial-state spec and check it against the qubit count."""
    if isinstance(obj, str):
        _require(len(obj) == n_qubits and set(obj) <= _STATE_SYMBOLS,
                 f"{context}: basis string must have {n_qubits} symbols from 01+-")
        return product_state(obj)
    _require(isinstance(obj, dict), f"{context}: expected string or object")
    if "gibbs" in obj:
        g = obj["gibbs"]
        _require(isinstance(g, dict) and isinstance(g.get("betas"), list),
                 f"{context}: gibbs form needs {{'betas': [...]}}")
        betas = [_as_number({"b": b}, "b") for b in g["betas"]]
        _require(len(betas) == n_qubits,
                 f"{context}: need {n_qubits} betas, got {len(betas)}")
        gap = _as_number(g, "gap", 1.0)
        return gibbs_product(betas, gap=gap)
    matrix = _parse_matrix(obj, context)
    dm = DensityMatrix(matrix, (2,) * n_qubits)
    try:
        dm.validate()
    except ValueError as exc:
        raise ConfigError(f"{context}: {exc}") from None
    return dm


def _parse_gate(obj, index: int) -> GateSpec:
    context = f"circuit.gates[{index}]"
    _require(isinstance(obj, dict), f"{context}: expected an object")
    kind = obj.get("kind")
    _require(isinstance(kind, str), f"{context}: missing gate kind")
    targets = obj.get("targets")
    _require(isinstance(targets, list) and targets
             and all(isinstance(t, int) and not isinstance(t, bool) and t >= 0
                     for t in targets),
             f"{context}: targets must be a list of qubit indices")
    matrix = None
    if kind.upper() == "CUSTOM":
        matrix = _parse_matrix(obj.get("matrix"), context)
    theta0 = _as_number(obj, "theta0", 0.0)
    drift = _as_number(obj, "drift", 0.0)
    try:
        return GateSpec(kind=kind.upper(), targets=tuple(targets),
                        theta0=theta0, drift=drift, matrix=matrix)
    except ValueError as exc:
        raise ConfigError(f"{context}: {exc}") from None


def _parse_circuit(obj, initial_state_obj) -> tuple[CycleSpec, DensityMatrix]:
    _require(isinstance(obj, dict), "'circuit' must be an object")
    n_sys = _as_int(obj, "n_system_qubits", minimum=1)
    n_env = _as_int(obj, "n_env_qubits", default=0, minimum=0)
    gates_obj = obj.get("gates")
    _require(isinstance(gates_obj, list) and gates_obj,
             "circuit.gates must be a non-empty list")
    gates = tuple(_parse_gate(g, i) for i, g in enumerate(gates_obj))
    env_initial = None
    if n_env > 0:
        _require("env_initial" in obj, "environment qubits need circuit.env_initial")
        env_initial = parse_state(obj["env_initial"], n_env, "circuit.env_initial")
    env_mode = obj.get("env_mode", "persistent")
    _require(initial_state_obj is not None,
             "inline circuits require a top-level 'initial_state'")
    rho0 = parse_state(initial_state_obj, n_sys, "initial_state")
    try:
        spec = CycleSpec(n_system_qubits=n_sys, gates=gates, n_env_qubits=n_env,
                         env_initial=env_initial, env_mode=env_mode)
    except ValueError as exc:
        raise ConfigError(f"circuit: {exc}") from None
    return spec, rho0


def _parse_channels(obj, n_qubits: int) -> tuple[KrausChannel, ...]:
    if obj is None:
        return ()
    _require(isinstance(obj, list), "'channels' must be a list")
    out: list[KrausChannel] = []
    for i, ch in enumerate(obj):
        context = f"channels[{i}]"
        _require(isinstance(ch, dict), f"{context}: expected an object")
        kind = ch.get("kind")
        _require(kind in _CHANNEL_KINDS,
                 f"{context}: kind must be one of {sorted(_CHANNEL_KINDS)}")
        rate_key, factory = _CHANNEL_KINDS[kind]
        rate = _as_number(ch, rate_key)
        qubits = ch.get("qubits", list(range(n_qubits)))
        _require(isinstance(qubits, list) and qubits
                 and all(isinstance(q, int) and not isinstance(q, bool)
                         and 0 <= q < n_qubits for q in qubits),
                 f"{context}: qubits must be indices below {n_qubits}")
        try:
            out.extend(on_qubits(factory(rate), qubits, n_qubits))
        except ValueError as exc:
            raise ConfigError(f"{context}: {exc}") from None
    return tuple(out)


def _parse_bounds(obj) -> BoundsConfig:
    if obj is None:
        return BoundsConfig()
    _require(isinstance(obj, dict), "'bounds' must be an object")
    sn_max = _as_int(obj, "sn_max", default=10, minimum=2)
    optimized = obj.get("optimized", True)
    _require(isinstance(optimized, bool), "bounds.optimized must be true or false")
    xi = epsilon = None
    trunc = obj.get("truncation")
    if trunc is not None:
        _require(isinstance(trunc, dict) and ("xi" in trunc) != ("epsilon" in trunc),
                 "bounds.truncation takes exactly one of 'xi' or 'epsilon'")
        if "xi" in trunc:
            xi = _as_number(trunc, "xi")
            _require(xi > 0.0, "bounds.truncation.xi must be positive")
        else:
            epsilon = _as_number(trunc, "epsilon")
            _require(epsilon > 0.0, "bounds.truncation.epsilon must be positive")
    return BoundsConfig(sn_max=sn_max, optimized=optimized,
                        truncation_xi=xi, truncation_epsilon=epsilon)


def parse_config(obj) -> ExperimentConfig:
    """Validate a decoded JSON object into an :class:`ExperimentConfig`."""
    _require(isinstance(obj, dict), "config root must be a JSON object")
    known = {"experiment", "params", "circuit", "initial_state", "channels",
             "shots", "seed", "n_cycles", "bounds"}
    unknown = set(obj) - known
    _require(not unknown, f"unknown config fields {sorted(unknown)}")

    experiment = obj.get("experiment")
    circuit_obj = obj.get("circuit")
    _require((experiment is None) != (circuit_obj is None),
             "give exactly one of 'experiment' or 'circuit'")

    shots = _as_int(obj, "shots", default=0, minimum=0)
    seed = _as_int(obj, "seed", default=0, minimum=0)
    n_cycles = _as_int(obj, "n_cycles", default=None, minimum=1)
    bounds = _parse_bounds(obj.get("bounds"))

    params = obj.get("params", {})
    _require(isinstance(params, dict), "'params' must be an object")

    if experiment is not None:
        _require(isinstance(experiment, str) and experiment in preset_names(),
                 f"unknown experiment {experiment!r}; have {', '.join(preset_names())}")
        built = build_experiment_core(experiment, params)
        spec = built.spec
        rho0 = built.rho0
        if "initial_state" in obj:
            rho0 = parse_state(obj["initial_state"], spec.n_system_qubits,
                               "initial_state")
        extra = _parse_channels(obj.get("channels"), spec.n_qubits)
        return ExperimentConfig(experiment=experiment, params=dict(params),
                                circuit=spec, initial_state=rho0,
                                channels=built.channels + extra, shots=shots,
                                seed=seed, n_cycles=n_cycles, bounds=bounds)

    _require(not params, "'params' only applies to preset experiments")
    spec, rho0 = _parse_circuit(circuit_obj, obj.get("initial_state"))
    channels = _parse_channels(obj.get("channels"), spec.n_qubits)
    return ExperimentConfig(experiment=None, params={}, circuit=spec,
                            initial_state=rho0, channels=channels, shots=shots,
                            seed=seed, n_cycles=n_cycles, bounds=bounds)


def build_experiment_core(name: str, params: Mapping) -> Experiment:
    try:
        return build_preset(name, params)
    except KeyError as exc:
        raise ConfigError(str(exc.args[0])) from None
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"preset {name!r}: {exc}") from None


def build_experiment(config: ExperimentConfig) -> Experiment:
    """Materialize the runnable experiment a validated config describes."""
    name = config.experiment or "custom"
    return Experiment(name=name, spec=config.circuit, rho0=config.initial_state,
                      channels=config.channels, params=dict(config.params))


def load_config(path) -> ExperimentConfig:
    """Read and validate a JSON config file."""
    try:
        with open(path, encoding="utf-8") as fh:
            obj = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from None
    return parse_config(obj)
