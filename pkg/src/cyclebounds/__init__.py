"""Recurrence-probability inequalities for periodically driven quantum systems.

Simulate small driven systems (optionally coupled to an environment and to
Kraus noise), measure or sample the recurrence series R_k = tr[rho_0 rho_k],
and test it against families of multi-cycle inequalities that every fixed
unitary drive must satisfy.  Violations detect evolution noise, parameter
drift, or hidden environments — including cases invisible to energy-based
thermodynamic checks.
"""

from .bounds import (
    InequalityCoefficients,
    OptimizedBoundResult,
    StencilSpec,
    TruncationPlan,
    derivative_stencil,
    evaluate_inequality,
    evaluate_three_cycle,
    expand_stencil,
    gaussian_sn_coefficients,
    optimized_three_cycle,
    sn_coefficients,
    sn_exact_fractions,
    spectral_oracle,
    truncated_sn,
    truncation_plan,
    unitary_eigenphases,
)
from .channels import (
    KrausChannel,
    amplitude_damping,
    custom,
    dephasing,
    depolarizing,
    lift,
    on_qubits,
)
from .config import BoundsConfig, ConfigError, ExperimentConfig, build_experiment, load_config, parse_config
from .detection import (
    DetectionReport,
    ExtrapolationReport,
    detect,
    extrapolate,
    propagate,
)
from .evolve import (
    RecurrenceSeries,
    evolve,
    gibbs_product,
    gibbs_qubit,
    product_state,
    recurrence_exact,
    recurrence_sampled,
)
from .gates import CycleSpec, GateSpec, cycle_unitary, embed_operator, gate_unitary
from .linalg import (
    DensityMatrix,
    HermitianEigen,
    hermitian_eig,
    hs_overlap,
    matrix_fn,
    partial_trace,
    tensor_product,
)
from .presets import (
    Experiment,
    build_preset,
    controlled_rx,
    partial_swap,
    preset_defaults,
    preset_description,
    preset_names,
)
from .reporting import (
    IngestedSeries,
    SeriesFormatError,
    read_series,
    report_to_dict,
    write_coeffs_csv,
    write_report_json,
    write_series_csv,
)
from .special import erfc
from .thermo import (
    UndetectabilityInput,
    WorkStatistics,
    jarzynski_moment,
    passivity_gap,
    required_shots,
    second_law_gap,
    t_undetectable,
)

__version__ = "0.1.0"
