"""Quantum correlations created and destroyed by local noise.

Classifies local channels, decides whether bipartite states are classically
correlated, and estimates geometric and relative-entropy quantumness.
"""

__version__ = "0.1.0"

from .channels import (
    ChannelClass,
    KrausChannel,
    amplitude_damping,
    apply_local,
    classify,
    depolarizing,
    dephasing,
    is_unital,
    measure_prepare_example,
    phase_damping,
    semi_classical_basis,
    validate_channel,
)
from .classicality import ClassicalityVerdict, conditional_ensemble, is_classically_correlated
from .errors import QCNoiseError
from .measures import (
    CCState,
    MeasureResult,
    MonotonicityReport,
    measure,
    monotonicity_report,
    q_geometric,
    q_geometric_pure,
    q_relative_entropy,
)
from .numerics import (
    DensityMatrix,
    ProductBasis,
    Tolerances,
    fidelity,
    partial_trace,
    relative_entropy,
    validate_density,
)
from .optimize import OptimizerConfig

__all__ = [
    "CCState", "ChannelClass", "ClassicalityVerdict", "DensityMatrix", "KrausChannel",
    "MeasureResult", "MonotonicityReport", "OptimizerConfig", "ProductBasis", "QCNoiseError",
    "Tolerances", "amplitude_damping", "apply_local", "classify", "conditional_ensemble",
    "dephasing", "depolarizing", "fidelity", "is_classically_correlated", "is_unital", "measure",
    "measure_prepare_example", "monotonicity_report", "partial_trace", "phase_damping",
    "q_geometric", "q_geometric_pure", "q_relative_entropy", "relative_entropy",
    "semi_classical_basis", "validate_channel", "validate_density",
]
