"""Entanglement measures for finite-dimensional quantum states and simulation
of simple LOCC protocols (Bell-state transformation, concentration, distillation).
"""

from .errors import EntanglementError
from .linalg import EigenDecomposition, hermitian_eig, kron, matrix_log2_on_support, psd_sqrt, trace_norm
from .measurements import MeasurementOutcome, MeasurementSet, compose, measure, validate, with_conditional_unitaries
from .mixed import (
    binary_entropy,
    bures_distance,
    concurrence,
    eof_two_qubit,
    log_negativity,
    negativity,
    relative_entropy,
    trace_distance,
    uhlmann_fidelity,
)
from .protocols import (
    DistillationStep,
    YieldCurve,
    concentrate,
    distill_step,
    simulate_distill_step,
    total_yield,
    transform_bell,
)
from .pure import (
    SchmidtDecomposition,
    entropy_of_entanglement,
    schmidt_decompose,
    schmidt_number,
    von_neumann_entropy,
)
from .separable import (
    MeasureResult,
    OptimizerOptions,
    SeparableApproximation,
    bures_measure,
    distance_to_separable,
    relative_entropy_of_entanglement,
    trace_distance_to_separable,
)
from .states import (
    DensityOperator,
    PureState,
    density_from_pure,
    fidelity_phi_plus,
    is_ppt,
    mix,
    partial_trace,
    partial_transpose,
    standard_state,
    tensor,
)

__version__ = "0.1.0"
