"""Single two-level atom in a driven, lossy cavity: master equation,
quantum trajectories, post-emission branch states, entanglement and the
intensity-field correlation h^FT."""
from .branches import (
    BranchState,
    FactorizableState,
    branch_state,
    branch_superposition,
    branch_terms,
    conditional_steady_superposition,
    decoherence_factor,
    field_orthogonality,
    post_emission_collapse,
    special_state,
)
from .correlations import HftSeries, QuadratureSpec, hft_approx, hft_from_branches, hft_numeric
from .dynamics import (
    MasterRun,
    SemiclassicalPoint,
    SystemParams,
    integrate_master,
    liouvillian_apply,
    semiclassical_rhs,
    semiclassical_steady_state,
    steady_state_mixture,
    steady_state_values,
)
from .entanglement import (
    approx_entropy,
    collapse_functions,
    entropy_of_entanglement,
    realignment_trace_norm,
    schematic_post_collapse_mixture,
    state_entropy,
)
from .errors import (
    ApproximationWarning,
    InvalidDensityMatrix,
    NormalizationError,
    StepSizeError,
    TruncationError,
    WeakDrivingError,
    ZeroAmplitudeError,
)
from .hilbert import (
    SpaceSpec,
    atom_field_product,
    build_operators,
    coherent_state,
    expectation,
    partial_trace_field,
)
from .series import TimeSeries, read_series, write_series
from .trajectories import (
    Channel,
    JumpRecord,
    TrajectoryResult,
    ensemble_density,
    ensemble_expectation,
    entanglement_series,
    evolve_trajectory,
    run_ensemble,
)

__version__ = "0.1.0"
