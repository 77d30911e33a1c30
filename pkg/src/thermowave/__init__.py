"""thermowave: a numerical laboratory for weakly coupled thermoelastic wave
models - modal spectra and decay-rate experiments, energy-dissipative time
integration, periodic homogenization, and oscillating-coefficient convergence
studies on the unit interval."""

from .assembly import DiscreteDynamic, assemble_dynamic, coupling_matrix, mode_diagonal
from .coefficients import (
    CoefficientField,
    DiagonalField,
    ModelParameters,
    ThermoCoefficients,
    affine_cos,
    affine_sine,
    constant,
    field_from_descriptor,
    laminate,
    piecewise,
    sample_field,
    validate_field,
)
from .dynamics import (
    DecayFit,
    EnergyTrace,
    StateVector,
    broadband_velocity_state,
    classify_decay,
    discrete_energy,
    evolve,
    mode_velocity_state,
    smoothness_experiment,
)
from .epsilon import (
    ConvergenceReport,
    EpsProblem,
    GridSolution,
    assemble_operators,
    evolve_oscillating,
    resolvent_sweep,
    solve_resolvent,
)
from .homogenization import (
    CellCorrector,
    HomogenizedModel,
    assemble_homogenized_dynamic,
    cell_corrector,
    fem_cell_effective,
    homogenize,
    laminate_effective,
    mean_value,
    spectral_homogenized_dynamic,
)
from .spectra import (
    SpectrumReport,
    compute_spectrum,
    match_eigenvalues,
    min_distance_table,
    per_mode_eigenvalues,
)

__version__ = "0.1.0"
