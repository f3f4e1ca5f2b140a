"""Spin-1/2 neutrons in a helical magnetic field: exact solution, unitary integrator,
and extraction of dynamical and geometric phases."""

from .analytic import (
    PhaseDecomposition,
    Substate,
    analytic_phases,
    berry_phase,
    dynamical_phase,
    eigenbasis_along_S,
    exact_state,
    exact_states,
    polarization_adiabatic,
    polarization_exact,
    solid_angle,
    topological_phase,
    wrap_to_pi,
)
from .dynamics import (
    SPIN_DOWN,
    SPIN_UP,
    EvolutionResult,
    Spinor,
    evolve,
    hamiltonian_matrix,
    polarization_z,
    step_propagator,
)
from .errors import (
    AmbiguousUnwrapError,
    DegenerateConfigurationError,
    DomainError,
    HelixPhaseError,
    NonConvergedError,
    NotCyclicError,
    ParseError,
    UnitError,
)
from .experiment import (
    ExperimentalPoint,
    Scan,
    SweepConfig,
    SweepRow,
    compare_overlay,
    format_sweep_csv,
    load_experimental_points,
    sweep_polarization,
    sweep_topological_phase,
    write_sweep_csv,
)
from .field import (
    NEUTRON_GYROMAGNETIC_RATIO,
    HelicalFieldParams,
    RotatingFrameParams,
    adiabaticity_ratio,
    helical_field,
    helical_params_from_frame,
    reconstruct_field,
    rotating_frame_params,
    spin_axis,
)
from .phases import PhaseTrace, extract_phases, measure_topological_phase, unwrap_phase

__all__ = [
    "AmbiguousUnwrapError",
    "DegenerateConfigurationError",
    "DomainError",
    "EvolutionResult",
    "ExperimentalPoint",
    "HelicalFieldParams",
    "HelixPhaseError",
    "NEUTRON_GYROMAGNETIC_RATIO",
    "NonConvergedError",
    "NotCyclicError",
    "ParseError",
    "PhaseDecomposition",
    "PhaseTrace",
    "RotatingFrameParams",
    "SPIN_DOWN",
    "SPIN_UP",
    "Scan",
    "Spinor",
    "Substate",
    "SweepConfig",
    "SweepRow",
    "UnitError",
    "adiabaticity_ratio",
    "analytic_phases",
    "berry_phase",
    "compare_overlay",
    "dynamical_phase",
    "eigenbasis_along_S",
    "evolve",
    "exact_state",
    "exact_states",
    "extract_phases",
    "format_sweep_csv",
    "hamiltonian_matrix",
    "helical_field",
    "helical_params_from_frame",
    "load_experimental_points",
    "measure_topological_phase",
    "polarization_adiabatic",
    "polarization_exact",
    "polarization_z",
    "reconstruct_field",
    "rotating_frame_params",
    "solid_angle",
    "spin_axis",
    "step_propagator",
    "sweep_polarization",
    "sweep_topological_phase",
    "topological_phase",
    "unwrap_phase",
    "wrap_to_pi",
    "write_sweep_csv",
]

__version__ = "0.1.0"
