"""Two-color strontium MOT simulation.

Internal-state dynamics (open Bloch equations of three incoherently
coupled two-level pairs, plus a hybrid Bloch/rate-equation reduction)
and external trap dynamics (1-D MOT forces, trap depth, heuristic
loading and loss models) of a simultaneously operated blue (461 nm) and
green (496 nm) strontium MOT with a 688 nm balance laser.
"""

from .atomic import (
    CONSTANTS,
    AtomicDataError,
    PhysicalConstants,
    SrConstants,
    beam_intensity,
    branch_sum,
    combined_rates,
    load_constants,
    parallel_combine,
    rabi_from_saturation,
    saturation_from_rabi,
    saturation_intensity,
    saturation_parameter,
    with_overrides,
)
from .bloch import (
    BlochState,
    DriveParams,
    Liouvillian,
    LiouvillianError,
    SystemParams,
    build_lindblad_liouvillian,
    build_liouvillian,
    evolve,
    fluorescence,
    steady_state,
)
from .external import (
    ExternalModelError,
    ExternalRates,
    MapResult,
    MotBeam,
    beam_forces,
    fluorescence_map,
    greenred_loss_rate,
    loading_rate,
    map_cell,
    mot_force,
    mot_potential,
    optimal_detuning,
    optimal_gradient,
    trap_depth,
)
from .hybrid import (
    DegenerateSteadyStateError,
    HybridModelError,
    HybridResult,
    PumpRates,
    ReducedState,
    SingularBalanceError,
    SubsystemPopulations,
    assemble_populations,
    balance_bound,
    balance_ratio,
    blue_excited_fraction,
    blue_steady_fractions,
    build_reduced_liouvillian,
    greenred_steady_state,
    hybrid_evolve,
    hybrid_steady_state,
    pump_rates,
    subsystem_evolve,
    subsystem_rate_matrix,
    subsystem_steady_state,
)

__version__ = "0.1.0"
