"""heatrev: heat-flow reversal from internal coherences under collective dissipation.

A small simulation library and CLI for degenerate open quantum systems:
eigenoperator construction, apparent temperatures, collective Lindblad
dynamics (numeric for any finite dimension, closed-form for a two-level
pair), and every reversal threshold, energy, and entropy in closed form.
"""

from .qcore import (
    CorrelationTerm,
    DensityOperator,
    DensityVerdict,
    HermitianObservable,
    PositivityError,
    mutual_information,
    partial_trace,
    relative_entropy,
    validate_density,
    von_neumann_entropy,
)
from .eigenops import (
    EnergyShell,
    LadderPair,
    MultiFrequencyError,
    ZeroCouplingError,
    build_eigenoperators,
    ladder_pair,
    spectral_groups,
)
from .thermo import (
    ApparentTemperature,
    BathSpec,
    DegenerateSplitError,
    apparent_temperature,
    apparent_temperature_split,
    correlation_expectations,
    heat_current,
)
from .pairtls import (
    PairConfig,
    SteadyReport,
    alpha_max,
    initial_energy,
    initial_entropy,
    max_reversal_curve,
    pair_initial_state,
    steady_energy,
    steady_entropy,
    steady_report,
    steady_state,
)
from .reversal import (
    FeasibilityBounds,
    ReversalVerdict,
    SingularBathError,
    alpha_bound,
    alpha_critical,
    alpha_permanent,
    feasibility_bounds,
    reversal_condition_coherence,
    reversal_condition_general,
    scan_region,
    verdict,
)
from .dynamics import (
    GeneratorSpec,
    IntegrationUnstableError,
    Trajectory,
    TrajectoryRecord,
    analytic_pair_trajectory,
    independent_pair_trajectory,
    integrate,
    lindblad_rhs,
    pair_generator,
    relax_to_steady,
    trajectory_observables,
)

__version__ = "0.1.0"
