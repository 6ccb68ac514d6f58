"""Single-photon transport in a coupled-resonator waveguide with a lossy or
gain two-point (giant) emitter: stationary scattering, spectral
singularities, Siegert poles, bound-state expansions, and wave-packet
dynamics."""

from .errors import (
    BoundaryViolationError,
    ConfigError,
    FormulaPoleError,
    GawqError,
    NonNormalizableStateError,
    NumericalError,
    SingularScatteringError,
)
from .model import (
    BlochMode,
    SystemParams,
    bloch_mode,
    coupling_phase,
    decoupling_wavenumbers,
    dispersion,
    group_velocity,
    wavenumber_from_energy,
)
from .scattering import (
    ScatteringResult,
    StationaryAmplitudes,
    generalized_reflection,
    reflection_amplitude,
    spectrum_sweep,
    stationary_solve,
    transmission_amplitude,
)
from .spectral import (
    SiegertPole,
    SingularityPoint,
    classify_siegert,
    critical_gain,
    eigen_residual,
    find_singularities,
    singularity_residual,
    solve_poles,
    trajectory_sweep,
)
from .dynamics import (
    GaussianPacketSpec,
    LatticeState,
    RunObservables,
    analytic_free_density,
    evolve,
    fit_growth_rate,
    fit_spatial_slope,
    init_gaussian,
    init_gaussian_at_arrival,
    make_lattice,
    reflect_transmit,
    rhs,
)
from .modes import (
    BoundStateProfile,
    DecompositionCoefficient,
    bound_profile,
    bound_state_profile,
    decomposition_coefficient,
    fitted_in_continuum_coefficient,
    normalization_factor,
    overlap_coefficient,
    predict_longtime_density,
)

__version__ = "0.1.0"
