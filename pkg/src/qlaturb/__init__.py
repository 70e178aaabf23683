"""2D quantum turbulence in a BEC via an exactly unitary lattice algorithm."""

from .lattice import (
    CouplingParams,
    Grid,
    SpinorField,
    collide,
    evolve_u,
    interleave,
    load_state,
    potential_rotate,
    save_state,
    step,
    stream,
)
from .initial import (
    GaussianCloudParams,
    RandomPhaseParams,
    VortexSpec,
    bicubic_cell_coefficients,
    bicubic_eval,
    four_vortex_lattice,
    gaussian_vortex_state,
    random_phase_cell_coefficients,
    random_phase_field,
    random_phase_state,
)
from .diagnostics import (
    EnergyRecord,
    HydroFields,
    coherence_length,
    energies,
    enstrophy,
    gamma_ratio,
    hydro_fields,
)
from .spectra import (
    PowerLawFit,
    QField,
    SpectrumRecord,
    fit_powerlaw,
    helmholtz_split,
    spectral_density,
    spectrum_record,
    vortex_qfield,
)
from .vortex import VortexSet, detect_vortices, phase_field, plaquette_winding, vortex_count_series
from .runner import (
    ConfigError,
    GaussianVortexInit,
    NumericalError,
    RandomPhaseInit,
    RecurrenceReport,
    RunConfig,
    detect_recurrence,
    load_config,
    resume,
    run,
)

__version__ = "0.1.0"
