"""FFT-based LMMSE channel estimation for spherical-wave UCA MIMO links.

Parallel uniform circular arrays under a spherical wave model yield a
circulant channel covariance, so LMMSE filtering reduces to per-bin
scalar gains in the DFT domain.  This package provides the scene geometry
and channel model, the spectral algebra, five reference estimators, exact
operation-count models, and a reproducible Monte-Carlo NMSE harness.
"""

from .circulant import (
    CirculantStructureError,
    HermitianCirculant,
    SpectralFilter,
    apply_spectral_filter,
    circulant_project,
    eigenvalues_via_dft,
    is_power_of_two,
    reconstruct_dense,
)
from .complexity import (
    COMPLEXITY_METHODS,
    ComplexityProfile,
    MadsRow,
    profile,
    ratio,
    sweep_mads,
)
from .estimators import (
    ESTIMATOR_METHODS,
    EstimateResult,
    InsufficientObservationsError,
    InvalidCovarianceError,
    NoiseModel,
    ObservationBatch,
    lmmse_direct_known,
    lmmse_direct_unknown,
    lmmse_swp_known,
    lmmse_swp_unknown,
    ls_estimate,
    ml_spectral_eigs,
    sample_covariance,
)
from .geometry import (
    SPEED_OF_LIGHT,
    ChannelMatrix,
    UcaConfig,
    approx_distance,
    approximation_error,
    build_ccm,
    build_channel,
    exact_distance,
    path_gain,
)
from .simulate import (
    CHANNEL_MODES,
    DETERMINISTIC_LOS,
    GAUSSIAN_PRIOR,
    ExperimentConfig,
    NmseCurve,
    NmsePoint,
    PilotMatrix,
    analytic_mmse,
    correlate,
    make_pilots,
    mean_entry_power,
    nmse,
    noise_variance_for_snr,
    rng_stream,
    run_sweep,
    sample_channel,
    transmit_receive,
)

__version__ = "0.1.0"

__all__ = [
    "CHANNEL_MODES",
    "COMPLEXITY_METHODS",
    "ChannelMatrix",
    "CirculantStructureError",
    "ComplexityProfile",
    "DETERMINISTIC_LOS",
    "ESTIMATOR_METHODS",
    "EstimateResult",
    "ExperimentConfig",
    "GAUSSIAN_PRIOR",
    "HermitianCirculant",
    "InsufficientObservationsError",
    "InvalidCovarianceError",
    "MadsRow",
    "NmseCurve",
    "NmsePoint",
    "NoiseModel",
    "ObservationBatch",
    "PilotMatrix",
    "SPEED_OF_LIGHT",
    "SpectralFilter",
    "UcaConfig",
    "analytic_mmse",
    "apply_spectral_filter",
    "approx_distance",
    "approximation_error",
    "build_ccm",
    "build_channel",
    "circulant_project",
    "correlate",
    "eigenvalues_via_dft",
    "exact_distance",
    "is_power_of_two",
    "lmmse_direct_known",
    "lmmse_direct_unknown",
    "lmmse_swp_known",
    "lmmse_swp_unknown",
    "ls_estimate",
    "make_pilots",
    "mean_entry_power",
    "ml_spectral_eigs",
    "nmse",
    "noise_variance_for_snr",
    "path_gain",
    "profile",
    "ratio",
    "reconstruct_dense",
    "rng_stream",
    "run_sweep",
    "sample_channel",
    "sample_covariance",
    "sweep_mads",
    "transmit_receive",
]
