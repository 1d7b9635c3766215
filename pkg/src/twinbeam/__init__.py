"""Bright twin-beam quantum correlations versus classical coherence."""

__version__ = "0.1.0"

from .quadrature import (
    TwoModeCovariance, CombinedVariances, PhysicalityError, combined_variances,
    build_covariance, duan_criterion, apply_loss, beamsplitter,
    symplectic_eigenvalues, variance_to_db, db_to_variance,
)
from .nopo import (
    NopoParams, ParameterError, pump_parameter, squeezed_variances,
    phasematch_factor, twin_beam_covariance,
)
from .interferometer import (
    MzConfig, PhotocurrentSpectra, ConfigurationError, sideband_phase, transfer,
    measure_twin_beams, qnl_reference,
)
from .coherence import (
    CoherenceParams, FringeTrace, VANISH_VISIBILITY, visibility, fringe_trace,
    extract_visibility, beat_frequency, BeatNotDetected,
)
from .oracle import (
    NoiseTrace, SpectrumEstimate, synthesize_twin_traces, combine,
    welch_estimate, oracle_run,
)
from .pipeline import (
    ExperimentConfig, SweepResult, ConfigError, load_config,
    run_visibility_sweep, run_correlation_sweep, run_coexistence_report,
    emit_outputs,
)
