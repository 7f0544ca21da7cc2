"""Secure hybrid spatial modulation: precoding, subarray selection, secrecy metrics."""

from hybridsm._core import (
    ConfigError,
    DegenerateProjectorError,
    ExperimentSpec,
    Instance,
    RunFailure,
    SolverError,
    SrEstimate,
    SystemConfig,
    TassScorecard,
    asr,
    build_instance,
    constellation,
    cutoff_rates,
    draw_channels,
    exact_sr_monte_carlo,
    flops_estimate,
    inv_sqrt_hermitian,
    kron,
    ml_detect,
    parse_config_text,
    pinv,
    run_precoder,
    run_sweep,
    run_tass,
    sample_complex_gaussian,
    serialize_config,
    sinr_ansnr,
    slnr,
    svd,
)

__all__ = [
    "ConfigError",
    "DegenerateProjectorError",
    "ExperimentSpec",
    "Instance",
    "RunFailure",
    "SolverError",
    "SrEstimate",
    "SystemConfig",
    "TassScorecard",
    "asr",
    "build_instance",
    "constellation",
    "cutoff_rates",
    "draw_channels",
    "exact_sr_monte_carlo",
    "flops_estimate",
    "inv_sqrt_hermitian",
    "kron",
    "ml_detect",
    "parse_config_text",
    "pinv",
    "run_precoder",
    "run_sweep",
    "run_tass",
    "sample_complex_gaussian",
    "serialize_config",
    "sinr_ansnr",
    "slnr",
    "svd",
]
