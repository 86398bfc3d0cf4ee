"""Output-only modal identification via a self-coding separation network.

Thin wrapper over the compiled core: structural simulation, network
training, spectral/decrement analysis, and the end-to-end pipeline.
"""

import json as _json

from ._core import (
    ConfigurationError,
    Confidence,
    ContrastFunction,
    DivergedError,
    Error,
    LossBreakdown,
    ModalEstimate,
    ModalTruth,
    ModePairing,
    NetworkConfig,
    NetworkParams,
    PsdEstimate,
    Quantity,
    RdtSignature,
    ResponseRecord,
    RunReport,
    TrainResult,
    __version__,
    benchmark_modes,
    benchmark_modes_at,
    extract_modal_responses,
    extract_mode_shapes,
    fit_damping,
    load_report,
    loss,
    mac,
    match_modes,
    negentropy_estimate,
    pick_peak,
    rdt_extract,
    refit_shapes,
    run_json,
    select_modes,
    simulate_benchmark,
    train,
    welch_psd,
)


def run(config):
    """Run the full pipeline from a config dict (or JSON string)."""
    if not isinstance(config, str):
        config = _json.dumps(config)
    return run_json(config)


__all__ = [
    "ConfigurationError",
    "Confidence",
    "ContrastFunction",
    "DivergedError",
    "Error",
    "LossBreakdown",
    "ModalEstimate",
    "ModalTruth",
    "ModePairing",
    "NetworkConfig",
    "NetworkParams",
    "PsdEstimate",
    "Quantity",
    "RdtSignature",
    "ResponseRecord",
    "RunReport",
    "TrainResult",
    "__version__",
    "benchmark_modes",
    "benchmark_modes_at",
    "extract_modal_responses",
    "extract_mode_shapes",
    "fit_damping",
    "load_report",
    "loss",
    "mac",
    "match_modes",
    "negentropy_estimate",
    "pick_peak",
    "rdt_extract",
    "refit_shapes",
    "run",
    "run_json",
    "select_modes",
    "simulate_benchmark",
    "train",
    "welch_psd",
]
