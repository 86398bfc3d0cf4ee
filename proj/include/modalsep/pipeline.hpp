#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "modalsep/config.hpp"
#include "modalsep/modal.hpp"

namespace modalsep {

/// Outcome of one full pipeline run. Artifact paths are stored relative to
/// the output directory, so a report plus its directory is relocatable.
struct RunReport {
    std::vector<ModalEstimate> modes;    ///< ascending frequency
    std::vector<ModePairing> mac_table;  ///< empty when no reference was given
    std::string response_path;           ///< raw (simulated or ingested) record CSV
    std::string network_path;            ///< trained weights JSON
    std::string loss_trace_path;         ///< per-epoch loss CSV
    std::string responses_path;          ///< separated modal responses CSV ("" if no modes)
    std::string shapes_path;             ///< mode-shape table CSV ("" if no modes)
    RunConfig config_echo;               ///< fully resolved; re-running it reproduces this run
    std::uint64_t seed = 0;
    int thread_count = 1;
    double wall_time_s = 0.0;  ///< console diagnostic only; never serialized

    std::filesystem::path output_dir() const { return config_echo.output_dir; }
};

std::string report_to_json(const RunReport& report);
/// Rebuilds a report from JSON. Mode response traces live in the responses
/// CSV artifact, not the JSON, so `modes[i].response_trace` comes back empty.
RunReport report_from_json(const std::string& json_text);
void save_report(const RunReport& report, const std::filesystem::path& path);
RunReport load_report(const std::filesystem::path& path);

/// Applies MODAL_SEP_THREADS to the linear-algebra kernels and returns the
/// effective thread count. Throws ConfigError for a malformed value.
int apply_thread_env();

/// Reads the input CSV, or simulates the built-in benchmark when the config
/// says so.
ResponseRecord acquire_input(const RunConfig& config);

/// Loads the configured reference mode set (file path or built-in oracle).
/// Throws ConfigError when the config names no reference.
ModalTruth resolve_reference(const RunConfig& config);

/// Runs ingest/simulate -> preprocess -> train -> separate -> select modes ->
/// shapes -> per-mode spectrum and damping -> reference matching, writing all
/// artifacts plus report.json under config.output_dir. Errors surface as
/// PipelineError carrying a stage label and the process exit code.
RunReport run_pipeline(const RunConfig& config);

/// Writes plot-ready CSV series (loss curve, per-mode response traces,
/// per-mode spectra, shape-vs-channel table) under <output_dir>/plots,
/// reading the run's artifacts back from disk. Returns the files written.
std::vector<std::filesystem::path> emit_plot_series(const RunReport& report);

}  // namespace modalsep
