#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "modalsep/dynamics.hpp"
#include "modalsep/network.hpp"
#include "modalsep/preprocess.hpp"
#include "modalsep/record.hpp"

namespace modalsep {

/// Name accepted by RunConfig::input to simulate the built-in 4-DOF benchmark
/// instead of reading a CSV.
inline constexpr const char* kSimulateBenchmark = "simulate:benchmark4dof";
/// Name accepted by RunConfig::reference for the benchmark's exact mode set.
inline constexpr const char* kOracleBenchmark = "oracle:benchmark4dof";

/// Simulation request, used when input == kSimulateBenchmark.
struct SimulateConfig {
    double duration_s = 10.0;
    double sample_rate = 100.0;
    double excitation_std = 1.0;
    std::optional<std::uint64_t> seed;  ///< defaults to the run seed
    int substeps = 1;
    Quantity output = Quantity::Acceleration;
};

struct AnalysisConfig {
    int welch_segment_length = 0;  ///< 0 = automatic
    double welch_overlap = 0.5;
    double rdt_trigger_sigma = 1.0;
    double rdt_segment_periods = 10.0;  ///< decrement segment length, in periods of the mode
    double selection_prominence = 10.0;
    int selection_min_separation_bins = 2;
    std::optional<double> band_lo_hz;  ///< peak-search band; defaults to (first bin, Nyquist)
    std::optional<double> band_hi_hz;
};

/// Everything one pipeline run needs, loadable from a single JSON file.
struct RunConfig {
    std::string input = kSimulateBenchmark;      ///< CSV path or kSimulateBenchmark
    std::optional<double> sample_rate_override;  ///< for CSV inputs without a sidecar
    SimulateConfig simulate;
    PreprocessConfig preprocessing;
    NetworkConfig network;
    bool network_seed_explicit = false;  ///< JSON set network.seed; don't inherit the run seed
    int train_samples = 0;               ///< leading samples used for training (0 = all)
    AnalysisConfig analysis;
    std::string reference;  ///< "", a mode-set JSON path, or kOracleBenchmark
    std::string output_dir = "out";
    std::uint64_t seed = 0;  ///< run seed, inherited by unset sub-seeds

    void validate() const;

    /// Copy with every inherited seed written out explicitly, so the copy
    /// reproduces this run even when the ambient seed changes.
    RunConfig resolved() const;
};

RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::filesystem::path& path);
std::string run_config_to_json(const RunConfig& config);

/// Trained-weights file: dimension header plus row-major weight arrays.
std::string network_params_to_json(const NetworkParams& params);
NetworkParams network_params_from_json(const std::string& json_text);
void save_network_params(const NetworkParams& params, const std::filesystem::path& path);
NetworkParams load_network_params(const std::filesystem::path& path);

/// Loss trace CSV: epoch, the five loss terms, total.
void save_loss_trace(const std::vector<LossBreakdown>& trace, const std::filesystem::path& path);
std::vector<LossBreakdown> load_loss_trace(const std::filesystem::path& path);

/// Reference mode sets as JSON: frequencies, damping ratios, and one shape
/// vector per mode.
std::string modal_truth_to_json(const ModalTruth& truth);
ModalTruth modal_truth_from_json(const std::string& json_text);
void save_modal_truth(const ModalTruth& truth, const std::filesystem::path& path);
ModalTruth load_modal_truth(const std::filesystem::path& path);

}  // namespace modalsep
