// modal-sep: output-only modal identification from multichannel vibration
// records. Verbs: simulate | train | identify | report | run.

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "modalsep/config.hpp"
#include "modalsep/errors.hpp"
#include "modalsep/pipeline.hpp"
#include "modalsep/preprocess.hpp"
#include "modalsep/training.hpp"

namespace {

namespace fs = std::filesystem;
using namespace modalsep;

struct CliOptions {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    std::optional<std::string> report_path;  // report verb only
};

void add_common_options(CLI::App* cmd, CliOptions& options) {
    cmd->add_option("--config", options.config_path, "run configuration JSON")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--seed", options.seed,
                    "override the run seed (sub-seeds not pinned in the config follow)");
    cmd->add_option("--out", options.out_dir, "override the output directory");
}

RunConfig load_with_overrides(const CliOptions& options) {
    RunConfig config = load_run_config(options.config_path);
    if (options.seed) config.seed = *options.seed;
    if (options.out_dir) config.output_dir = *options.out_dir;
    config.validate();
    return config;
}

/// Exit code for errors thrown outside run_pipeline's stage wrapper.
int exit_code_for(const Error& error) {
    if (dynamic_cast<const ConfigError*>(&error) != nullptr) return 2;
    if (dynamic_cast<const Diverged*>(&error) != nullptr) return 4;
    if (dynamic_cast<const EmptyBand*>(&error) != nullptr ||
        dynamic_cast<const NoTriggers*>(&error) != nullptr ||
        dynamic_cast<const TooFewPeaks*>(&error) != nullptr ||
        dynamic_cast<const ZeroVector*>(&error) != nullptr ||
        dynamic_cast<const ZeroVariance*>(&error) != nullptr ||
        dynamic_cast<const RankDeficient*>(&error) != nullptr)
        return 5;
    return 3;
}

void print_report(const RunReport& report) {
    std::cout << "identified " << report.modes.size() << " mode(s):\n";
    for (std::size_t k = 0; k < report.modes.size(); ++k) {
        const ModalEstimate& mode = report.modes[k];
        std::cout << "  mode " << (k + 1) << ": f = " << mode.frequency_hz
                  << " Hz, zeta = " << mode.damping_ratio * 100.0 << " % ["
                  << to_string(mode.confidence) << "]\n";
    }
    for (const ModePairing& pairing : report.mac_table) {
        std::cout << "  reference mode " << (pairing.reference_mode + 1) << " <- estimate "
                  << (pairing.estimate_index + 1) << ": MAC = " << pairing.mac_value
                  << ", df = " << pairing.frequency_error_hz << " Hz\n";
    }
    std::cout << "report: " << (report.output_dir() / "report.json").string() << "\n";
    std::cout << "wall time: " << report.wall_time_s << " s (threads: " << report.thread_count
              << ")\n";
}

int run_simulate(const CliOptions& options) {
    const RunConfig config = load_with_overrides(options).resolved();
    if (config.input != kSimulateBenchmark)
        throw ConfigError("simulate needs input = '" + std::string(kSimulateBenchmark) + "'");
    const ResponseRecord record = acquire_input(config);
    const fs::path csv = fs::path(config.output_dir) / "response.csv";
    write_record_csv(record, csv);
    std::cout << "wrote " << record.sample_count() << " samples x " << record.channel_count()
              << " channels at " << record.sample_rate << " Hz to " << csv.string() << "\n";
    return 0;
}

int run_train(const CliOptions& options) {
    const RunConfig config = load_with_overrides(options).resolved();
    const ResponseRecord raw = acquire_input(config);
    const ResponseRecord processed = preprocess(raw, config.preprocessing);
    Eigen::MatrixXd train_data = processed.samples;
    if (config.train_samples > 0 && config.train_samples < processed.sample_count())
        train_data = processed.samples.topRows(config.train_samples);
    const TrainResult result = train(train_data, config.network);
    const fs::path out_dir = config.output_dir;
    save_network_params(result.params, out_dir / "network.json");
    save_loss_trace(result.trace, out_dir / "loss_trace.csv");
    std::cout << "trained " << config.network.epochs << " epochs on " << train_data.rows()
              << " samples";
    if (!result.trace.empty()) std::cout << "; final loss " << result.trace.back().total;
    std::cout << "\nweights: " << (out_dir / "network.json").string() << "\n";
    return 0;
}

int run_identify(const CliOptions& options, bool with_plots) {
    const RunConfig config = load_with_overrides(options);
    const RunReport report = run_pipeline(config);
    print_report(report);
    if (with_plots) {
        const auto files = emit_plot_series(report);
        std::cout << "plot series: " << files.size() << " file(s) under "
                  << (report.output_dir() / "plots").string() << "\n";
    }
    return 0;
}

int run_report(const CliOptions& options) {
    fs::path report_file;
    if (options.report_path) {
        report_file = *options.report_path;
    } else {
        const RunConfig config = load_with_overrides(options);
        report_file = fs::path(config.output_dir) / "report.json";
    }
    RunReport report = load_report(report_file);
    if (options.out_dir) report.config_echo.output_dir = *options.out_dir;
    const auto files = emit_plot_series(report);
    std::cout << "plot series: " << files.size() << " file(s) under "
              << (report.output_dir() / "plots").string() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"output-only modal identification via a self-coding separation network"};
    app.require_subcommand(1);

    CliOptions options;
    CLI::App* simulate_cmd =
        app.add_subcommand("simulate", "integrate the benchmark model and write the record");
    add_common_options(simulate_cmd, options);
    CLI::App* train_cmd =
        app.add_subcommand("train", "train the separation network and write the weights");
    add_common_options(train_cmd, options);
    CLI::App* identify_cmd =
        app.add_subcommand("identify", "full pipeline: modes, damping, shapes, report");
    add_common_options(identify_cmd, options);
    CLI::App* report_cmd =
        app.add_subcommand("report", "emit plot-ready CSV series from an existing report");
    report_cmd->add_option("--config", options.config_path, "run configuration JSON")
        ->check(CLI::ExistingFile);
    report_cmd->add_option("--report", options.report_path, "report JSON (overrides --config)");
    report_cmd->add_option("--out", options.out_dir, "override the output directory");
    CLI::App* run_cmd = app.add_subcommand("run", "identify plus plot series");
    add_common_options(run_cmd, options);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;  // usage problems are config errors
    }

    try {
        if (simulate_cmd->parsed()) return run_simulate(options);
        if (train_cmd->parsed()) return run_train(options);
        if (identify_cmd->parsed()) return run_identify(options, false);
        if (run_cmd->parsed()) return run_identify(options, true);
        if (report_cmd->parsed()) {
            if (!options.report_path && options.config_path.empty())
                throw ConfigError("report needs --config or --report");
            return run_report(options);
        }
    } catch (const PipelineError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.exit_code;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
