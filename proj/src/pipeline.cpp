#include "modalsep/pipeline.hpp"

#include <json.hpp>

#include <Eigen/Core>
#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdlib>
#include <numeric>
#include <utility>

#include "modalsep/dynamics.hpp"
#include "modalsep/errors.hpp"
#include "modalsep/psd.hpp"
#include "modalsep/rdt.hpp"
#include "modalsep/training.hpp"
#include "io_util.hpp"

namespace modalsep {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

/// Runs one stage; any library error is rewrapped with the stage label and the
/// exit code of its class: config 2, training divergence 4, otherwise the
/// stage's own data/analysis code.
template <typename F>
auto stage(const char* name, int default_code, F&& body) {
    try {
        return body();
    } catch (const PipelineError&) {
        throw;
    } catch (const ConfigError& e) {
        throw PipelineError(name, 2, e.what());
    } catch (const Diverged& e) {
        throw PipelineError(name, 4, e.what());
    } catch (const Error& e) {
        throw PipelineError(name, default_code, e.what());
    }
}

json mode_to_json(const ModalEstimate& mode) {
    json entry;
    entry["frequency_hz"] = mode.frequency_hz;
    entry["damping_ratio"] = mode.damping_ratio;
    entry["damping_percent"] = mode.damping_ratio * 100.0;
    json shape = json::array();
    for (Eigen::Index i = 0; i < mode.shape.size(); ++i) shape.push_back(mode.shape(i));
    entry["shape"] = std::move(shape);
    entry["confidence"] = to_string(mode.confidence);
    return entry;
}

ModalEstimate mode_from_json(const json& entry) {
    ModalEstimate mode;
    mode.frequency_hz = entry.at("frequency_hz").get<double>();
    mode.damping_ratio = entry.at("damping_ratio").get<double>();
    const json& shape = entry.at("shape");
    mode.shape.resize(static_cast<Eigen::Index>(shape.size()));
    Eigen::Index i = 0;
    for (const auto& value : shape) mode.shape(i++) = value.get<double>();
    mode.confidence = confidence_from_string(entry.at("confidence").get<std::string>());
    return mode;
}

std::string shapes_to_csv(const std::vector<ModalEstimate>& modes,
                          const std::vector<std::string>& channel_labels) {
    std::string out;
    for (std::size_t c = 0; c < channel_labels.size(); ++c) {
        if (c > 0) out += ',';
        out += channel_labels[c];
    }
    out += '\n';
    for (const ModalEstimate& mode : modes) {
        for (Eigen::Index c = 0; c < mode.shape.size(); ++c) {
            if (c > 0) out += ',';
            out += detail::format_double(mode.shape(c));
        }
        out += '\n';
    }
    return out;
}

}  // namespace

int apply_thread_env() {
    const char* env = std::getenv("MODAL_SEP_THREADS");
    if (env == nullptr || *env == '\0') return Eigen::nbThreads();
    int threads = 0;
    const char* last = env;
    while (*last != '\0') ++last;
    auto [ptr, ec] = std::from_chars(env, last, threads);
    if (ec != std::errc{} || ptr != last || threads < 1)
        throw ConfigError("MODAL_SEP_THREADS must be a positive integer, got '" +
                          std::string(env) + "'");
    Eigen::setNbThreads(threads);
    return threads;
}

ResponseRecord acquire_input(const RunConfig& config) {
    if (config.input == kSimulateBenchmark) {
        const SystemModel model = benchmark_4dof();
        ExcitationSpec excitation;
        excitation.kind = ExcitationSpec::Kind::GaussianWhite;
        excitation.std_per_dof =
            Eigen::VectorXd::Constant(model.dof_count(), config.simulate.excitation_std);
        excitation.seed = config.simulate.seed.value_or(config.seed);
        NewmarkOptions options;
        options.substeps = config.simulate.substeps;
        options.output = config.simulate.output;
        return newmark_integrate(model, excitation, config.simulate.duration_s,
                                 config.simulate.sample_rate, InitialState{}, options);
    }
    return ingest_csv(config.input, config.sample_rate_override);
}

ModalTruth resolve_reference(const RunConfig& config) {
    if (config.reference.empty())
        throw ConfigError("no reference mode set configured");
    if (config.reference == kOracleBenchmark) return eigen_modes(benchmark_4dof());
    return load_modal_truth(config.reference);
}

RunReport run_pipeline(const RunConfig& raw_config) {
    const auto start_time = std::chrono::steady_clock::now();

    RunReport report;
    report.config_echo = stage("config", 2, [&] {
        raw_config.validate();
        return raw_config.resolved();
    });
    const RunConfig& config = report.config_echo;
    report.seed = config.seed;
    report.thread_count = stage("config", 2, [] { return apply_thread_env(); });

    const fs::path out_dir = config.output_dir;
    const AnalysisConfig& analysis = config.analysis;

    // --- input ---
    const ResponseRecord raw = stage("ingest", 3, [&] { return acquire_input(config); });
    report.response_path = "response.csv";
    stage("ingest", 3, [&] {
        write_record_csv(raw, out_dir / report.response_path);
        return 0;
    });

    // --- preprocessing ---
    Eigen::VectorXd channel_scale;
    const ResponseRecord processed = stage(
        "preprocess", 3, [&] { return preprocess(raw, config.preprocessing, &channel_scale); });
    const double fs_hz = processed.sample_rate;

    // --- training ---
    const bool training_skipped = config.network.epochs == 0;
    const TrainResult trained = stage("train", 4, [&] {
        Eigen::MatrixXd train_data = processed.samples;
        if (config.train_samples > 0 && config.train_samples < processed.sample_count())
            train_data = processed.samples.topRows(config.train_samples);
        return train(train_data, config.network);
    });
    report.network_path = "network.json";
    report.loss_trace_path = "loss_trace.csv";
    stage("train", 4, [&] {
        save_network_params(trained.params, out_dir / report.network_path);
        save_loss_trace(trained.trace, out_dir / report.loss_trace_path);
        return 0;
    });

    // --- separation and mode selection ---
    const Eigen::MatrixXd responses = stage("analysis", 5, [&] {
        return extract_modal_responses(trained.params, processed.samples, true);
    });
    SelectionCriteria criteria;
    criteria.prominence = analysis.selection_prominence;
    criteria.min_separation_bins = analysis.selection_min_separation_bins;
    criteria.welch_segment_length = analysis.welch_segment_length;
    criteria.welch_overlap = analysis.welch_overlap;
    std::vector<int> selected =
        stage("analysis", 5, [&] { return select_modes(responses, fs_hz, criteria); });

    // When nothing passes the selection test (for example with an untrained
    // network), keep every column but mark the results low-confidence rather
    // than fail: the report is still useful for diagnosis.
    const bool selection_fallback = selected.empty();
    if (selection_fallback) {
        selected.resize(static_cast<std::size_t>(responses.cols()));
        std::iota(selected.begin(), selected.end(), 0);
    }
    const bool all_low = selection_fallback || training_skipped;

    Eigen::MatrixXd selected_responses(responses.rows(),
                                       static_cast<Eigen::Index>(selected.size()));
    for (std::size_t k = 0; k < selected.size(); ++k)
        selected_responses.col(static_cast<Eigen::Index>(k)) = responses.col(selected[k]);

    // Shapes: the trained reconstruction rows when every column survived,
    // otherwise a least-squares refit on the surviving columns only. Both are
    // identified in preprocessed coordinates, so standardized channels must be
    // scaled back into physical units before the rows are reported.
    const Eigen::MatrixXd shapes = stage("analysis", 5, [&] {
        Eigen::MatrixXd rows =
            static_cast<Eigen::Index>(selected.size()) == responses.cols()
                ? extract_mode_shapes(trained.params)
                : refit_shapes(selected_responses, processed.samples);
        rows = rows * channel_scale.asDiagonal();
        for (Eigen::Index r = 0; r < rows.rows(); ++r) {
            Eigen::Index peak = 0;
            const double amplitude = rows.row(r).cwiseAbs().maxCoeff(&peak);
            if (amplitude > 0.0) rows.row(r) *= (rows(r, peak) < 0.0 ? -1.0 : 1.0) / amplitude;
        }
        return rows;
    });

    // --- per-mode frequency and damping ---
    stage("analysis", 5, [&] {
        for (std::size_t k = 0; k < selected.size(); ++k) {
            const Eigen::VectorXd trace = selected_responses.col(static_cast<Eigen::Index>(k));
            ModalEstimate mode;
            mode.shape = shapes.row(static_cast<Eigen::Index>(k)).transpose();
            mode.response_trace = trace;
            mode.confidence = all_low ? Confidence::Low : Confidence::Ok;

            const PsdEstimate psd = welch_psd(trace, fs_hz, analysis.welch_segment_length,
                                              analysis.welch_overlap);
            const double band_lo = analysis.band_lo_hz.value_or(
                psd.frequencies.size() > 1 ? psd.frequencies(1) : 0.0);
            const double band_hi =
                analysis.band_hi_hz.value_or(psd.frequencies(psd.frequencies.size() - 1));
            try {
                mode.frequency_hz = pick_peak(psd, band_lo, band_hi);
            } catch (const Error&) {
                if (!selection_fallback) throw;
                continue;  // an untrained column with no peak carries nothing
            }
            if (!(mode.frequency_hz > 0.0)) {
                if (!selection_fallback)
                    throw EmptyBand("peak frequency is not positive; widen analysis.band_hz");
                continue;
            }

            try {
                const double segment_seconds =
                    analysis.rdt_segment_periods / mode.frequency_hz;
                const RdtSignature signature =
                    rdt_extract(trace, fs_hz, analysis.rdt_trigger_sigma, segment_seconds);
                if (signature.segment_count < 20) mode.confidence = Confidence::Low;
                const double zeta = fit_damping(signature, mode.frequency_hz);
                mode.damping_ratio = std::clamp(zeta, 0.0, 0.999);
                if (std::abs(mode.damping_ratio - zeta) > 1e-9)
                    mode.confidence = Confidence::Low;
            } catch (const TooShort&) {
                mode.confidence = Confidence::Low;
            } catch (const NoTriggers&) {
                mode.confidence = Confidence::Low;
            } catch (const TooFewPeaks&) {
                mode.confidence = Confidence::Low;
            }
            report.modes.push_back(std::move(mode));
        }
        return 0;
    });
    std::stable_sort(report.modes.begin(), report.modes.end(),
                     [](const ModalEstimate& a, const ModalEstimate& b) {
                         return a.frequency_hz < b.frequency_hz;
                     });

    // --- reference comparison ---
    if (!config.reference.empty()) {
        const ModalTruth reference =
            stage("reference", 3, [&] { return resolve_reference(config); });
        report.mac_table =
            stage("analysis", 5, [&] { return match_modes(report.modes, reference); });
    }

    // --- artifacts ---
    stage("report", 3, [&] {
        if (!report.modes.empty()) {
            ResponseRecord separated;
            separated.samples.resize(responses.rows(),
                                     static_cast<Eigen::Index>(report.modes.size()));
            for (std::size_t k = 0; k < report.modes.size(); ++k) {
                separated.samples.col(static_cast<Eigen::Index>(k)) =
                    report.modes[k].response_trace;
                separated.channel_labels.push_back("mode" + std::to_string(k + 1));
            }
            separated.sample_rate = fs_hz;
            separated.quantity = processed.quantity;
            separated.seed = config.seed;
            report.responses_path = "responses.csv";
            write_record_csv(separated, out_dir / report.responses_path);

            report.shapes_path = "shapes.csv";
            detail::atomic_write(out_dir / report.shapes_path,
                                 shapes_to_csv(report.modes, processed.channel_labels));
        }
        save_report(report, out_dir / "report.json");
        return 0;
    });

    report.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_time).count();
    return report;
}

std::string report_to_json(const RunReport& report) {
    json root;
    json modes = json::array();
    for (const ModalEstimate& mode : report.modes) modes.push_back(mode_to_json(mode));
    root["modes"] = std::move(modes);
    json table = json::array();
    for (const ModePairing& pairing : report.mac_table) {
        json entry;
        entry["estimate_index"] = pairing.estimate_index;
        entry["reference_mode"] = pairing.reference_mode;
        entry["mac"] = pairing.mac_value;
        entry["frequency_error_hz"] = pairing.frequency_error_hz;
        table.push_back(std::move(entry));
    }
    root["mac_table"] = std::move(table);
    json artifacts;
    artifacts["response"] = report.response_path;
    artifacts["network"] = report.network_path;
    artifacts["loss_trace"] = report.loss_trace_path;
    if (!report.responses_path.empty()) artifacts["responses"] = report.responses_path;
    if (!report.shapes_path.empty()) artifacts["shapes"] = report.shapes_path;
    root["artifacts"] = std::move(artifacts);
    root["config"] = json::parse(run_config_to_json(report.config_echo));
    root["seed"] = report.seed;
    root["thread_count"] = report.thread_count;
    return root.dump(2) + "\n";
}

RunReport report_from_json(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
        RunReport report;
        for (const auto& entry : root.at("modes")) report.modes.push_back(mode_from_json(entry));
        for (const auto& entry : root.at("mac_table")) {
            ModePairing pairing;
            pairing.estimate_index = entry.at("estimate_index").get<int>();
            pairing.reference_mode = entry.at("reference_mode").get<int>();
            pairing.mac_value = entry.at("mac").get<double>();
            pairing.frequency_error_hz = entry.at("frequency_error_hz").get<double>();
            report.mac_table.push_back(pairing);
        }
        const json& artifacts = root.at("artifacts");
        report.response_path = artifacts.at("response").get<std::string>();
        report.network_path = artifacts.at("network").get<std::string>();
        report.loss_trace_path = artifacts.at("loss_trace").get<std::string>();
        if (artifacts.contains("responses"))
            report.responses_path = artifacts.at("responses").get<std::string>();
        if (artifacts.contains("shapes"))
            report.shapes_path = artifacts.at("shapes").get<std::string>();
        report.config_echo = parse_run_config(root.at("config").dump());
        report.seed = root.at("seed").get<std::uint64_t>();
        report.thread_count = root.at("thread_count").get<int>();
        return report;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("report: ") + e.what());
    }
}

void save_report(const RunReport& report, const std::filesystem::path& path) {
    detail::atomic_write(path, report_to_json(report));
}

RunReport load_report(const std::filesystem::path& path) {
    return report_from_json(detail::read_file(path));
}

std::vector<std::filesystem::path> emit_plot_series(const RunReport& report) {
    const fs::path out_dir = report.output_dir();
    const fs::path plots = out_dir / "plots";
    std::vector<fs::path> written;

    const std::vector<LossBreakdown> trace = load_loss_trace(out_dir / report.loss_trace_path);
    std::string loss_csv = "epoch,total\n";
    for (std::size_t epoch = 0; epoch < trace.size(); ++epoch) {
        loss_csv += std::to_string(epoch);
        loss_csv += ',';
        loss_csv += detail::format_double(trace[epoch].total);
        loss_csv += '\n';
    }
    written.push_back(plots / "loss_curve.csv");
    detail::atomic_write(written.back(), loss_csv);

    if (report.modes.empty() || report.responses_path.empty()) return written;

    const ResponseRecord responses = ingest_csv(out_dir / report.responses_path);
    const AnalysisConfig& analysis = report.config_echo.analysis;
    for (std::size_t k = 0; k < report.modes.size(); ++k) {
        const Eigen::VectorXd column = responses.samples.col(static_cast<Eigen::Index>(k));
        std::string trace_csv = "time_s,value\n";
        for (Eigen::Index i = 0; i < column.size(); ++i) {
            trace_csv += detail::format_double(static_cast<double>(i) / responses.sample_rate);
            trace_csv += ',';
            trace_csv += detail::format_double(column(i));
            trace_csv += '\n';
        }
        written.push_back(plots / ("response_mode" + std::to_string(k + 1) + ".csv"));
        detail::atomic_write(written.back(), trace_csv);

        const PsdEstimate psd = welch_psd(column, responses.sample_rate,
                                          analysis.welch_segment_length, analysis.welch_overlap);
        std::string psd_csv = "frequency_hz,power\n";
        for (Eigen::Index i = 0; i < psd.frequencies.size(); ++i) {
            psd_csv += detail::format_double(psd.frequencies(i));
            psd_csv += ',';
            psd_csv += detail::format_double(psd.power(i));
            psd_csv += '\n';
        }
        written.push_back(plots / ("psd_mode" + std::to_string(k + 1) + ".csv"));
        detail::atomic_write(written.back(), psd_csv);
    }

    // Shape-vs-channel table: one row per channel for direct plotting.
    std::string shapes_csv = "channel";
    for (std::size_t k = 0; k < report.modes.size(); ++k)
        shapes_csv += ",mode" + std::to_string(k + 1);
    shapes_csv += '\n';
    const Eigen::Index channels = report.modes.front().shape.size();
    for (Eigen::Index c = 0; c < channels; ++c) {
        shapes_csv += std::to_string(c + 1);
        for (const ModalEstimate& mode : report.modes) {
            shapes_csv += ',';
            shapes_csv += detail::format_double(mode.shape(c));
        }
        shapes_csv += '\n';
    }
    written.push_back(plots / "shapes.csv");
    detail::atomic_write(written.back(), shapes_csv);
    return written;
}

}  // namespace modalsep
