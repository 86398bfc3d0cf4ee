#include "modalsep/config.hpp"

#include <json.hpp>

#include <cmath>
#include <initializer_list>
#include <sstream>
#include <string>
#include <utility>

#include "modalsep/errors.hpp"
#include "io_util.hpp"

namespace modalsep {

namespace {

using nlohmann::json;

void check_keys(const json& obj, const char* context,
                std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) throw ConfigError(std::string(context) + ": expected a JSON object");
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool known = false;
        for (const char* key : allowed) {
            if (it.key() == key) {
                known = true;
                break;
            }
        }
        if (!known)
            throw ConfigError(std::string(context) + ": unknown key '" + it.key() + "'");
    }
}

Eigen::VectorXd vector_from_json(const json& array, const char* context) {
    if (!array.is_array()) throw ConfigError(std::string(context) + ": expected an array");
    Eigen::VectorXd v(array.size());
    Eigen::Index i = 0;
    for (const auto& item : array) v(i++) = item.get<double>();
    return v;
}

json vector_to_json(const Eigen::VectorXd& v) {
    json array = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) array.push_back(v(i));
    return array;
}

Eigen::MatrixXd matrix_from_flat(const json& flat, Eigen::Index rows, Eigen::Index cols,
                                 const char* context) {
    if (!flat.is_array() || static_cast<Eigen::Index>(flat.size()) != rows * cols)
        throw ConfigError(std::string(context) + ": expected " + std::to_string(rows * cols) +
                          " values");
    Eigen::MatrixXd m(rows, cols);
    Eigen::Index k = 0;
    for (const auto& item : flat) {
        m(k / cols, k % cols) = item.get<double>();
        ++k;
    }
    return m;
}

json matrix_to_flat(const Eigen::MatrixXd& m) {
    json flat = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) flat.push_back(m(r, c));
    return flat;
}

}  // namespace

void RunConfig::validate() const {
    if (input.empty()) throw ConfigError("input must be a CSV path or '" +
                                         std::string(kSimulateBenchmark) + "'");
    if (output_dir.empty()) throw ConfigError("output_dir must not be empty");
    if (train_samples < 0) throw ConfigError("train_samples must be non-negative");
    if (input == kSimulateBenchmark) {
        if (!(simulate.duration_s > 0.0)) throw ConfigError("simulate.duration_s must be positive");
        if (!(simulate.sample_rate > 0.0))
            throw ConfigError("simulate.sample_rate must be positive");
        if (!(simulate.excitation_std >= 0.0))
            throw ConfigError("simulate.excitation_std must be non-negative");
        if (simulate.substeps < 1) throw ConfigError("simulate.substeps must be at least 1");
    }
    if (sample_rate_override && !(*sample_rate_override > 0.0))
        throw ConfigError("sample_rate override must be positive");
    preprocessing.validate();
    network.validate();
    if (analysis.welch_segment_length < 0)
        throw ConfigError("analysis.welch.segment_length must be non-negative");
    if (!(analysis.welch_overlap >= 0.0 && analysis.welch_overlap <= 0.9))
        throw ConfigError("analysis.welch.overlap must lie in [0, 0.9]");
    if (!(analysis.rdt_trigger_sigma > 0.0))
        throw ConfigError("analysis.rdt.trigger_sigma must be positive");
    if (!(analysis.rdt_segment_periods > 0.0))
        throw ConfigError("analysis.rdt.segment_periods must be positive");
    if (!(analysis.selection_prominence >= 0.0))
        throw ConfigError("analysis.selection.prominence must be non-negative");
    if (analysis.selection_min_separation_bins < 0)
        throw ConfigError("analysis.selection.min_separation_bins must be non-negative");
    if (analysis.band_lo_hz.has_value() != analysis.band_hi_hz.has_value())
        throw ConfigError("analysis.band_hz needs both endpoints");
    if (analysis.band_lo_hz && !(*analysis.band_lo_hz < *analysis.band_hi_hz))
        throw ConfigError("analysis.band_hz must satisfy lo < hi");
}

RunConfig RunConfig::resolved() const {
    RunConfig out = *this;
    if (!out.simulate.seed) out.simulate.seed = out.seed;
    if (!out.network_seed_explicit) {
        out.network.seed = out.seed;
        out.network_seed_explicit = true;
    }
    return out;
}

RunConfig parse_run_config(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }

    RunConfig config;
    try {
        check_keys(root, "config",
                   {"input", "sample_rate", "simulate", "preprocessing", "network", "analysis",
                    "reference", "output_dir", "seed"});
        config.input = root.value("input", config.input);
        if (root.contains("sample_rate") && !root["sample_rate"].is_null())
            config.sample_rate_override = root["sample_rate"].get<double>();
        config.seed = root.value("seed", config.seed);
        config.output_dir = root.value("output_dir", config.output_dir);
        if (root.contains("reference") && !root["reference"].is_null())
            config.reference = root["reference"].get<std::string>();

        if (root.contains("simulate")) {
            const json& sim = root["simulate"];
            check_keys(sim, "simulate",
                       {"duration_s", "sample_rate", "excitation_std", "seed", "substeps",
                        "output"});
            config.simulate.duration_s = sim.value("duration_s", config.simulate.duration_s);
            config.simulate.sample_rate = sim.value("sample_rate", config.simulate.sample_rate);
            config.simulate.excitation_std =
                sim.value("excitation_std", config.simulate.excitation_std);
            if (sim.contains("seed") && !sim["seed"].is_null())
                config.simulate.seed = sim["seed"].get<std::uint64_t>();
            config.simulate.substeps = sim.value("substeps", config.simulate.substeps);
            if (sim.contains("output"))
                config.simulate.output = quantity_from_string(sim["output"].get<std::string>());
        }

        if (root.contains("preprocessing")) {
            const json& pre = root["preprocessing"];
            check_keys(pre, "preprocessing", {"demean", "decimate_factor", "standardize"});
            config.preprocessing.demean = pre.value("demean", config.preprocessing.demean);
            config.preprocessing.decimate_factor =
                pre.value("decimate_factor", config.preprocessing.decimate_factor);
            config.preprocessing.standardize =
                pre.value("standardize", config.preprocessing.standardize);
        }

        if (root.contains("network")) {
            const json& net = root["network"];
            check_keys(net, "network",
                       {"input_dim", "separation_dim", "lambda_cov_h", "lambda_gauss",
                        "lambda_orth", "lambda_cov_q", "contrast", "logcosh_alpha",
                        "learning_rate", "rms_decay", "rms_epsilon", "batch_size", "epochs",
                        "seed", "train_samples"});
            NetworkConfig& n = config.network;
            n.input_dim = net.value("input_dim", n.input_dim);
            n.separation_dim = net.value("separation_dim", n.separation_dim);
            n.lambda_cov_h = net.value("lambda_cov_h", n.lambda_cov_h);
            n.lambda_gauss = net.value("lambda_gauss", n.lambda_gauss);
            n.lambda_orth = net.value("lambda_orth", n.lambda_orth);
            n.lambda_cov_q = net.value("lambda_cov_q", n.lambda_cov_q);
            if (net.contains("contrast"))
                n.contrast = contrast_from_string(net["contrast"].get<std::string>());
            n.logcosh_alpha = net.value("logcosh_alpha", n.logcosh_alpha);
            n.learning_rate = net.value("learning_rate", n.learning_rate);
            n.rms_decay = net.value("rms_decay", n.rms_decay);
            n.rms_epsilon = net.value("rms_epsilon", n.rms_epsilon);
            n.batch_size = net.value("batch_size", n.batch_size);
            n.epochs = net.value("epochs", n.epochs);
            if (net.contains("seed") && !net["seed"].is_null()) {
                n.seed = net["seed"].get<std::uint64_t>();
                config.network_seed_explicit = true;
            }
            config.train_samples = net.value("train_samples", config.train_samples);
        }

        if (root.contains("analysis")) {
            const json& ana = root["analysis"];
            check_keys(ana, "analysis", {"welch", "rdt", "selection", "band_hz"});
            if (ana.contains("welch")) {
                const json& welch = ana["welch"];
                check_keys(welch, "analysis.welch", {"segment_length", "overlap"});
                config.analysis.welch_segment_length =
                    welch.value("segment_length", config.analysis.welch_segment_length);
                config.analysis.welch_overlap =
                    welch.value("overlap", config.analysis.welch_overlap);
            }
            if (ana.contains("rdt")) {
                const json& rdt = ana["rdt"];
                check_keys(rdt, "analysis.rdt", {"trigger_sigma", "segment_periods"});
                config.analysis.rdt_trigger_sigma =
                    rdt.value("trigger_sigma", config.analysis.rdt_trigger_sigma);
                config.analysis.rdt_segment_periods =
                    rdt.value("segment_periods", config.analysis.rdt_segment_periods);
            }
            if (ana.contains("selection")) {
                const json& sel = ana["selection"];
                check_keys(sel, "analysis.selection", {"prominence", "min_separation_bins"});
                config.analysis.selection_prominence =
                    sel.value("prominence", config.analysis.selection_prominence);
                config.analysis.selection_min_separation_bins =
                    sel.value("min_separation_bins", config.analysis.selection_min_separation_bins);
            }
            if (ana.contains("band_hz") && !ana["band_hz"].is_null()) {
                const json& band = ana["band_hz"];
                if (!band.is_array() || band.size() != 2)
                    throw ConfigError("analysis.band_hz must be [lo, hi]");
                config.analysis.band_lo_hz = band[0].get<double>();
                config.analysis.band_hi_hz = band[1].get<double>();
            }
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }

    config.validate();
    return config;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    return parse_run_config(detail::read_file(path));
}

std::string run_config_to_json(const RunConfig& config) {
    json root;
    root["input"] = config.input;
    if (config.sample_rate_override) root["sample_rate"] = *config.sample_rate_override;
    root["seed"] = config.seed;
    root["output_dir"] = config.output_dir;
    if (!config.reference.empty()) root["reference"] = config.reference;

    json sim;
    sim["duration_s"] = config.simulate.duration_s;
    sim["sample_rate"] = config.simulate.sample_rate;
    sim["excitation_std"] = config.simulate.excitation_std;
    if (config.simulate.seed) sim["seed"] = *config.simulate.seed;
    sim["substeps"] = config.simulate.substeps;
    sim["output"] = to_string(config.simulate.output);
    root["simulate"] = std::move(sim);

    json pre;
    pre["demean"] = config.preprocessing.demean;
    pre["decimate_factor"] = config.preprocessing.decimate_factor;
    pre["standardize"] = config.preprocessing.standardize;
    root["preprocessing"] = std::move(pre);

    json net;
    net["input_dim"] = config.network.input_dim;
    net["separation_dim"] = config.network.separation_dim;
    net["lambda_cov_h"] = config.network.lambda_cov_h;
    net["lambda_gauss"] = config.network.lambda_gauss;
    net["lambda_orth"] = config.network.lambda_orth;
    net["lambda_cov_q"] = config.network.lambda_cov_q;
    net["contrast"] = to_string(config.network.contrast);
    net["logcosh_alpha"] = config.network.logcosh_alpha;
    net["learning_rate"] = config.network.learning_rate;
    net["rms_decay"] = config.network.rms_decay;
    net["rms_epsilon"] = config.network.rms_epsilon;
    net["batch_size"] = config.network.batch_size;
    net["epochs"] = config.network.epochs;
    if (config.network_seed_explicit) net["seed"] = config.network.seed;
    net["train_samples"] = config.train_samples;
    root["network"] = std::move(net);

    json ana;
    json welch;
    welch["segment_length"] = config.analysis.welch_segment_length;
    welch["overlap"] = config.analysis.welch_overlap;
    ana["welch"] = std::move(welch);
    json rdt;
    rdt["trigger_sigma"] = config.analysis.rdt_trigger_sigma;
    rdt["segment_periods"] = config.analysis.rdt_segment_periods;
    ana["rdt"] = std::move(rdt);
    json sel;
    sel["prominence"] = config.analysis.selection_prominence;
    sel["min_separation_bins"] = config.analysis.selection_min_separation_bins;
    ana["selection"] = std::move(sel);
    if (config.analysis.band_lo_hz)
        ana["band_hz"] = json::array({*config.analysis.band_lo_hz, *config.analysis.band_hi_hz});
    root["analysis"] = std::move(ana);

    return root.dump(2) + "\n";
}

std::string network_params_to_json(const NetworkParams& params) {
    json root;
    root["input_dim"] = params.w1.rows();
    root["separation_dim"] = params.w2.cols();
    root["w1"] = matrix_to_flat(params.w1);
    root["w2"] = matrix_to_flat(params.w2);
    root["w3"] = matrix_to_flat(params.w3);
    return root.dump(2) + "\n";
}

NetworkParams network_params_from_json(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
        check_keys(root, "network params", {"input_dim", "separation_dim", "w1", "w2", "w3"});
        const auto m = root.at("input_dim").get<Eigen::Index>();
        const auto n = root.at("separation_dim").get<Eigen::Index>();
        if (m < 1 || n < 1) throw ConfigError("network params: dimensions must be positive");
        NetworkParams params;
        params.w1 = matrix_from_flat(root.at("w1"), m, m, "w1");
        params.w2 = matrix_from_flat(root.at("w2"), m, n, "w2");
        params.w3 = matrix_from_flat(root.at("w3"), n, m, "w3");
        return params;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("network params: ") + e.what());
    }
}

void save_network_params(const NetworkParams& params, const std::filesystem::path& path) {
    detail::atomic_write(path, network_params_to_json(params));
}

NetworkParams load_network_params(const std::filesystem::path& path) {
    return network_params_from_json(detail::read_file(path));
}

void save_loss_trace(const std::vector<LossBreakdown>& trace,
                     const std::filesystem::path& path) {
    std::string out = "epoch,cov_h,gauss,orth_w1,cov_q,recon,total\n";
    for (std::size_t epoch = 0; epoch < trace.size(); ++epoch) {
        const LossBreakdown& row = trace[epoch];
        out += std::to_string(epoch);
        for (double value : {row.cov_h, row.gauss, row.orth_w1, row.cov_q, row.recon, row.total}) {
            out += ',';
            out += detail::format_double(value);
        }
        out += '\n';
    }
    detail::atomic_write(path, out);
}

std::vector<LossBreakdown> load_loss_trace(const std::filesystem::path& path) {
    std::istringstream in(detail::read_file(path));
    std::string line;
    if (!std::getline(in, line)) throw EmptyFile("loss trace is empty: " + path.string());
    std::vector<LossBreakdown> trace;
    std::size_t line_number = 1;
    while (std::getline(in, line)) {
        ++line_number;
        if (line.empty()) continue;
        std::istringstream fields(line);
        std::string field;
        std::vector<double> values;
        while (std::getline(fields, field, ','))
            values.push_back(detail::parse_double(
                field, path.string() + " line " + std::to_string(line_number)));
        if (values.size() != 7)
            throw RaggedRows(path.string() + " line " + std::to_string(line_number) +
                             ": expected 7 fields, got " + std::to_string(values.size()));
        LossBreakdown row;
        row.cov_h = values[1];
        row.gauss = values[2];
        row.orth_w1 = values[3];
        row.cov_q = values[4];
        row.recon = values[5];
        row.total = values[6];
        trace.push_back(row);
    }
    return trace;
}

std::string modal_truth_to_json(const ModalTruth& truth) {
    json root;
    root["frequencies_hz"] = vector_to_json(truth.frequencies_hz);
    root["damping_ratios"] = vector_to_json(truth.damping_ratios);
    root["damped_frequencies_hz"] = vector_to_json(truth.damped_frequencies_hz);
    json shapes = json::array();
    for (int i = 0; i < truth.mode_count(); ++i)
        shapes.push_back(vector_to_json(truth.shapes.col(i)));
    root["shapes"] = std::move(shapes);
    return root.dump(2) + "\n";
}

ModalTruth modal_truth_from_json(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
        check_keys(root, "mode set",
                   {"frequencies_hz", "damping_ratios", "damped_frequencies_hz", "shapes"});
        ModalTruth truth;
        truth.frequencies_hz = vector_from_json(root.at("frequencies_hz"), "frequencies_hz");
        truth.damping_ratios = vector_from_json(root.at("damping_ratios"), "damping_ratios");
        const Eigen::Index k = truth.frequencies_hz.size();
        if (truth.damping_ratios.size() != k)
            throw ConfigError("mode set: damping_ratios length differs from frequencies_hz");
        if (root.contains("damped_frequencies_hz")) {
            truth.damped_frequencies_hz =
                vector_from_json(root["damped_frequencies_hz"], "damped_frequencies_hz");
            if (truth.damped_frequencies_hz.size() != k)
                throw ConfigError("mode set: damped_frequencies_hz length differs");
        } else {
            truth.damped_frequencies_hz =
                (truth.frequencies_hz.array() *
                 (1.0 - truth.damping_ratios.array().square()).sqrt())
                    .matrix();
        }
        const json& shapes = root.at("shapes");
        if (!shapes.is_array() || static_cast<Eigen::Index>(shapes.size()) != k)
            throw ConfigError("mode set: need one shape per mode");
        for (Eigen::Index i = 0; i < k; ++i) {
            const Eigen::VectorXd column = vector_from_json(shapes[i], "shapes");
            if (i == 0) truth.shapes.resize(column.size(), k);
            if (column.size() != truth.shapes.rows())
                throw ConfigError("mode set: shape vectors differ in length");
            truth.shapes.col(i) = column;
        }
        if (k == 0) throw ConfigError("mode set: empty");
        return truth;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("mode set: ") + e.what());
    }
}

void save_modal_truth(const ModalTruth& truth, const std::filesystem::path& path) {
    detail::atomic_write(path, modal_truth_to_json(truth));
}

ModalTruth load_modal_truth(const std::filesystem::path& path) {
    return modal_truth_from_json(detail::read_file(path));
}

}  // namespace modalsep
