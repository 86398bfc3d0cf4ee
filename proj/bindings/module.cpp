// Python bindings: the library's main operations with NumPy-backed matrices.
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <cstdint>
#include <optional>
#include <string>

#include "modalsep/config.hpp"
#include "modalsep/dynamics.hpp"
#include "modalsep/errors.hpp"
#include "modalsep/modal.hpp"
#include "modalsep/network.hpp"
#include "modalsep/pipeline.hpp"
#include "modalsep/preprocess.hpp"
#include "modalsep/psd.hpp"
#include "modalsep/rdt.hpp"
#include "modalsep/training.hpp"

namespace py = pybind11;
using namespace modalsep;

PYBIND11_MODULE(_core, m) {
    m.doc() = "output-only modal identification via a self-coding separation network";

    const py::exception<Error> base_error(m, "Error");
    py::register_exception<ConfigError>(m, "ConfigurationError", base_error);
    py::register_exception<Diverged>(m, "DivergedError", base_error);

    py::enum_<ContrastFunction>(m, "ContrastFunction")
        .value("LogCosh", ContrastFunction::LogCosh)
        .value("GaussExp", ContrastFunction::GaussExp)
        .value("Quartic", ContrastFunction::Quartic);

    py::enum_<Quantity>(m, "Quantity")
        .value("Acceleration", Quantity::Acceleration)
        .value("Displacement", Quantity::Displacement);

    py::enum_<Confidence>(m, "Confidence")
        .value("Ok", Confidence::Ok)
        .value("Low", Confidence::Low);

    py::class_<NetworkConfig>(m, "NetworkConfig")
        .def(py::init<>())
        .def_readwrite("input_dim", &NetworkConfig::input_dim)
        .def_readwrite("separation_dim", &NetworkConfig::separation_dim)
        .def_readwrite("lambda_cov_h", &NetworkConfig::lambda_cov_h)
        .def_readwrite("lambda_gauss", &NetworkConfig::lambda_gauss)
        .def_readwrite("lambda_orth", &NetworkConfig::lambda_orth)
        .def_readwrite("lambda_cov_q", &NetworkConfig::lambda_cov_q)
        .def_readwrite("contrast", &NetworkConfig::contrast)
        .def_readwrite("logcosh_alpha", &NetworkConfig::logcosh_alpha)
        .def_readwrite("learning_rate", &NetworkConfig::learning_rate)
        .def_readwrite("rms_decay", &NetworkConfig::rms_decay)
        .def_readwrite("rms_epsilon", &NetworkConfig::rms_epsilon)
        .def_readwrite("batch_size", &NetworkConfig::batch_size)
        .def_readwrite("epochs", &NetworkConfig::epochs)
        .def_readwrite("seed", &NetworkConfig::seed)
        .def("validate", &NetworkConfig::validate);

    py::class_<NetworkParams>(m, "NetworkParams")
        .def(py::init<>())
        .def_static("zeros", &NetworkParams::zeros, py::arg("input_dim"),
                    py::arg("separation_dim"))
        .def_readwrite("w1", &NetworkParams::w1)
        .def_readwrite("w2", &NetworkParams::w2)
        .def_readwrite("w3", &NetworkParams::w3);

    py::class_<LossBreakdown>(m, "LossBreakdown")
        .def_readonly("cov_h", &LossBreakdown::cov_h)
        .def_readonly("gauss", &LossBreakdown::gauss)
        .def_readonly("orth_w1", &LossBreakdown::orth_w1)
        .def_readonly("cov_q", &LossBreakdown::cov_q)
        .def_readonly("recon", &LossBreakdown::recon)
        .def_readonly("total", &LossBreakdown::total);

    py::class_<TrainResult>(m, "TrainResult")
        .def_readonly("params", &TrainResult::params)
        .def_readonly("trace", &TrainResult::trace);

    py::class_<ResponseRecord>(m, "ResponseRecord")
        .def(py::init<>())
        .def_readwrite("samples", &ResponseRecord::samples)
        .def_readwrite("sample_rate", &ResponseRecord::sample_rate)
        .def_readwrite("channel_labels", &ResponseRecord::channel_labels)
        .def_readwrite("quantity", &ResponseRecord::quantity)
        .def_readwrite("seed", &ResponseRecord::seed)
        .def_property_readonly("sample_count", &ResponseRecord::sample_count)
        .def_property_readonly("channel_count", &ResponseRecord::channel_count);

    py::class_<ModalTruth>(m, "ModalTruth")
        .def(py::init<>())
        .def_readwrite("frequencies_hz", &ModalTruth::frequencies_hz)
        .def_readwrite("damping_ratios", &ModalTruth::damping_ratios)
        .def_readwrite("damped_frequencies_hz", &ModalTruth::damped_frequencies_hz)
        .def_readwrite("shapes", &ModalTruth::shapes)
        .def_property_readonly("mode_count", &ModalTruth::mode_count);

    py::class_<PsdEstimate>(m, "PsdEstimate")
        .def_readonly("frequencies", &PsdEstimate::frequencies)
        .def_readonly("power", &PsdEstimate::power)
        .def_readonly("segment_length", &PsdEstimate::segment_length)
        .def_readonly("segment_count", &PsdEstimate::segment_count)
        .def_property_readonly("resolution_hz", &PsdEstimate::resolution_hz);

    py::class_<RdtSignature>(m, "RdtSignature")
        .def_readonly("lags", &RdtSignature::lags)
        .def_readonly("amplitude", &RdtSignature::amplitude)
        .def_readonly("trigger_level", &RdtSignature::trigger_level)
        .def_readonly("segment_count", &RdtSignature::segment_count);

    py::class_<ModalEstimate>(m, "ModalEstimate")
        .def_readonly("frequency_hz", &ModalEstimate::frequency_hz)
        .def_readonly("damping_ratio", &ModalEstimate::damping_ratio)
        .def_readonly("shape", &ModalEstimate::shape)
        .def_readonly("response_trace", &ModalEstimate::response_trace)
        .def_readonly("confidence", &ModalEstimate::confidence);

    py::class_<ModePairing>(m, "ModePairing")
        .def_readonly("estimate_index", &ModePairing::estimate_index)
        .def_readonly("reference_mode", &ModePairing::reference_mode)
        .def_readonly("mac", &ModePairing::mac_value)
        .def_readonly("frequency_error_hz", &ModePairing::frequency_error_hz);

    py::class_<RunReport>(m, "RunReport")
        .def_readonly("modes", &RunReport::modes)
        .def_readonly("mac_table", &RunReport::mac_table)
        .def_readonly("seed", &RunReport::seed)
        .def_readonly("thread_count", &RunReport::thread_count)
        .def_readonly("wall_time_s", &RunReport::wall_time_s)
        .def_property_readonly("output_dir", [](const RunReport& report) {
            return report.output_dir().string();
        });

    // ---- structural dynamics ----
    m.def("benchmark_modes", [] { return eigen_modes(benchmark_4dof()); },
          "exact modal decomposition of the built-in 4-DOF benchmark");
    m.def(
        "benchmark_modes_at",
        [](double sample_rate, int substeps) {
            return discretized_modes(eigen_modes(benchmark_4dof()), sample_rate, substeps);
        },
        py::arg("sample_rate"), py::arg("substeps") = 1,
        "benchmark modes as realized by the integrator at a finite step");
    m.def(
        "simulate_benchmark",
        [](double duration_s, double sample_rate, double excitation_std, std::uint64_t seed,
           int substeps) {
            ExcitationSpec excitation;
            excitation.std_per_dof =
                Eigen::VectorXd::Constant(benchmark_4dof().dof_count(), excitation_std);
            excitation.seed = seed;
            NewmarkOptions options;
            options.substeps = substeps;
            return newmark_integrate(benchmark_4dof(), excitation, duration_s, sample_rate,
                                     InitialState{}, options);
        },
        py::arg("duration_s"), py::arg("sample_rate"), py::arg("excitation_std") = 1.0,
        py::arg("seed") = 0, py::arg("substeps") = 1,
        "white-noise response record of the 4-DOF benchmark");

    // ---- network ----
    m.def("loss", &loss, py::arg("params"), py::arg("batch"), py::arg("config"),
          "composite training loss on one zero-mean batch");
    m.def("train",
          py::overload_cast<const Eigen::MatrixXd&, const NetworkConfig&>(&train),
          py::arg("data"), py::arg("config"),
          "train the separation network on an N x m record");
    m.def("extract_modal_responses", &extract_modal_responses, py::arg("params"),
          py::arg("data"), py::arg("normalize") = true);
    m.def("extract_mode_shapes", &extract_mode_shapes, py::arg("params"));
    m.def("refit_shapes",
          py::overload_cast<const Eigen::MatrixXd&, const Eigen::MatrixXd&>(&refit_shapes),
          py::arg("selected_responses"), py::arg("data"),
          "least-squares mode shapes for a fixed subset of responses");
    m.def("negentropy_estimate", &negentropy_estimate, py::arg("signal"), py::arg("contrast"),
          py::arg("logcosh_alpha") = 1.0, py::arg("mc_samples") = 4096, py::arg("seed") = 0);

    // ---- signal analysis ----
    m.def("welch_psd", &welch_psd, py::arg("signal"), py::arg("sample_rate"),
          py::arg("segment_length") = 0, py::arg("overlap") = 0.5);
    m.def("pick_peak", &pick_peak, py::arg("psd"), py::arg("f_lo"), py::arg("f_hi"));
    m.def("rdt_extract", &rdt_extract, py::arg("signal"), py::arg("sample_rate"),
          py::arg("trigger_sigma") = 1.0, py::arg("segment_seconds") = 1.0);
    m.def("fit_damping", &fit_damping, py::arg("signature"), py::arg("frequency_hint"));

    // ---- modal tools ----
    m.def("mac", &mac, py::arg("shape_a"), py::arg("shape_b"));
    m.def("match_modes", &match_modes, py::arg("estimates"), py::arg("reference"));
    m.def(
        "select_modes",
        [](const Eigen::MatrixXd& responses, double sample_rate, double prominence,
           int min_separation_bins, int welch_segment_length, double welch_overlap) {
            SelectionCriteria criteria;
            criteria.prominence = prominence;
            criteria.min_separation_bins = min_separation_bins;
            criteria.welch_segment_length = welch_segment_length;
            criteria.welch_overlap = welch_overlap;
            return select_modes(responses, sample_rate, criteria);
        },
        py::arg("responses"), py::arg("sample_rate"), py::arg("prominence") = 10.0,
        py::arg("min_separation_bins") = 2, py::arg("welch_segment_length") = 0,
        py::arg("welch_overlap") = 0.5);

    // ---- pipeline ----
    m.def(
        "run_json",
        [](const std::string& config_json) { return run_pipeline(parse_run_config(config_json)); },
        py::arg("config_json"),
        "full pipeline from a configuration JSON string; artifacts land in output_dir");
    m.def(
        "load_report",
        [](const std::filesystem::path& path) { return load_report(path); },
        py::arg("path"));

    m.attr("__version__") = "0.1.0";
}
