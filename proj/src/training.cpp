#include "modalsep/training.hpp"

#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "modalsep/errors.hpp"
#include "net_internal.hpp"

namespace modalsep {

namespace {

void normalize_shape_rows(Eigen::MatrixXd& shapes) {
    for (Eigen::Index r = 0; r < shapes.rows(); ++r) {
        Eigen::Index peak = 0;
        const double amplitude = shapes.row(r).cwiseAbs().maxCoeff(&peak);
        if (amplitude <= 0.0) continue;
        const double flip = shapes(r, peak) < 0.0 ? -1.0 : 1.0;
        shapes.row(r) *= flip / amplitude;
    }
}

}  // namespace

TrainResult train(const Eigen::MatrixXd& data, const NetworkConfig& config) {
    NetworkConfig cfg = config;
    if (cfg.input_dim == 0) cfg.input_dim = static_cast<int>(data.cols());
    if (cfg.separation_dim == 0) cfg.separation_dim = cfg.input_dim;
    cfg.validate();
    const Eigen::Index n_samples = data.rows();
    const Eigen::Index m = cfg.input_dim;
    const Eigen::Index n = cfg.separation_dim;
    if (data.cols() != m) throw ShapeMismatch("data channel count does not match input_dim");
    if (n_samples < cfg.batch_size)
        throw ConfigError("batch_size exceeds the number of training samples");

    const Eigen::MatrixXd centered = data.rowwise() - data.colwise().mean();

    std::mt19937_64 rng(cfg.seed);
    const double bound = 1.0 / std::sqrt(static_cast<double>(m));
    std::uniform_real_distribution<double> uniform(-bound, bound);
    auto fill = [&](Eigen::MatrixXd& w, Eigen::Index rows, Eigen::Index cols) {
        w.resize(rows, cols);
        for (Eigen::Index r = 0; r < rows; ++r)
            for (Eigen::Index c = 0; c < cols; ++c) w(r, c) = uniform(rng);
    };

    TrainResult result;
    fill(result.params.w1, m, m);
    fill(result.params.w2, m, n);
    fill(result.params.w3, n, m);

    OptimizerState state = OptimizerState::zeros_like(result.params);
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n_samples));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    Eigen::MatrixXd batch(cfg.batch_size, m);

    result.trace.reserve(static_cast<std::size_t>(cfg.epochs));
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        LossBreakdown epoch_mean;
        int batches = 0;
        for (Eigen::Index pos = 0; pos < n_samples; pos += cfg.batch_size) {
            const Eigen::Index take = std::min<Eigen::Index>(cfg.batch_size, n_samples - pos);
            if (take < 2) break;  // skip a degenerate trailing batch
            batch.resize(take, m);
            for (Eigen::Index i = 0; i < take; ++i)
                batch.row(i) = centered.row(order[static_cast<std::size_t>(pos + i)]);

            const detail::BackpropResult bp =
                detail::forward_backward(result.params, batch, cfg, true);
            if (!std::isfinite(bp.loss.total))
                throw Diverged("loss became non-finite at epoch " + std::to_string(epoch));
            rmsprop_step(result.params, bp.grads, state, cfg);

            epoch_mean.cov_h += bp.loss.cov_h;
            epoch_mean.gauss += bp.loss.gauss;
            epoch_mean.orth_w1 += bp.loss.orth_w1;
            epoch_mean.cov_q += bp.loss.cov_q;
            epoch_mean.recon += bp.loss.recon;
            epoch_mean.total += bp.loss.total;
            ++batches;
        }
        const double scale = 1.0 / std::max(batches, 1);
        epoch_mean.cov_h *= scale;
        epoch_mean.gauss *= scale;
        epoch_mean.orth_w1 *= scale;
        epoch_mean.cov_q *= scale;
        epoch_mean.recon *= scale;
        epoch_mean.total *= scale;
        result.trace.push_back(epoch_mean);
    }

    if (!result.params.w1.allFinite() || !result.params.w2.allFinite() ||
        !result.params.w3.allFinite())
        throw Diverged("weights became non-finite during training");
    return result;
}

TrainResult train(const ResponseRecord& data, const NetworkConfig& config) {
    data.validate();
    return train(data.samples, config);
}

Eigen::MatrixXd extract_modal_responses(const NetworkParams& params, const Eigen::MatrixXd& data,
                                        bool normalize) {
    const Eigen::MatrixXd centered = data.rowwise() - data.colwise().mean();
    const Eigen::MatrixXd h = centered * params.w1.transpose();
    Eigen::MatrixXd q = (h * params.w2).array().tanh().matrix();
    if (normalize) {
        for (Eigen::Index j = 0; j < q.cols(); ++j) {
            const double amplitude = q.col(j).cwiseAbs().maxCoeff();
            if (amplitude > 0.0) q.col(j) /= amplitude;
        }
    }
    return q;
}

Eigen::MatrixXd extract_mode_shapes(const NetworkParams& params) {
    Eigen::MatrixXd shapes = params.w3;
    normalize_shape_rows(shapes);
    return shapes;
}

Eigen::MatrixXd refit_shapes(const Eigen::MatrixXd& selected_responses,
                             const Eigen::MatrixXd& data) {
    if (selected_responses.rows() != data.rows())
        throw ShapeMismatch("responses and data must have the same sample count");
    if (selected_responses.cols() < 1) throw ShapeMismatch("no responses selected");

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(selected_responses);
    qr.setThreshold(1e-10);
    if (qr.rank() < selected_responses.cols())
        throw RankDeficient("selected responses are collinear");

    Eigen::MatrixXd shapes = qr.solve(data);
    normalize_shape_rows(shapes);
    return shapes;
}

Eigen::MatrixXd refit_shapes(const Eigen::MatrixXd& selected_responses,
                             const ResponseRecord& data) {
    return refit_shapes(selected_responses, data.samples);
}

double negentropy_estimate(const Eigen::VectorXd& signal, ContrastFunction contrast,
                           double logcosh_alpha, int mc_samples, std::uint64_t seed) {
    if (mc_samples < 1) throw ConfigError("mc_samples must be positive");
    const Eigen::Index n = signal.size();
    if (n < 2) throw ZeroVariance("signal too short to standardize");
    const double mean = signal.mean();
    const double variance =
        (signal.array() - mean).square().sum() / static_cast<double>(n - 1);
    if (!(variance > 0.0)) throw ZeroVariance("signal is constant");
    const double scale = 1.0 / std::sqrt(variance);

    const detail::Contrast g{contrast, logcosh_alpha};

    double signal_mean_g = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) signal_mean_g += g.value((signal(i) - mean) * scale);
    signal_mean_g /= static_cast<double>(n);

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    double gauss_mean_g = 0.0;
    for (int i = 0; i < mc_samples; ++i) gauss_mean_g += g.value(normal(rng));
    gauss_mean_g /= static_cast<double>(mc_samples);

    const double difference = signal_mean_g - gauss_mean_g;
    return difference * difference;
}

}  // namespace modalsep
