#include "modalsep/network.hpp"

#include <atomic>
#include <cmath>
#include <iostream>
#include <numbers>

#include "modalsep/errors.hpp"
#include "net_internal.hpp"

namespace modalsep {

std::string to_string(ContrastFunction contrast) {
    switch (contrast) {
        case ContrastFunction::LogCosh: return "logcosh";
        case ContrastFunction::GaussExp: return "exp";
        case ContrastFunction::Quartic: return "quartic";
    }
    return "quartic";
}

ContrastFunction contrast_from_string(const std::string& name) {
    if (name == "logcosh") return ContrastFunction::LogCosh;
    if (name == "exp") return ContrastFunction::GaussExp;
    if (name == "quartic") return ContrastFunction::Quartic;
    throw ConfigError("unknown contrast function: '" + name + "'");
}

void NetworkConfig::validate() const {
    if (input_dim < 0) throw ConfigError("input_dim must be nonnegative");
    if (separation_dim < 0) throw ConfigError("separation_dim must be nonnegative");
    if (input_dim > 0 && separation_dim > input_dim)
        throw ConfigError("separation_dim must not exceed input_dim");
    auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
    if (!in_unit(lambda_cov_h) || !in_unit(lambda_gauss) || !in_unit(lambda_orth) ||
        !in_unit(lambda_cov_q))
        throw ConfigError("loss weights must lie in [0, 1]");
    if (contrast == ContrastFunction::LogCosh && (logcosh_alpha < 1.0 || logcosh_alpha > 2.0))
        throw ConfigError("logcosh_alpha must lie in [1, 2]");
    if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be positive");
    if (!(rms_decay > 0.0 && rms_decay < 1.0)) throw ConfigError("rms_decay must lie in (0, 1)");
    if (!(rms_epsilon > 0.0)) throw ConfigError("rms_epsilon must be positive");
    if (batch_size < 2) throw ConfigError("batch_size must be at least 2");
    if (epochs < 0) throw ConfigError("epochs must be nonnegative");
}

NetworkParams NetworkParams::zeros(int input_dim, int separation_dim) {
    NetworkParams params;
    params.w1 = Eigen::MatrixXd::Zero(input_dim, input_dim);
    params.w2 = Eigen::MatrixXd::Zero(input_dim, separation_dim);
    params.w3 = Eigen::MatrixXd::Zero(separation_dim, input_dim);
    return params;
}

OptimizerState OptimizerState::zeros_like(const NetworkParams& params) {
    OptimizerState state;
    state.accum_w1 = Eigen::MatrixXd::Zero(params.w1.rows(), params.w1.cols());
    state.accum_w2 = Eigen::MatrixXd::Zero(params.w2.rows(), params.w2.cols());
    state.accum_w3 = Eigen::MatrixXd::Zero(params.w3.rows(), params.w3.cols());
    return state;
}

namespace {

void check_shapes(const NetworkParams& params, const Eigen::MatrixXd& batch) {
    const Eigen::Index m = batch.cols();
    if (params.w1.rows() != m || params.w1.cols() != m)
        throw ShapeMismatch("w1 must be square with side equal to the channel count");
    if (params.w2.rows() != m) throw ShapeMismatch("w2 row count must equal the channel count");
    if (params.w3.rows() != params.w2.cols() || params.w3.cols() != m)
        throw ShapeMismatch("w3 must map separation neurons back to channels");
}

void warn_if_uncentered(const Eigen::MatrixXd& batch) {
    static std::atomic<bool> warned{false};
    if (warned.load(std::memory_order_relaxed) || batch.rows() < 2) return;
    const Eigen::RowVectorXd mean = batch.colwise().mean();
    const Eigen::RowVectorXd spread =
        ((batch.rowwise() - mean).colwise().squaredNorm() /
         static_cast<double>(batch.rows() - 1))
            .cwiseSqrt();
    for (Eigen::Index j = 0; j < batch.cols(); ++j) {
        if (std::abs(mean(j)) > 0.5 * spread(j) + 1e-12) {
            if (!warned.exchange(true)) {
                std::cerr << "warning: batch columns are not zero-mean; the network has no "
                             "bias terms, center the data first\n";
            }
            return;
        }
    }
}

inline double sign_of(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

/// Index of the column with the largest absolute sum; first index wins ties.
Eigen::Index max_abs_column(const Eigen::MatrixXd& m) {
    Eigen::Index best = 0;
    double best_sum = -1.0;
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
        const double s = m.col(j).cwiseAbs().sum();
        if (s > best_sum) {
            best_sum = s;
            best = j;
        }
    }
    return best;
}

double induced_one_norm(const Eigen::MatrixXd& m) {
    return m.cwiseAbs().colwise().sum().maxCoeff();
}

}  // namespace

namespace detail {

BackpropResult forward_backward(const NetworkParams& params, const Eigen::MatrixXd& batch,
                                const NetworkConfig& config, bool want_gradients) {
    check_shapes(params, batch);
    const Eigen::Index b = batch.rows();
    if (b < 2) throw DegenerateBatch("need at least 2 samples per batch");
    const Eigen::Index m = batch.cols();
    const Eigen::Index n = params.w2.cols();
    const double denom = static_cast<double>(b - 1);

    const Eigen::MatrixXd h = batch * params.w1.transpose();
    const Eigen::MatrixXd q = (h * params.w2).array().tanh().matrix();
    const Eigen::MatrixXd x_hat = q * params.w3;

    const Contrast contrast{config.contrast, config.logcosh_alpha};

    const Eigen::MatrixXd hc = h.rowwise() - h.colwise().mean();
    const Eigen::MatrixXd qc = q.rowwise() - q.colwise().mean();
    const Eigen::MatrixXd cov_h =
        hc.transpose() * hc / denom - Eigen::MatrixXd::Identity(m, m);
    const Eigen::MatrixXd cov_q =
        qc.transpose() * qc / denom - Eigen::MatrixXd::Identity(n, n);
    const Eigen::MatrixXd gauss =
        h.unaryExpr([&](double v) { return contrast.value(v); });
    const Eigen::MatrixXd orth =
        params.w1 * params.w1.transpose() - Eigen::MatrixXd::Identity(m, m);

    BackpropResult result;
    result.loss.cov_h = induced_one_norm(cov_h);
    result.loss.gauss = induced_one_norm(gauss);
    result.loss.orth_w1 = induced_one_norm(orth);
    result.loss.cov_q = induced_one_norm(cov_q);
    result.loss.recon = (batch - x_hat).squaredNorm() / static_cast<double>(b);
    result.loss.total = config.lambda_cov_h * result.loss.cov_h +
                        config.lambda_gauss * result.loss.gauss +
                        config.lambda_orth * result.loss.orth_w1 +
                        config.lambda_cov_q * result.loss.cov_q + result.loss.recon;
    if (!want_gradients) return result;

    // Reconstruction: d/dXh of (1/B)||X - Xh||^2.
    const Eigen::MatrixXd d_xhat = (2.0 / static_cast<double>(b)) * (x_hat - batch);
    result.grads.w3 = q.transpose() * d_xhat;
    Eigen::MatrixXd d_q = d_xhat * params.w3.transpose();

    // ||cov(Q) - I||_1 subgradient: only the maximizing column contributes.
    {
        const Eigen::Index j = max_abs_column(cov_q);
        Eigen::MatrixXd s = Eigen::MatrixXd::Zero(n, n);
        for (Eigen::Index r = 0; r < n; ++r)
            s(r, j) = config.lambda_cov_q * sign_of(cov_q(r, j));
        Eigen::MatrixXd d_qc = qc * (s + s.transpose()) / denom;
        d_qc.rowwise() -= d_qc.colwise().mean();  // chain rule through the batch mean
        d_q += d_qc;
    }

    // tanh backprop into the separation layer.
    const Eigen::MatrixXd d_z =
        d_q.cwiseProduct((1.0 - q.array().square()).matrix());
    result.grads.w2 = h.transpose() * d_z;
    Eigen::MatrixXd d_h = d_z * params.w2.transpose();

    // ||cov(H) - I||_1 subgradient.
    {
        const Eigen::Index j = max_abs_column(cov_h);
        Eigen::MatrixXd s = Eigen::MatrixXd::Zero(m, m);
        for (Eigen::Index r = 0; r < m; ++r)
            s(r, j) = config.lambda_cov_h * sign_of(cov_h(r, j));
        Eigen::MatrixXd d_hc = hc * (s + s.transpose()) / denom;
        d_hc.rowwise() -= d_hc.colwise().mean();
        d_h += d_hc;
    }

    // Contrast-function column-norm subgradient.
    {
        const Eigen::Index j = max_abs_column(gauss);
        for (Eigen::Index r = 0; r < b; ++r)
            d_h(r, j) += config.lambda_gauss * sign_of(gauss(r, j)) * contrast.derivative(h(r, j));
    }

    result.grads.w1 = d_h.transpose() * batch;

    // ||W1 W1^T - I||_1 subgradient.
    {
        const Eigen::Index j = max_abs_column(orth);
        Eigen::MatrixXd s = Eigen::MatrixXd::Zero(m, m);
        for (Eigen::Index r = 0; r < m; ++r)
            s(r, j) = config.lambda_orth * sign_of(orth(r, j));
        result.grads.w1 += (s + s.transpose()) * params.w1;
    }

    return result;
}

}  // namespace detail

Activations forward(const NetworkParams& params, const Eigen::MatrixXd& batch) {
    check_shapes(params, batch);
    warn_if_uncentered(batch);
    Activations act;
    act.h = batch * params.w1.transpose();
    act.q = (act.h * params.w2).array().tanh().matrix();
    act.x_hat = act.q * params.w3;
    return act;
}

LossBreakdown loss(const NetworkParams& params, const Eigen::MatrixXd& batch,
                   const NetworkConfig& config) {
    return detail::forward_backward(params, batch, config, false).loss;
}

NetworkGradients gradients(const NetworkParams& params, const Eigen::MatrixXd& batch,
                           const NetworkConfig& config) {
    return detail::forward_backward(params, batch, config, true).grads;
}

void rmsprop_step(NetworkParams& params, const NetworkGradients& grads, OptimizerState& state,
                  const NetworkConfig& config) {
    auto update = [&](Eigen::MatrixXd& w, const Eigen::MatrixXd& g, Eigen::MatrixXd& accum) {
        if (g.rows() != w.rows() || g.cols() != w.cols() || accum.rows() != w.rows() ||
            accum.cols() != w.cols())
            throw ShapeMismatch("gradient/accumulator shape does not match the weights");
        accum = config.rms_decay * accum + (1.0 - config.rms_decay) * g.cwiseProduct(g);
        w -= config.learning_rate *
             g.cwiseQuotient((accum.array() + config.rms_epsilon).sqrt().matrix());
    };
    update(params.w1, grads.w1, state.accum_w1);
    update(params.w2, grads.w2, state.accum_w2);
    update(params.w3, grads.w3, state.accum_w3);
    ++state.step;
}

}  // namespace modalsep
