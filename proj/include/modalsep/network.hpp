#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>

namespace modalsep {

/// Contrast function used by the non-Gaussianity loss term and the negentropy
/// diagnostic. Quartic (s^4/4) targets sub-Gaussian sources such as
/// narrowband vibration; LogCosh is the general-purpose choice and GaussExp
/// targets super-Gaussian sources.
enum class ContrastFunction { LogCosh, GaussExp, Quartic };

std::string to_string(ContrastFunction contrast);
ContrastFunction contrast_from_string(const std::string& name);

/// Hyperparameters of the separation network and its trainer.
struct NetworkConfig {
    int input_dim = 0;       ///< m: channels (0 = infer from data at train time)
    int separation_dim = 0;  ///< n: separation neurons, n <= m (0 = same as m)

    double lambda_cov_h = 0.1;  ///< weight of ||cov(H) - I||_1
    double lambda_gauss = 0.1;  ///< weight of the contrast-function column norm
    double lambda_orth = 0.1;   ///< weight of ||W1 W1^T - I||_1
    double lambda_cov_q = 0.1;  ///< weight of ||cov(Q) - I||_1

    ContrastFunction contrast = ContrastFunction::Quartic;
    double logcosh_alpha = 1.0;  ///< in [1, 2]; only used by LogCosh

    double learning_rate = 0.01;
    double rms_decay = 0.9;
    double rms_epsilon = 1e-8;
    int batch_size = 128;
    int epochs = 10000;
    std::uint64_t seed = 0;

    /// Throws ConfigError on out-of-range values.
    void validate() const;
};

/// The three weight matrices. No bias vectors anywhere: inputs are zero-mean.
struct NetworkParams {
    Eigen::MatrixXd w1;  ///< m x m, input -> whitening layer
    Eigen::MatrixXd w2;  ///< m x n, whitening -> separation layer (tanh)
    Eigen::MatrixXd w3;  ///< n x m, separation -> reconstruction; rows estimate mode shapes

    static NetworkParams zeros(int input_dim, int separation_dim);
};

/// Layer outputs for one batch.
struct Activations {
    Eigen::MatrixXd h;      ///< B x m, h = batch * w1^T
    Eigen::MatrixXd q;      ///< B x n, q = tanh(h * w2)
    Eigen::MatrixXd x_hat;  ///< B x m, x_hat = q * w3
};

/// The five additive terms of the training loss evaluated on a batch.
/// total = lambda_cov_h*cov_h + lambda_gauss*gauss + lambda_orth*orth_w1
///       + lambda_cov_q*cov_q + recon.
struct LossBreakdown {
    double cov_h = 0.0;
    double gauss = 0.0;
    double orth_w1 = 0.0;
    double cov_q = 0.0;
    double recon = 0.0;
    double total = 0.0;
};

struct NetworkGradients {
    Eigen::MatrixXd w1, w2, w3;
};

/// Per-parameter squared-gradient accumulators for RMSProp.
struct OptimizerState {
    Eigen::MatrixXd accum_w1, accum_w2, accum_w3;
    long step = 0;

    static OptimizerState zeros_like(const NetworkParams& params);
};

/// Forward pass. Expects zero-mean batch columns (warns once per process
/// otherwise). Throws ShapeMismatch on inconsistent dimensions.
Activations forward(const NetworkParams& params, const Eigen::MatrixXd& batch);

/// Composite loss on one batch. Matrix norms are the induced 1-norm (maximum
/// absolute column sum); covariances are the unbiased per-batch estimator.
/// Throws DegenerateBatch when the batch has fewer than 2 rows.
LossBreakdown loss(const NetworkParams& params, const Eigen::MatrixXd& batch,
                   const NetworkConfig& config);

/// Exact subgradient of the total loss for every weight matrix. At kinks the
/// convention is sign(0) = 0 and first-index tie-break for maxima, which makes
/// training deterministic.
NetworkGradients gradients(const NetworkParams& params, const Eigen::MatrixXd& batch,
                           const NetworkConfig& config);

/// One RMSProp update, in place:
///   G <- decay*G + (1-decay)*g.^2;  w <- w - lr * g ./ sqrt(G + eps).
void rmsprop_step(NetworkParams& params, const NetworkGradients& grads, OptimizerState& state,
                  const NetworkConfig& config);

}  // namespace modalsep
