#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "modalsep/network.hpp"
#include "modalsep/record.hpp"

namespace modalsep {

struct TrainResult {
    NetworkParams params;
    std::vector<LossBreakdown> trace;  ///< one entry per epoch (batch means)
};

/// Trains the separation network with mini-batch RMSProp. The data is centered
/// per channel internally; weights start from seeded uniform(-1/sqrt(m),
/// 1/sqrt(m)); every epoch reshuffles the row order (same seeded generator).
/// A trailing batch smaller than 2 samples is skipped. Deterministic given
/// (data, config). Throws Diverged when the loss becomes non-finite.
TrainResult train(const Eigen::MatrixXd& data, const NetworkConfig& config);
TrainResult train(const ResponseRecord& data, const NetworkConfig& config);

/// Full-data forward pass through trained params; returns the separation-layer
/// output (N x n). With `normalize` each column is scaled to unit maximum
/// absolute value (columns that are identically zero stay zero).
Eigen::MatrixXd extract_modal_responses(const NetworkParams& params, const Eigen::MatrixXd& data,
                                        bool normalize = true);

/// Rows of w3 as mode-shape estimates, max-abs normalized per row with the
/// largest-magnitude component made positive.
Eigen::MatrixXd extract_mode_shapes(const NetworkParams& params);

/// Least-squares reconstruction weights for a fixed subset of modal responses:
/// solves min over w3' of ||data - responses * w3'||_F^2, the closed-form
/// limit of retraining the last layer alone. Returns k x m row-normalized
/// shapes. Throws RankDeficient when the responses are collinear (tolerance
/// 1e-10).
Eigen::MatrixXd refit_shapes(const Eigen::MatrixXd& selected_responses,
                             const Eigen::MatrixXd& data);
Eigen::MatrixXd refit_shapes(const Eigen::MatrixXd& selected_responses,
                             const ResponseRecord& data);

/// Monte Carlo negentropy estimate: the signal is standardized internally and
/// [E G(signal) - E G(v)]^2 is returned, with v ~ N(0,1) approximated by
/// mc_samples seeded draws. Diagnostic only. Throws ZeroVariance for a
/// constant signal.
double negentropy_estimate(const Eigen::VectorXd& signal, ContrastFunction contrast,
                           double logcosh_alpha, int mc_samples, std::uint64_t seed);

}  // namespace modalsep
