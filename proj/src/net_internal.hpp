#pragma once

// Shared forward/backward kernel used by the public loss/gradients operations
// and the training loop; internal to the library.

#include <Eigen/Dense>
#include <cmath>
#include <numbers>

#include "modalsep/network.hpp"

namespace modalsep::detail {

/// Pointwise contrast function G and its derivative.
struct Contrast {
    ContrastFunction kind;
    double alpha;

    double value(double s) const {
        switch (kind) {
            case ContrastFunction::LogCosh: {
                // log(cosh(x)) = |x| + log1p(exp(-2|x|)) - log(2), overflow-safe
                const double x = std::abs(alpha * s);
                return (x + std::log1p(std::exp(-2.0 * x)) - std::numbers::ln2) / alpha;
            }
            case ContrastFunction::GaussExp:
                return -std::exp(-0.5 * s * s);
            case ContrastFunction::Quartic:
                return 0.25 * s * s * s * s;
        }
        return 0.0;
    }

    double derivative(double s) const {
        switch (kind) {
            case ContrastFunction::LogCosh: return std::tanh(alpha * s);
            case ContrastFunction::GaussExp: return s * std::exp(-0.5 * s * s);
            case ContrastFunction::Quartic: return s * s * s;
        }
        return 0.0;
    }
};

struct BackpropResult {
    LossBreakdown loss;
    NetworkGradients grads;  // empty matrices unless gradients were requested
};

BackpropResult forward_backward(const NetworkParams& params, const Eigen::MatrixXd& batch,
                                const NetworkConfig& config, bool want_gradients);

}  // namespace modalsep::detail
