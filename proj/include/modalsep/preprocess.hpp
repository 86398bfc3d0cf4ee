#pragma once

#include <Eigen/Dense>

#include "modalsep/record.hpp"

namespace modalsep {

struct PreprocessConfig {
    bool demean = true;
    int decimate_factor = 1;  ///< 1 = keep the original rate
    bool standardize = false;

    void validate() const;
};

/// Per-channel mean removal, then integer-factor decimation (block averages,
/// which is a moving-average anti-alias pass of length = factor sampled every
/// factor-th point), then optional unit-variance standardization.
///
/// When `channel_scale` is non-null it receives the per-channel standard
/// deviations divided out by standardization (all ones when disabled), so mode
/// shapes can be mapped back to physical units.
ResponseRecord preprocess(const ResponseRecord& record, const PreprocessConfig& config,
                          Eigen::VectorXd* channel_scale = nullptr);

}  // namespace modalsep
