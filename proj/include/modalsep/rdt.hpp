#pragma once

#include <Eigen/Dense>

namespace modalsep {

/// Averaged free-decay signature extracted by the random decrement technique.
struct RdtSignature {
    Eigen::VectorXd lags;       ///< seconds, starting at 0, uniform spacing
    Eigen::VectorXd amplitude;  ///< ensemble average of the triggered segments
    double trigger_level = 0.0;
    int segment_count = 0;  ///< below 20 the damping fit is low-confidence
};

/// Extracts the decrement signature by averaging segments that start where the
/// signal crosses `trigger_sigma` standard deviations with positive slope.
/// Throws TooShort when the record holds fewer than 10 segment lengths and
/// NoTriggers when fewer than 2 crossings are found.
RdtSignature rdt_extract(const Eigen::VectorXd& signal, double sample_rate,
                         double trigger_sigma = 1.0, double segment_seconds = 1.0);

/// Damping ratio from a straight-line fit to the log of the signature's
/// envelope maxima.  `frequency_hint` is the oscillation frequency in Hz
/// (typically the spectral peak).  Throws TooFewPeaks when fewer than 3
/// envelope points are available.
double fit_damping(const RdtSignature& signature, double frequency_hint);

}  // namespace modalsep
