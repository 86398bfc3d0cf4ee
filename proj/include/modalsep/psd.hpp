#pragma once

#include <Eigen/Dense>

namespace modalsep {

enum class SpectralWindow { Hann };

/// One-sided Welch power spectral density on a uniform frequency grid.
///
/// Scaling is chosen so that the integral of `power` over frequency equals the
/// signal variance (Parseval, up to window bias).
struct PsdEstimate {
    Eigen::VectorXd frequencies;  ///< Hz, ascending, uniformly spaced from 0 to Nyquist
    Eigen::VectorXd power;        ///< units^2 / Hz, non-negative
    SpectralWindow window = SpectralWindow::Hann;
    int segment_length = 0;  ///< samples per averaged segment
    int overlap = 0;         ///< samples shared by consecutive segments
    int segment_count = 0;   ///< number of averaged segments

    /// Grid spacing in Hz.
    double resolution_hz() const;
};

/// Averaged modified periodogram with a periodic Hann window.
///
/// Each segment is demeaned before windowing.  `segment_length == 0` selects
/// the largest power of two not exceeding N/4 (at least 8).  Throws TooShort
/// when the signal cannot hold one segment and ConfigError for an overlap
/// fraction outside [0, 0.9].
PsdEstimate welch_psd(const Eigen::VectorXd& signal, double sample_rate,
                      int segment_length = 0, double overlap_fraction = 0.5);

/// Frequency of the largest power in [f_lo, f_hi], refined by three-point
/// parabolic interpolation on log power.  Equal maxima resolve to the lower
/// frequency.  Throws EmptyBand when no grid point falls inside the band.
double pick_peak(const PsdEstimate& psd, double f_lo, double f_hi);

}  // namespace modalsep
