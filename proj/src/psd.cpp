#include "modalsep/psd.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <string>
#include <vector>

#include "modalsep/errors.hpp"

namespace modalsep {

namespace {

// The FFTW planner mutates global state; plan creation/destruction must be
// serialized even though plan execution is thread-safe.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

int default_segment_length(Eigen::Index n) {
    Eigen::Index target = n / 4;
    Eigen::Index seg = 8;
    while (seg * 2 <= target) seg *= 2;
    return static_cast<int>(seg);
}

}  // namespace

double PsdEstimate::resolution_hz() const {
    if (frequencies.size() < 2) return 0.0;
    return frequencies(1) - frequencies(0);
}

PsdEstimate welch_psd(const Eigen::VectorXd& signal, double sample_rate,
                      int segment_length, double overlap_fraction) {
    if (!(sample_rate > 0.0)) throw ConfigError("sample_rate must be positive");
    if (!(overlap_fraction >= 0.0 && overlap_fraction <= 0.9))
        throw ConfigError("overlap_fraction must lie in [0, 0.9]");
    const Eigen::Index n = signal.size();
    if (segment_length == 0) segment_length = default_segment_length(n);
    if (segment_length < 8) throw ConfigError("segment_length must be at least 8");
    if (n < segment_length)
        throw TooShort("signal shorter than one Welch segment (" + std::to_string(n) + " < " +
                       std::to_string(segment_length) + " samples)");

    const int seg = segment_length;
    const int overlap = static_cast<int>(std::lround(overlap_fraction * seg));
    const int hop = std::max(1, seg - overlap);
    const int bins = seg / 2 + 1;

    // Periodic Hann window.
    std::vector<double> window(static_cast<std::size_t>(seg));
    double window_power = 0.0;
    for (int i = 0; i < seg; ++i) {
        const double w = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * i / seg));
        window[static_cast<std::size_t>(i)] = w;
        window_power += w * w;
    }

    double* in = fftw_alloc_real(static_cast<std::size_t>(seg));
    fftw_complex* out = fftw_alloc_complex(static_cast<std::size_t>(bins));
    fftw_plan plan = nullptr;
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        plan = fftw_plan_dft_r2c_1d(seg, in, out, FFTW_ESTIMATE);
    }
    if (plan == nullptr) {
        fftw_free(in);
        fftw_free(out);
        throw Error("failed to create FFT plan");
    }

    Eigen::VectorXd accumulated = Eigen::VectorXd::Zero(bins);
    int count = 0;
    for (Eigen::Index start = 0; start + seg <= n; start += hop) {
        double mean = 0.0;
        for (int i = 0; i < seg; ++i) mean += signal(start + i);
        mean /= seg;
        for (int i = 0; i < seg; ++i)
            in[i] = (signal(start + i) - mean) * window[static_cast<std::size_t>(i)];
        fftw_execute(plan);
        for (int k = 0; k < bins; ++k)
            accumulated(k) += out[k][0] * out[k][0] + out[k][1] * out[k][1];
        ++count;
    }

    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        fftw_destroy_plan(plan);
    }
    fftw_free(in);
    fftw_free(out);

    PsdEstimate psd;
    psd.segment_length = seg;
    psd.overlap = overlap;
    psd.segment_count = count;
    psd.frequencies = Eigen::VectorXd::LinSpaced(bins, 0.0, sample_rate * (bins - 1) / seg);
    // One-sided scaling: 1 / (fs * sum(w^2)); interior bins carry the energy of
    // both the positive- and negative-frequency halves.
    const double scale = 1.0 / (sample_rate * window_power * count);
    psd.power = accumulated * scale;
    for (int k = 1; k < bins; ++k) {
        const bool nyquist = (seg % 2 == 0) && (k == bins - 1);
        if (!nyquist) psd.power(k) *= 2.0;
    }
    return psd;
}

double pick_peak(const PsdEstimate& psd, double f_lo, double f_hi) {
    const Eigen::Index bins = psd.frequencies.size();
    if (bins == 0) throw EmptyBand("spectrum has no bins");
    if (!(f_lo <= f_hi)) throw EmptyBand("band is empty (f_lo > f_hi)");

    Eigen::Index best = -1;
    double best_power = -std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < bins; ++k) {
        const double f = psd.frequencies(k);
        if (f < f_lo || f > f_hi) continue;
        if (psd.power(k) > best_power) {  // strict: ties keep the lower frequency
            best_power = psd.power(k);
            best = k;
        }
    }
    if (best < 0)
        throw EmptyBand("no spectral bins between " + std::to_string(f_lo) + " and " +
                        std::to_string(f_hi) + " Hz");

    // Parabolic refinement on log power; skipped at grid edges or when a
    // neighbor is non-positive (log undefined) or the vertex is not a maximum.
    if (best == 0 || best == bins - 1) return psd.frequencies(best);
    const double left = psd.power(best - 1);
    const double center = psd.power(best);
    const double right = psd.power(best + 1);
    if (!(left > 0.0 && center > 0.0 && right > 0.0)) return psd.frequencies(best);
    const double l = std::log(left);
    const double c = std::log(center);
    const double r = std::log(right);
    const double curvature = l - 2.0 * c + r;
    if (!(curvature < 0.0)) return psd.frequencies(best);
    double delta = 0.5 * (l - r) / curvature;
    delta = std::clamp(delta, -0.5, 0.5);
    return psd.frequencies(best) + delta * psd.resolution_hz();
}

}  // namespace modalsep
