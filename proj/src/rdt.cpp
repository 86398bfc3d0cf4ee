#include "modalsep/rdt.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "modalsep/errors.hpp"

namespace modalsep {

RdtSignature rdt_extract(const Eigen::VectorXd& signal, double sample_rate,
                         double trigger_sigma, double segment_seconds) {
    if (!(sample_rate > 0.0)) throw ConfigError("sample_rate must be positive");
    if (!(trigger_sigma > 0.0)) throw ConfigError("trigger_sigma must be positive");
    if (!(segment_seconds > 0.0)) throw ConfigError("segment_seconds must be positive");
    const Eigen::Index n = signal.size();
    const Eigen::Index seg = std::llround(segment_seconds * sample_rate);
    if (seg < 2) throw ConfigError("segment covers fewer than 2 samples");
    if (n < 10 * seg)
        throw TooShort("record holds fewer than 10 segment lengths (" + std::to_string(n) +
                       " < " + std::to_string(10 * seg) + " samples)");

    const double mean = signal.mean();
    const double stddev = std::sqrt((signal.array() - mean).square().sum() / n);
    const double level = trigger_sigma * stddev;

    // Upward level crossings; the segment starts at whichever of the two
    // bracketing samples lies closer to the trigger level, so amplitude[0]
    // tracks the level itself.  A short refractory gap suppresses retriggering
    // on the same crossing.
    const Eigen::Index gap = std::max<Eigen::Index>(1, seg / 20);
    Eigen::VectorXd accumulated = Eigen::VectorXd::Zero(seg);
    int count = 0;
    Eigen::Index next_allowed = 0;
    for (Eigen::Index i = 1; i < n; ++i) {
        if (!(signal(i - 1) < level && signal(i) >= level)) continue;
        const Eigen::Index start =
            (std::abs(signal(i) - level) < std::abs(signal(i - 1) - level)) ? i : i - 1;
        if (start < next_allowed || start + seg > n) continue;
        accumulated += signal.segment(start, seg);
        ++count;
        next_allowed = start + gap;
    }
    if (count < 2) throw NoTriggers("fewer than 2 upward crossings of the trigger level");

    RdtSignature signature;
    signature.lags = Eigen::VectorXd::LinSpaced(seg, 0.0, static_cast<double>(seg - 1)) /
                     sample_rate;
    signature.amplitude = accumulated / count;
    signature.trigger_level = level;
    signature.segment_count = count;
    return signature;
}

double fit_damping(const RdtSignature& signature, double frequency_hint) {
    if (!(frequency_hint > 0.0)) throw ConfigError("frequency_hint must be positive");
    const Eigen::Index n = signature.amplitude.size();

    // Envelope samples: interior local maxima of the rectified signature.
    std::vector<double> times;
    std::vector<double> log_values;
    for (Eigen::Index i = 1; i + 1 < n; ++i) {
        const double prev = std::abs(signature.amplitude(i - 1));
        const double here = std::abs(signature.amplitude(i));
        const double next = std::abs(signature.amplitude(i + 1));
        if (here > prev && here >= next && here > 0.0) {
            times.push_back(signature.lags(i));
            log_values.push_back(std::log(here));
        }
    }
    if (times.size() < 3)
        throw TooFewPeaks("need at least 3 envelope maxima, found " +
                          std::to_string(times.size()));

    const auto count = static_cast<double>(times.size());
    double t_mean = 0.0;
    double y_mean = 0.0;
    for (std::size_t k = 0; k < times.size(); ++k) {
        t_mean += times[k];
        y_mean += log_values[k];
    }
    t_mean /= count;
    y_mean /= count;
    double stt = 0.0;
    double sty = 0.0;
    for (std::size_t k = 0; k < times.size(); ++k) {
        stt += (times[k] - t_mean) * (times[k] - t_mean);
        sty += (times[k] - t_mean) * (log_values[k] - y_mean);
    }
    if (!(stt > 0.0)) throw TooFewPeaks("envelope maxima are not spread in time");
    const double slope = sty / stt;

    // slope = -zeta * omega with omega = 2*pi*frequency_hint*sqrt(1 - zeta^2);
    // two fixed-point passes resolve the sqrt factor for zeta < 0.1.
    double zeta = 0.0;
    for (int iteration = 0; iteration < 2; ++iteration) {
        const double factor = std::sqrt(std::max(1.0 - zeta * zeta, 0.01));
        zeta = -slope / (2.0 * std::numbers::pi * frequency_hint * factor);
    }
    return zeta;
}

}  // namespace modalsep
