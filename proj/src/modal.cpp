#include "modalsep/modal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "modalsep/errors.hpp"
#include "modalsep/psd.hpp"

namespace modalsep {

std::string to_string(Confidence confidence) {
    return confidence == Confidence::Ok ? "ok" : "low";
}

Confidence confidence_from_string(const std::string& text) {
    if (text == "ok") return Confidence::Ok;
    if (text == "low") return Confidence::Low;
    throw ConfigError("unknown confidence '" + text + "' (expected ok|low)");
}

double mac(const Eigen::VectorXd& shape_a, const Eigen::VectorXd& shape_b) {
    if (shape_a.size() != shape_b.size())
        throw ShapeMismatch("mode shapes have different lengths (" +
                            std::to_string(shape_a.size()) + " vs " +
                            std::to_string(shape_b.size()) + ")");
    const double aa = shape_a.squaredNorm();
    const double bb = shape_b.squaredNorm();
    if (!(aa > 0.0) || !(bb > 0.0)) throw ZeroVector("mode shape is all zeros");
    const double ab = shape_a.dot(shape_b);
    return (ab * ab) / (aa * bb);
}

std::vector<ModePairing> match_modes(const std::vector<ModalEstimate>& estimates,
                                     const ModalTruth& reference) {
    std::vector<ModePairing> candidates;
    for (int e = 0; e < static_cast<int>(estimates.size()); ++e) {
        for (int r = 0; r < reference.mode_count(); ++r) {
            ModePairing pairing;
            pairing.estimate_index = e;
            pairing.reference_mode = r;
            pairing.mac_value = mac(estimates[static_cast<std::size_t>(e)].shape,
                                    reference.shapes.col(r));
            pairing.frequency_error_hz = estimates[static_cast<std::size_t>(e)].frequency_hz -
                                         reference.frequencies_hz(r);
            candidates.push_back(pairing);
        }
    }
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const ModePairing& a, const ModePairing& b) {
                         if (a.mac_value != b.mac_value) return a.mac_value > b.mac_value;
                         return std::abs(a.frequency_error_hz) < std::abs(b.frequency_error_hz);
                     });

    std::vector<bool> estimate_used(estimates.size(), false);
    std::vector<bool> reference_used(static_cast<std::size_t>(reference.mode_count()), false);
    std::vector<ModePairing> pairings;
    for (const ModePairing& candidate : candidates) {
        if (estimate_used[static_cast<std::size_t>(candidate.estimate_index)]) continue;
        if (reference_used[static_cast<std::size_t>(candidate.reference_mode)]) continue;
        estimate_used[static_cast<std::size_t>(candidate.estimate_index)] = true;
        reference_used[static_cast<std::size_t>(candidate.reference_mode)] = true;
        pairings.push_back(candidate);
    }
    std::sort(pairings.begin(), pairings.end(), [](const ModePairing& a, const ModePairing& b) {
        return a.reference_mode < b.reference_mode;
    });
    return pairings;
}

namespace {

struct ColumnPeak {
    int column = 0;
    Eigen::Index bin = 0;
    double prominence = 0.0;
};

double median_of(Eigen::VectorXd values) {
    const Eigen::Index n = values.size();
    if (n == 0) return 0.0;
    std::sort(values.data(), values.data() + n);
    if (n % 2 == 1) return values(n / 2);
    return 0.5 * (values(n / 2 - 1) + values(n / 2));
}

}  // namespace

std::vector<int> select_modes(const Eigen::MatrixXd& responses, double sample_rate,
                              const SelectionCriteria& criteria) {
    if (responses.cols() < 1) throw ShapeMismatch("need at least one response column");
    if (criteria.min_separation_bins < 0)
        throw ConfigError("min_separation_bins must be non-negative");

    std::vector<ColumnPeak> peaks;
    for (int j = 0; j < responses.cols(); ++j) {
        const PsdEstimate psd = welch_psd(responses.col(j), sample_rate,
                                          criteria.welch_segment_length, criteria.welch_overlap);
        ColumnPeak peak;
        peak.column = j;
        // Skip the DC bin: responses are demeaned and residual DC power would
        // otherwise masquerade as a peak.
        const Eigen::Index bins = psd.power.size();
        if (bins < 2) continue;
        double best = -std::numeric_limits<double>::infinity();
        for (Eigen::Index k = 1; k < bins; ++k) {
            if (psd.power(k) > best) {
                best = psd.power(k);
                peak.bin = k;
            }
        }
        const double median = median_of(psd.power.segment(1, bins - 1));
        peak.prominence = median > 0.0 ? best / median : 0.0;
        peaks.push_back(peak);
    }

    // Strongest first; ties keep the lower column index (stable sort).
    std::stable_sort(peaks.begin(), peaks.end(), [](const ColumnPeak& a, const ColumnPeak& b) {
        return a.prominence > b.prominence;
    });

    std::vector<ColumnPeak> kept;
    for (const ColumnPeak& peak : peaks) {
        if (peak.prominence < criteria.prominence) continue;
        const bool crowded =
            std::any_of(kept.begin(), kept.end(), [&](const ColumnPeak& other) {
                return std::abs(static_cast<long>(peak.bin) - static_cast<long>(other.bin)) <
                       criteria.min_separation_bins;
            });
        if (!crowded) kept.push_back(peak);
    }

    std::vector<int> selected;
    selected.reserve(kept.size());
    for (const ColumnPeak& peak : kept) selected.push_back(peak.column);
    std::sort(selected.begin(), selected.end());
    return selected;
}

}  // namespace modalsep
