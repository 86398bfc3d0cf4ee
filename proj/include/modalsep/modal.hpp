#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "modalsep/dynamics.hpp"

namespace modalsep {

enum class Confidence { Ok, Low };

std::string to_string(Confidence confidence);
Confidence confidence_from_string(const std::string& text);

/// One identified mode: spectral peak, fitted damping, normalized shape and
/// the separated response it came from.
struct ModalEstimate {
    double frequency_hz = 0.0;
    double damping_ratio = 0.0;
    Eigen::VectorXd shape;           ///< max-abs normalized, largest entry positive
    Eigen::VectorXd response_trace;  ///< separated modal response (analysis record)
    Confidence confidence = Confidence::Ok;
};

/// Modal assurance criterion: (a.b)^2 / ((a.a)(b.b)), in [0, 1].
/// Throws ZeroVector when either vector is zero and ShapeMismatch when the
/// lengths differ.
double mac(const Eigen::VectorXd& shape_a, const Eigen::VectorXd& shape_b);

struct ModePairing {
    int estimate_index = 0;          ///< index into the estimate list
    int reference_mode = 0;          ///< index into the reference mode set
    double mac_value = 0.0;
    double frequency_error_hz = 0.0;  ///< estimate minus reference
};

/// Greedy assignment of estimates to reference modes by descending MAC, ties
/// broken by smaller |frequency error|; each estimate and each reference mode
/// is used at most once.
std::vector<ModePairing> match_modes(const std::vector<ModalEstimate>& estimates,
                                     const ModalTruth& reference);

struct SelectionCriteria {
    double prominence = 10.0;      ///< required peak power / median power ratio
    int min_separation_bins = 2;   ///< minimum peak distance between kept columns
    int welch_segment_length = 0;  ///< 0 = automatic
    double welch_overlap = 0.5;
};

/// Indices (ascending) of response columns whose spectra show one clear peak:
/// prominence at least `criteria.prominence`, and at least
/// `criteria.min_separation_bins` away from every stronger column's peak.
std::vector<int> select_modes(const Eigen::MatrixXd& responses, double sample_rate,
                              const SelectionCriteria& criteria = {});

}  // namespace modalsep
