#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "modalsep/errors.hpp"
#include "modalsep/modal.hpp"

using namespace modalsep;

namespace {

Eigen::VectorXd random_vector(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v(i) = normal(rng);
    return v;
}

Eigen::VectorXd sinusoid_column(int n, double amplitude, double f0, double fs,
                                double phase = 0.0) {
    Eigen::VectorXd x(n);
    for (int i = 0; i < n; ++i)
        x(i) = amplitude * std::sin(2.0 * std::numbers::pi * f0 * i / fs + phase);
    return x;
}

/// Reference set with orthonormal shapes (identity columns), one per mode.
ModalTruth identity_reference(int modes, double first_hz) {
    ModalTruth truth;
    truth.frequencies_hz = Eigen::VectorXd::LinSpaced(modes, first_hz, first_hz + modes - 1);
    truth.damping_ratios = Eigen::VectorXd::Constant(modes, 0.01);
    truth.damped_frequencies_hz = truth.frequencies_hz;
    truth.shapes = Eigen::MatrixXd::Identity(modes, modes);
    return truth;
}

ModalEstimate make_estimate(const Eigen::VectorXd& shape, double frequency_hz) {
    ModalEstimate estimate;
    estimate.frequency_hz = frequency_hz;
    estimate.shape = shape;
    return estimate;
}

}  // namespace

TEST_CASE("mac: identical vectors score one") {
    std::mt19937_64 rng(7);
    const Eigen::VectorXd v = random_vector(6, rng);
    CHECK(mac(v, v) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("mac: invariant to scaling of either argument") {
    std::mt19937_64 rng(8);
    const Eigen::VectorXd v = random_vector(5, rng);
    for (const double scale : {-3.0, 0.5, 1e6}) {
        CHECK(mac(v, scale * v) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(mac(scale * v, v) == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("mac: orthogonal vectors score zero") {
    Eigen::VectorXd a(2), b(2);
    a << 1.0, 0.0;
    b << 0.0, 1.0;
    CHECK(mac(a, b) == 0.0);
}

TEST_CASE("mac: hand-checked partial correlation") {
    Eigen::VectorXd a(2), b(2);
    a << 1.0, 0.0;
    b << 1.0, 1.0;
    // (a.b)^2 / (|a|^2 |b|^2) = 1 / 2
    CHECK(mac(a, b) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("mac: symmetric and bounded on random pairs") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 1000; ++trial) {
        const Eigen::VectorXd a = random_vector(8, rng);
        const Eigen::VectorXd b = random_vector(8, rng);
        const double forward = mac(a, b);
        // Same dot products in the same order, so equality holds bit-exactly.
        CHECK(forward == mac(b, a));
        CHECK(forward >= 0.0);
        CHECK(forward <= 1.0);
    }
}

TEST_CASE("mac: rejects zero vectors and length mismatches") {
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(4);
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(4);
    CHECK_THROWS_AS(mac(zero, ones), ZeroVector);
    CHECK_THROWS_AS(mac(ones, zero), ZeroVector);
    CHECK_THROWS_AS(mac(ones, Eigen::VectorXd::Ones(3)), ShapeMismatch);
}

TEST_CASE("match_modes: permuted estimates pair back to their modes") {
    const ModalTruth reference = identity_reference(4, 2.0);
    // Estimates present the reference modes in scrambled order with scaled shapes.
    const int order[4] = {2, 0, 3, 1};
    std::vector<ModalEstimate> estimates;
    for (const int r : order)
        estimates.push_back(make_estimate(-1.5 * reference.shapes.col(r),
                                          reference.frequencies_hz(r)));

    const std::vector<ModePairing> pairings = match_modes(estimates, reference);
    REQUIRE(pairings.size() == 4);
    for (int r = 0; r < 4; ++r) {
        CHECK(pairings[static_cast<std::size_t>(r)].reference_mode == r);
        CHECK(pairings[static_cast<std::size_t>(r)].mac_value ==
              doctest::Approx(1.0).epsilon(1e-12));
        CHECK(pairings[static_cast<std::size_t>(r)].frequency_error_hz ==
              doctest::Approx(0.0).epsilon(1e-12));
        // The estimate at position i holds reference mode order[i].
        CHECK(order[pairings[static_cast<std::size_t>(r)].estimate_index] == r);
    }
}

TEST_CASE("match_modes: each reference mode used once despite a distractor") {
    const ModalTruth reference = identity_reference(3, 1.0);
    std::vector<ModalEstimate> estimates;
    for (int r = 0; r < 3; ++r)
        estimates.push_back(make_estimate(reference.shapes.col(r),
                                          reference.frequencies_hz(r)));
    // A mixed shape correlates weakly with every mode and must lose each slot.
    estimates.push_back(make_estimate(Eigen::VectorXd::Ones(3), 2.5));

    const std::vector<ModePairing> pairings = match_modes(estimates, reference);
    REQUIRE(pairings.size() == 3);
    for (const ModePairing& pairing : pairings) {
        CHECK(pairing.estimate_index == pairing.reference_mode);
        CHECK(pairing.mac_value == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("match_modes: equal MAC broken by smaller frequency error") {
    const ModalTruth reference = identity_reference(2, 2.0);
    std::vector<ModalEstimate> estimates;
    // Two copies of mode 0's shape; only the closer frequency may claim it.
    estimates.push_back(make_estimate(reference.shapes.col(0), 2.5));
    estimates.push_back(make_estimate(reference.shapes.col(0), 2.1));

    const std::vector<ModePairing> pairings = match_modes(estimates, reference);
    REQUIRE(pairings.size() == 2);
    // Mode 0 goes to the closer-frequency copy; the loser falls through to
    // the orthogonal leftover reference at MAC 0.
    CHECK(pairings[0].reference_mode == 0);
    CHECK(pairings[0].estimate_index == 1);
    CHECK(pairings[0].frequency_error_hz == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(pairings[1].reference_mode == 1);
    CHECK(pairings[1].estimate_index == 0);
    CHECK(pairings[1].mac_value == doctest::Approx(0.0));
}

TEST_CASE("match_modes: no estimates yields no pairings") {
    const ModalTruth reference = identity_reference(3, 1.0);
    CHECK(match_modes({}, reference).empty());
}

TEST_CASE("select_modes: keeps well separated sinusoid columns") {
    const int n = 4096;
    const double fs = 20.0;
    Eigen::MatrixXd responses(n, 3);
    responses.col(0) = sinusoid_column(n, 1.0, 1.0, fs);
    responses.col(1) = sinusoid_column(n, 0.7, 3.0, fs);
    responses.col(2) = sinusoid_column(n, 1.3, 5.0, fs);

    const std::vector<int> selected = select_modes(responses, fs);
    CHECK(selected == std::vector<int>{0, 1, 2});
}

TEST_CASE("select_modes: rejects a broadband noise column") {
    const int n = 16384;
    const double fs = 20.0;
    std::mt19937_64 rng(21);
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::MatrixXd responses(n, 3);
    responses.col(0) = sinusoid_column(n, 1.0, 2.0, fs);
    responses.col(1) = sinusoid_column(n, 1.0, 6.0, fs);
    for (int i = 0; i < n; ++i) responses(i, 2) = normal(rng);

    // Averaging over many segments flattens the noise spectrum, so its
    // max/median prominence stays far below the threshold.
    const std::vector<int> selected = select_modes(responses, fs);
    CHECK(selected == std::vector<int>{0, 1});
}

TEST_CASE("select_modes: duplicate columns keep only the first") {
    const int n = 4096;
    const double fs = 20.0;
    Eigen::MatrixXd responses(n, 2);
    responses.col(0) = sinusoid_column(n, 1.0, 4.0, fs);
    responses.col(1) = responses.col(0);

    const std::vector<int> selected = select_modes(responses, fs);
    CHECK(selected == std::vector<int>{0});
}

TEST_CASE("select_modes: separation rule controls adjacent peaks") {
    const int n = 4096;
    const double fs = 32.0;
    SelectionCriteria criteria;
    criteria.welch_segment_length = 64;  // 0.5 Hz bins
    Eigen::MatrixXd responses(n, 2);
    responses.col(0) = sinusoid_column(n, 2.0, 4.0, fs);   // bin 8, stronger
    responses.col(1) = sinusoid_column(n, 1.0, 4.5, fs);   // bin 9

    criteria.min_separation_bins = 2;
    CHECK(select_modes(responses, fs, criteria) == std::vector<int>{0});

    criteria.min_separation_bins = 1;
    CHECK(select_modes(responses, fs, criteria) == std::vector<int>{0, 1});
}

TEST_CASE("select_modes: all-noise input may select nothing") {
    const int n = 16384;
    std::mt19937_64 rng(5);
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::MatrixXd responses(n, 2);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < 2; ++j) responses(i, j) = normal(rng);
    CHECK(select_modes(responses, 20.0).empty());
}

TEST_CASE("select_modes: validates inputs") {
    const Eigen::MatrixXd empty(128, 0);
    CHECK_THROWS_AS(select_modes(empty, 10.0), ShapeMismatch);

    const Eigen::MatrixXd one = Eigen::MatrixXd::Ones(128, 1);
    SelectionCriteria criteria;
    criteria.min_separation_bins = -1;
    CHECK_THROWS_AS(select_modes(one, 10.0, criteria), ConfigError);
}

TEST_CASE("confidence labels round-trip") {
    CHECK(to_string(Confidence::Ok) == "ok");
    CHECK(to_string(Confidence::Low) == "low");
    CHECK(confidence_from_string("ok") == Confidence::Ok);
    CHECK(confidence_from_string("low") == Confidence::Low);
    CHECK_THROWS_AS(confidence_from_string("maybe"), ConfigError);
}
