#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <random>

#include "modalsep/dynamics.hpp"
#include "modalsep/errors.hpp"
#include "modalsep/psd.hpp"

using namespace modalsep;

namespace {

double integrated_power(const PsdEstimate& psd) {
    // One-sided PSD: integrating over frequency recovers the signal variance.
    return psd.power.sum() * psd.resolution_hz();
}

Eigen::VectorXd white_noise(int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::VectorXd x(n);
    for (int i = 0; i < n; ++i) x(i) = normal(rng);
    return x;
}

Eigen::VectorXd sinusoid(int n, double amplitude, double f0, double fs) {
    Eigen::VectorXd x(n);
    for (int i = 0; i < n; ++i)
        x(i) = amplitude * std::sin(2.0 * std::numbers::pi * f0 * i / fs);
    return x;
}

}  // namespace

TEST_CASE("welch: white noise satisfies Parseval within 5 percent") {
    const Eigen::VectorXd x = white_noise(16384, 1);
    const double fs = 50.0;
    const PsdEstimate psd = welch_psd(x, fs);
    const double mean = x.mean();
    const double variance = (x.array() - mean).square().sum() / static_cast<double>(x.size());
    CHECK(integrated_power(psd) == doctest::Approx(variance).epsilon(0.05));
}

TEST_CASE("welch: bin-centered sinusoid carries its full A^2/2 power") {
    const double fs = 100.0;
    const int segment = 256;
    const double f0 = 16.0 * fs / segment;  // exactly on a bin
    const double amplitude = 2.0;
    const Eigen::VectorXd x = sinusoid(8192, amplitude, f0, fs);
    const PsdEstimate psd = welch_psd(x, fs, segment);
    CHECK(integrated_power(psd) ==
          doctest::Approx(amplitude * amplitude / 2.0).epsilon(0.05));
    // A noiseless on-bin tone refines to the exact frequency: the two
    // neighbors carry equal leakage so the parabolic correction cancels.
    CHECK(pick_peak(psd, 1.0, 49.0) == doctest::Approx(f0).epsilon(1e-9));
}

TEST_CASE("welch: off-bin sinusoid peak lands within one bin of the truth") {
    const double fs = 100.0;
    const int segment = 256;
    const double f0 = 16.37 * fs / segment;
    const Eigen::VectorXd x = sinusoid(8192, 1.0, f0, fs);
    const PsdEstimate psd = welch_psd(x, fs, segment);
    const double df = psd.resolution_hz();
    CHECK(std::abs(pick_peak(psd, 1.0, 49.0) - f0) < df);
}

TEST_CASE("welch: a zero signal has an identically zero spectrum") {
    const PsdEstimate psd = welch_psd(Eigen::VectorXd::Zero(1024), 10.0);
    CHECK(psd.power.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("welch: frequency grid runs from DC to Nyquist") {
    const PsdEstimate psd = welch_psd(white_noise(2048, 2), 40.0, 128);
    REQUIRE(psd.frequencies.size() == 65);
    CHECK(psd.frequencies(0) == 0.0);
    CHECK(psd.frequencies(64) == doctest::Approx(20.0));
    for (Eigen::Index i = 1; i < psd.frequencies.size(); ++i)
        CHECK(psd.frequencies(i) - psd.frequencies(i - 1) ==
              doctest::Approx(psd.resolution_hz()).epsilon(1e-12));
}

TEST_CASE("welch: default segment is the largest power of two within a quarter record") {
    CHECK(welch_psd(white_noise(4096, 3), 10.0).segment_length == 1024);
    CHECK(welch_psd(white_noise(1000, 3), 10.0).segment_length == 128);
    CHECK(welch_psd(white_noise(40, 3), 10.0).segment_length == 8);
}

TEST_CASE("welch: argument validation") {
    const Eigen::VectorXd x = white_noise(256, 4);
    CHECK_THROWS_AS(welch_psd(x, 10.0, 512), TooShort);      // record shorter than segment
    CHECK_THROWS_AS(welch_psd(x, 10.0, 4), ConfigError);     // segment below minimum
    CHECK_THROWS_AS(welch_psd(x, 10.0, 64, 0.95), ConfigError);  // overlap too large
    CHECK_THROWS_AS(welch_psd(x, 10.0, 64, -0.1), ConfigError);
    CHECK_THROWS_AS(welch_psd(x, 0.0, 64), ConfigError);     // nonpositive rate
    CHECK_THROWS_AS(welch_psd(Eigen::VectorXd(0), 10.0), TooShort);
}

TEST_CASE("pick_peak: a single hot bin is returned exactly") {
    PsdEstimate psd;
    psd.frequencies = Eigen::VectorXd::LinSpaced(11, 0.0, 10.0);
    psd.power = Eigen::VectorXd::Zero(11);
    psd.power(4) = 5.0;
    CHECK(pick_peak(psd, 0.0, 10.0) == 4.0);
}

TEST_CASE("pick_peak: equal peaks resolve to the lower frequency") {
    PsdEstimate psd;
    psd.frequencies = Eigen::VectorXd::LinSpaced(11, 0.0, 10.0);
    psd.power = Eigen::VectorXd::Zero(11);
    psd.power(3) = 5.0;
    psd.power(7) = 5.0;
    CHECK(pick_peak(psd, 0.0, 10.0) == 3.0);
}

TEST_CASE("pick_peak: band limits select among peaks and reject empty bands") {
    PsdEstimate psd;
    psd.frequencies = Eigen::VectorXd::LinSpaced(11, 0.0, 10.0);
    psd.power = Eigen::VectorXd::Zero(11);
    psd.power(2) = 9.0;
    psd.power(8) = 5.0;
    CHECK(pick_peak(psd, 5.0, 10.0) == 8.0);
    CHECK_THROWS_AS(pick_peak(psd, 11.0, 20.0), EmptyBand);
    CHECK_THROWS_AS(pick_peak(psd, 6.0, 5.0), EmptyBand);
}

TEST_CASE("benchmark response spectrum shows all four modal peaks") {
    const SystemModel model = benchmark_4dof();
    ExcitationSpec excitation;
    excitation.std_per_dof = Eigen::VectorXd::Constant(4, 1.0);
    excitation.seed = 11;
    const ResponseRecord record = newmark_integrate(model, excitation, 10.0, 100.0);

    // Sum the per-channel spectra so every mode is visible regardless of the
    // observation point.
    PsdEstimate total = welch_psd(record.samples.col(0), record.sample_rate, 256);
    for (int j = 1; j < 4; ++j) {
        const PsdEstimate p = welch_psd(record.samples.col(j), record.sample_rate, 256);
        total.power += p.power;
    }
    // Frequencies the integrator realizes at fs = 100 for this system.
    const double expected[4] = {2.5719, 4.7945, 6.5601, 8.3281};
    const double df = total.resolution_hz();
    for (const double f : expected) {
        const double found = pick_peak(total, f - 3.0 * df, f + 3.0 * df);
        CHECK(std::abs(found - f) < df);
    }
}
