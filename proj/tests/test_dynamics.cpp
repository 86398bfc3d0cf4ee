#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <random>

#include "modalsep/dynamics.hpp"
#include "modalsep/errors.hpp"

using namespace modalsep;

namespace {

// Independently derived spectrum of the 4-DOF example system (generalized
// eigenproblem solved with a separate tool; frozen here as oracle values).
constexpr double kContinuousHz[4] = {2.577539023930, 4.831039845152, 6.654612879999,
                                     8.523449436314};
constexpr double kContinuousZeta[4] = {0.003087343036, 0.001647212072, 0.001195824205,
                                       0.000933629889};
// Spectrum the average-acceleration scheme realizes at 100 Hz sampling
// (eigenvalues of the per-mode one-step map, computed independently).
constexpr double kSampledHz[4] = {2.571927484224, 4.794450697677, 6.560128974173,
                                  8.328072841628};
constexpr double kSampledZeta[4] = {0.003073923434, 0.001622411382, 0.001162249672,
                                    0.000891603287};

SystemModel sdof(double mass, double stiffness, double damping_coeff) {
    SystemModel model;
    model.mass = Eigen::MatrixXd::Constant(1, 1, mass);
    model.stiffness = Eigen::MatrixXd::Constant(1, 1, stiffness);
    model.damping = Eigen::MatrixXd::Constant(1, 1, damping_coeff);
    return model;
}

Eigen::MatrixXd random_spd(Eigen::Index n, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::MatrixXd a(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) a(i, j) = normal(rng);
    return a * a.transpose() + static_cast<double>(n) * Eigen::MatrixXd::Identity(n, n);
}

}  // namespace

TEST_CASE("benchmark_4dof returns the documented matrices") {
    const SystemModel model = benchmark_4dof();
    CHECK(model.mass.isApprox(Eigen::MatrixXd(Eigen::Vector4d(1, 2, 3, 4).asDiagonal())));
    CHECK(model.stiffness(0, 0) == 1000.0);
    CHECK(model.stiffness(0, 1) == -800.0);
    CHECK(model.stiffness(0, 2) == 0.0);
    CHECK(model.stiffness(0, 3) == 0.0);
    CHECK(model.stiffness(1, 1) == 2400.0);
    CHECK(model.stiffness(2, 3) == -3200.0);
    CHECK(model.stiffness(3, 3) == 8000.0);
    CHECK(model.stiffness.isApprox(model.stiffness.transpose()));
    // beta = 0, so damping is exactly 0.1 * mass.
    CHECK(model.damping.isApprox(0.1 * model.mass));
    CHECK(model.rayleigh_alpha == 0.1);
    CHECK(model.rayleigh_beta == 0.0);
}

TEST_CASE("eigen_modes matches the frozen continuous spectrum of the example system") {
    const ModalTruth truth = eigen_modes(benchmark_4dof());
    REQUIRE(truth.mode_count() == 4);
    for (int i = 0; i < 4; ++i) {
        CHECK(truth.frequencies_hz(i) == doctest::Approx(kContinuousHz[i]).epsilon(1e-9));
        CHECK(truth.damping_ratios(i) == doctest::Approx(kContinuousZeta[i]).epsilon(1e-9));
        CHECK(truth.damped_frequencies_hz(i) ==
              doctest::Approx(truth.frequencies_hz(i) *
                              std::sqrt(1.0 - std::pow(truth.damping_ratios(i), 2))));
    }
}

TEST_CASE("eigen_modes on a decoupled diagonal system") {
    SystemModel model;
    model.mass = Eigen::MatrixXd::Identity(3, 3);
    model.stiffness = Eigen::Vector3d(4.0, 9.0, 25.0).asDiagonal();
    model.damping = Eigen::MatrixXd::Zero(3, 3);
    const ModalTruth truth = eigen_modes(model);
    const double two_pi = 2.0 * std::numbers::pi;
    CHECK(truth.frequencies_hz(0) == doctest::Approx(2.0 / two_pi));
    CHECK(truth.frequencies_hz(1) == doctest::Approx(3.0 / two_pi));
    CHECK(truth.frequencies_hz(2) == doctest::Approx(5.0 / two_pi));
    CHECK(truth.damping_ratios.isZero(1e-15));
    CHECK(truth.shapes.isApprox(Eigen::MatrixXd::Identity(3, 3), 1e-12));
}

TEST_CASE("eigen_modes invariants hold for random SPD systems up to n=8") {
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 20; ++trial) {
        const Eigen::Index n = 2 + static_cast<Eigen::Index>(trial % 7);
        const SystemModel model =
            SystemModel::rayleigh(random_spd(n, rng), 50.0 * random_spd(n, rng), 0.05, 0.001);
        const ModalTruth truth = eigen_modes(model);

        for (Eigen::Index i = 0; i + 1 < n; ++i)
            CHECK(truth.frequencies_hz(i) < truth.frequencies_hz(i + 1));

        const Eigen::MatrixXd gram =
            truth.shapes.transpose() * model.mass * truth.shapes;
        CHECK((gram - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-8);

        for (Eigen::Index i = 0; i < n; ++i) {
            const double omega = 2.0 * std::numbers::pi * truth.frequencies_hz(i);
            const Eigen::VectorXd residual = model.stiffness * truth.shapes.col(i) -
                                             omega * omega * model.mass * truth.shapes.col(i);
            CHECK(residual.norm() <= 1e-8 * (model.stiffness * truth.shapes.col(i)).norm());

            Eigen::Index peak = 0;
            truth.shapes.col(i).cwiseAbs().maxCoeff(&peak);
            CHECK(truth.shapes(peak, i) > 0.0);
        }
    }
}

TEST_CASE("eigen_modes rejects non-proportional damping") {
    SystemModel model = benchmark_4dof();
    model.damping(0, 1) += 0.5;
    model.damping(1, 0) += 0.5;
    CHECK_THROWS_AS(eigen_modes(model), NonClassicalDamping);
}

TEST_CASE("model validation rejects bad matrices") {
    SystemModel model = benchmark_4dof();
    model.mass(0, 0) = -1.0;
    CHECK_THROWS_AS(model.validate(), NotPositiveDefinite);

    model = benchmark_4dof();
    model.stiffness(0, 1) = 123.0;  // break symmetry
    CHECK_THROWS_AS(model.validate(), NotSymmetric);

    model = benchmark_4dof();
    model.damping = Eigen::MatrixXd::Zero(3, 3);
    CHECK_THROWS_AS(model.validate(), ShapeMismatch);
}

TEST_CASE("discretized_modes matches the frozen sampled spectrum at 100 Hz") {
    const ModalTruth truth = eigen_modes(benchmark_4dof());
    const ModalTruth sampled = discretized_modes(truth, 100.0);
    for (int i = 0; i < 4; ++i) {
        CHECK(sampled.frequencies_hz(i) == doctest::Approx(kSampledHz[i]).epsilon(1e-9));
        CHECK(sampled.damping_ratios(i) == doctest::Approx(kSampledZeta[i]).epsilon(1e-9));
    }
    CHECK(sampled.shapes.isApprox(truth.shapes));
}

TEST_CASE("discretized_modes converges to the continuous spectrum as the step shrinks") {
    const ModalTruth truth = eigen_modes(benchmark_4dof());
    const ModalTruth coarse = discretized_modes(truth, 100.0, 1);
    const ModalTruth fine = discretized_modes(truth, 100.0, 64);
    for (int i = 0; i < 4; ++i) {
        const double coarse_err = std::abs(coarse.frequencies_hz(i) - truth.frequencies_hz(i));
        const double fine_err = std::abs(fine.frequencies_hz(i) - truth.frequencies_hz(i));
        CHECK(fine_err < coarse_err / 1000.0);  // second-order scheme, 64x refinement
        CHECK(fine.frequencies_hz(i) == doctest::Approx(truth.frequencies_hz(i)).epsilon(2e-5));
    }
}

TEST_CASE("free SDOF vibration matches the closed form within 1e-3 over 10 s") {
    const double two_pi = 2.0 * std::numbers::pi;
    const SystemModel model = sdof(1.0, two_pi * two_pi, 0.0);
    ExcitationSpec quiet;
    quiet.kind = ExcitationSpec::Kind::None;
    InitialState init;
    init.displacement = Eigen::VectorXd::Constant(1, 1.0);
    init.velocity = Eigen::VectorXd::Zero(1);
    NewmarkOptions options;
    options.substeps = 8;
    options.output = Quantity::Displacement;

    const ResponseRecord record = newmark_integrate(model, quiet, 10.0, 100.0, init, options);
    REQUIRE(record.sample_count() == 1000);
    double max_err = 0.0;
    for (Eigen::Index i = 0; i < record.sample_count(); ++i) {
        const double t = static_cast<double>(i) / 100.0;
        max_err = std::max(max_err, std::abs(record.samples(i, 0) - std::cos(two_pi * t)));
    }
    CHECK(max_err < 1e-3);  // relative to the unit amplitude
}

TEST_CASE("zero excitation and zero initial state give an identically zero response") {
    ExcitationSpec quiet;
    quiet.kind = ExcitationSpec::Kind::None;
    const ResponseRecord record = newmark_integrate(benchmark_4dof(), quiet, 1.0, 100.0);
    CHECK(record.samples.isZero(0.0));
}

TEST_CASE("integration is deterministic for a fixed seed") {
    ExcitationSpec excitation;
    excitation.std_per_dof = Eigen::VectorXd::Ones(4);
    excitation.seed = 77;
    const ResponseRecord a = newmark_integrate(benchmark_4dof(), excitation, 2.0, 100.0);
    const ResponseRecord b = newmark_integrate(benchmark_4dof(), excitation, 2.0, 100.0);
    CHECK(a.samples == b.samples);  // bit-identical
    CHECK(a.seed == 77);
}

TEST_CASE("undamped free vibration conserves energy over 1e4 steps") {
    SystemModel model = benchmark_4dof();
    model.damping.setZero();
    model.rayleigh_alpha = 0.0;
    ExcitationSpec quiet;
    quiet.kind = ExcitationSpec::Kind::None;
    InitialState init;
    init.displacement = Eigen::Vector4d(0.01, -0.02, 0.015, 0.005);
    init.velocity = Eigen::VectorXd::Zero(4);
    NewmarkOptions options;
    options.output = Quantity::Displacement;

    const double fs = 100.0;
    const ResponseRecord record = newmark_integrate(model, quiet, 100.0, fs, init, options);
    REQUIRE(record.sample_count() == 10000);

    // Velocity back out of the scheme's own trapezoidal update, then the
    // mechanical energy at every sample.
    Eigen::VectorXd v = init.velocity;
    Eigen::VectorXd x = record.samples.row(0).transpose();
    const double e0 = 0.5 * v.dot(model.mass * v) + 0.5 * x.dot(model.stiffness * x);
    double max_drift = 0.0;
    for (Eigen::Index i = 1; i < record.sample_count(); ++i) {
        const Eigen::VectorXd x_next = record.samples.row(i).transpose();
        v = (2.0 * fs) * (x_next - x) - v;
        x = x_next;
        const double e = 0.5 * v.dot(model.mass * v) + 0.5 * x.dot(model.stiffness * x);
        max_drift = std::max(max_drift, std::abs(e - e0) / e0);
    }
    CHECK(max_drift < 1e-6);
}

TEST_CASE("response is linear in the excitation amplitude and initial state") {
    ExcitationSpec small;
    small.std_per_dof = Eigen::VectorXd::Constant(4, 0.3);
    small.seed = 5;
    ExcitationSpec large = small;
    large.std_per_dof = Eigen::VectorXd::Constant(4, 1.1);
    ExcitationSpec combined = small;
    combined.std_per_dof = Eigen::VectorXd::Constant(4, 1.4);

    // Same seed means the same unit draws, so amplitudes superpose.
    const SystemModel model = benchmark_4dof();
    const ResponseRecord ra = newmark_integrate(model, small, 2.0, 100.0);
    const ResponseRecord rb = newmark_integrate(model, large, 2.0, 100.0);
    const ResponseRecord rc = newmark_integrate(model, combined, 2.0, 100.0);
    const double scale = rc.samples.cwiseAbs().maxCoeff();
    CHECK((ra.samples + rb.samples - rc.samples).cwiseAbs().maxCoeff() < 1e-9 * scale);

    ExcitationSpec quiet;
    quiet.kind = ExcitationSpec::Kind::None;
    InitialState ia, ib, ic;
    ia.displacement = Eigen::Vector4d(0.01, 0.0, -0.01, 0.02);
    ib.displacement = Eigen::Vector4d(-0.005, 0.03, 0.0, 0.01);
    ic.displacement = ia.displacement + ib.displacement;
    const ResponseRecord fa = newmark_integrate(model, quiet, 2.0, 100.0, ia);
    const ResponseRecord fb = newmark_integrate(model, quiet, 2.0, 100.0, ib);
    const ResponseRecord fc = newmark_integrate(model, quiet, 2.0, 100.0, ic);
    const double fscale = fc.samples.cwiseAbs().maxCoeff();
    CHECK((fa.samples + fb.samples - fc.samples).cwiseAbs().maxCoeff() < 1e-9 * fscale);
}

TEST_CASE("newmark_integrate error paths") {
    ExcitationSpec excitation;
    excitation.std_per_dof = Eigen::VectorXd::Ones(4);

    CHECK_THROWS_AS(newmark_integrate(benchmark_4dof(), excitation, 0.01, 100.0), TooShort);

    ExcitationSpec wrong = excitation;
    wrong.std_per_dof = Eigen::VectorXd::Ones(2);
    CHECK_THROWS_AS(newmark_integrate(benchmark_4dof(), wrong, 1.0, 100.0), ShapeMismatch);

    // A (contrived) negative stiffness canceling the effective-stiffness term.
    SystemModel singular;
    singular.mass = Eigen::MatrixXd::Identity(2, 2);
    const double fs = 100.0;
    singular.stiffness = -4.0 * fs * fs * Eigen::MatrixXd::Identity(2, 2);
    singular.damping = Eigen::MatrixXd::Zero(2, 2);
    ExcitationSpec quiet;
    quiet.kind = ExcitationSpec::Kind::None;
    quiet.std_per_dof = Eigen::VectorXd::Zero(2);
    CHECK_THROWS_AS(newmark_integrate(singular, quiet, 1.0, fs), SingularEffectiveStiffness);
}
