#include "modalsep/dynamics.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <complex>
#include <iostream>
#include <numbers>
#include <random>

#include "modalsep/errors.hpp"

namespace modalsep {

namespace {

void require_square(const Eigen::MatrixXd& m, const char* name, Eigen::Index n) {
    if (m.rows() != n || m.cols() != n)
        throw ShapeMismatch(std::string(name) + " must be " + std::to_string(n) + "x" +
                            std::to_string(n));
}

void require_symmetric(const Eigen::MatrixXd& m, const char* name) {
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw NotSymmetric(std::string(name) + " is not symmetric");
}

}  // namespace

SystemModel SystemModel::rayleigh(Eigen::MatrixXd mass, Eigen::MatrixXd stiffness,
                                  double alpha, double beta) {
    SystemModel model;
    model.damping = alpha * mass + beta * stiffness;
    model.mass = std::move(mass);
    model.stiffness = std::move(stiffness);
    model.rayleigh_alpha = alpha;
    model.rayleigh_beta = beta;
    return model;
}

void SystemModel::validate() const {
    const Eigen::Index n = mass.rows();
    if (n < 1) throw ShapeMismatch("model has no degrees of freedom");
    require_square(mass, "mass", n);
    require_square(stiffness, "stiffness", n);
    require_square(damping, "damping", n);
    require_symmetric(mass, "mass");
    require_symmetric(stiffness, "stiffness");
    Eigen::LLT<Eigen::MatrixXd> llt(mass);
    if (llt.info() != Eigen::Success) throw NotPositiveDefinite("mass is not positive definite");
}

ModalTruth eigen_modes(const SystemModel& model) {
    model.validate();
    const Eigen::Index n = model.dof_count();

    const Eigen::MatrixXd proportional =
        model.rayleigh_alpha * model.mass + model.rayleigh_beta * model.stiffness;
    const double damping_scale = std::max(1.0, proportional.cwiseAbs().maxCoeff());
    if ((model.damping - proportional).cwiseAbs().maxCoeff() > 1e-8 * damping_scale)
        throw NonClassicalDamping(
            "damping matrix does not equal rayleigh_alpha*M + rayleigh_beta*K");

    // Reduce K phi = w^2 M phi to a symmetric standard problem via M = L L^T.
    Eigen::LLT<Eigen::MatrixXd> llt(model.mass);
    if (llt.info() != Eigen::Success) throw NotPositiveDefinite("mass is not positive definite");
    const Eigen::MatrixXd l = llt.matrixL();
    Eigen::MatrixXd a = l.triangularView<Eigen::Lower>().solve(model.stiffness);
    a = l.triangularView<Eigen::Lower>().solve(Eigen::MatrixXd(a.transpose()));
    a = 0.5 * (a + a.transpose());  // symmetrize against rounding

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a);
    if (solver.info() != Eigen::Success) throw Error("eigen solve failed");

    ModalTruth truth;
    truth.frequencies_hz.resize(n);
    truth.damping_ratios.resize(n);
    truth.damped_frequencies_hz.resize(n);
    truth.shapes.resize(n, n);

    // Eigenvalues come back ascending; shapes are L^-T y, already M-orthonormal.
    truth.shapes = l.transpose().triangularView<Eigen::Upper>().solve(solver.eigenvectors());
    for (Eigen::Index i = 0; i < n; ++i) {
        const double lambda = solver.eigenvalues()(i);
        if (!(lambda > 0.0))
            throw NotPositiveDefinite("stiffness yields a non-positive eigenvalue");
        const double omega = std::sqrt(lambda);
        const double zeta = model.rayleigh_alpha / (2.0 * omega) +
                            model.rayleigh_beta * omega / 2.0;
        truth.frequencies_hz(i) = omega / (2.0 * std::numbers::pi);
        truth.damping_ratios(i) = zeta;
        truth.damped_frequencies_hz(i) = truth.frequencies_hz(i) * std::sqrt(1.0 - zeta * zeta);

        Eigen::Index peak = 0;
        truth.shapes.col(i).cwiseAbs().maxCoeff(&peak);
        if (truth.shapes(peak, i) < 0.0) truth.shapes.col(i) = -truth.shapes.col(i);
    }
    return truth;
}

ModalTruth discretized_modes(const ModalTruth& truth, double sample_rate, int substeps) {
    if (!(sample_rate > 0.0)) throw ConfigError("sample_rate must be positive");
    if (substeps < 1) throw ConfigError("substeps must be >= 1");
    const double h = 1.0 / (sample_rate * substeps);

    ModalTruth out = truth;
    for (Eigen::Index i = 0; i < truth.mode_count(); ++i) {
        const double omega = 2.0 * std::numbers::pi * truth.frequencies_hz(i);
        const double zeta = truth.damping_ratios(i);
        const double c = 2.0 * zeta * omega;  // unit-mass modal damping
        const double k = omega * omega;

        // One free step of the average-acceleration scheme on the decoupled
        // modal oscillator, as a 2x2 map on (x, v) with a = -k x - c v.
        const double keff = k + 4.0 / (h * h) + 2.0 / h * c;
        auto step = [&](double x, double v, double& xn, double& vn) {
            const double acc = -k * x - c * v;
            const double rhs = (4.0 / (h * h)) * x + (4.0 / h) * v + acc + c * ((2.0 / h) * x + v);
            xn = rhs / keff;
            vn = (2.0 / h) * (xn - x) - v;
        };
        double t00, t10, t01, t11;
        step(1.0, 0.0, t00, t10);
        step(0.0, 1.0, t01, t11);

        const double tr = t00 + t11;
        const double det = t00 * t11 - t01 * t10;
        const std::complex<double> disc = std::sqrt(std::complex<double>(tr * tr - 4.0 * det, 0.0));
        const std::complex<double> lambda = 0.5 * (tr + disc);

        const double rho = std::abs(lambda);
        const double theta = std::abs(std::arg(lambda));
        const double decay = -std::log(rho) / h;         // equivalent zeta*omega
        const double omega_d = theta / h;                // equivalent damped frequency
        const double omega_eq = std::hypot(omega_d, decay);
        out.frequencies_hz(i) = omega_eq / (2.0 * std::numbers::pi);
        out.damping_ratios(i) = omega_eq > 0.0 ? decay / omega_eq : 0.0;
        out.damped_frequencies_hz(i) = omega_d / (2.0 * std::numbers::pi);
    }
    return out;
}

ResponseRecord newmark_integrate(const SystemModel& model, const ExcitationSpec& excitation,
                                 double duration_s, double sample_rate,
                                 const InitialState& initial_state,
                                 const NewmarkOptions& options) {
    model.validate();
    const Eigen::Index n = model.dof_count();
    if (!(sample_rate > 0.0)) throw ConfigError("sample_rate must be positive");
    if (options.substeps < 1) throw ConfigError("substeps must be >= 1");
    const Eigen::Index samples = static_cast<Eigen::Index>(std::llround(duration_s * sample_rate));
    if (samples < 2) throw TooShort("duration * sample_rate must be at least 2");

    if (excitation.kind == ExcitationSpec::Kind::GaussianWhite) {
        if (excitation.std_per_dof.size() != n)
            throw ShapeMismatch("std_per_dof size does not match DOF count");
        if ((excitation.std_per_dof.array() < 0.0).any())
            throw ConfigError("std_per_dof must be nonnegative");
    }

    // Nyquist advisory only; identification needs the modes below fs/2.
    try {
        const ModalTruth truth = eigen_modes(model);
        const double f_max = truth.frequencies_hz(truth.mode_count() - 1);
        if (sample_rate <= 2.0 * f_max)
            std::cerr << "warning: sample rate " << sample_rate
                      << " Hz does not exceed twice the highest natural frequency (" << f_max
                      << " Hz)\n";
    } catch (const Error&) {
        // Non-classical damping etc.: skip the advisory.
    }

    Eigen::VectorXd x = initial_state.displacement.size() == 0
                            ? Eigen::VectorXd::Zero(n)
                            : initial_state.displacement;
    Eigen::VectorXd v = initial_state.velocity.size() == 0 ? Eigen::VectorXd::Zero(n)
                                                           : initial_state.velocity;
    if (x.size() != n || v.size() != n)
        throw ShapeMismatch("initial state size does not match DOF count");

    const double h = 1.0 / (sample_rate * options.substeps);

    Eigen::LLT<Eigen::MatrixXd> mass_llt(model.mass);
    if (mass_llt.info() != Eigen::Success)
        throw NotPositiveDefinite("mass is not positive definite");

    const Eigen::MatrixXd keff = model.stiffness + (4.0 / (h * h)) * model.mass +
                                 (2.0 / h) * model.damping;
    Eigen::LDLT<Eigen::MatrixXd> keff_ldlt(keff);
    if (keff_ldlt.info() != Eigen::Success ||
        (keff_ldlt.vectorD().array().abs() < 1e-300).any())
        throw SingularEffectiveStiffness("effective stiffness matrix is singular");

    std::mt19937_64 rng(excitation.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    auto draw_force = [&](Eigen::VectorXd& f) {
        if (excitation.kind == ExcitationSpec::Kind::GaussianWhite) {
            for (Eigen::Index j = 0; j < n; ++j)
                f(j) = excitation.std_per_dof(j) * normal(rng);
        } else {
            f.setZero();
        }
    };

    Eigen::VectorXd f = Eigen::VectorXd::Zero(n);
    draw_force(f);  // force at t = 0
    Eigen::VectorXd a = mass_llt.solve(f - model.damping * v - model.stiffness * x);

    ResponseRecord record;
    record.samples.resize(samples, n);
    record.sample_rate = sample_rate;
    record.channel_labels = ResponseRecord::default_labels(n);
    record.quantity = options.output;
    record.seed = excitation.seed;

    auto emit = [&](Eigen::Index row) {
        record.samples.row(row) =
            (options.output == Quantity::Acceleration ? a : x).transpose();
    };
    emit(0);

    Eigen::VectorXd x_next(n), v_next(n), rhs(n);
    for (Eigen::Index s = 1; s < samples; ++s) {
        draw_force(f);  // held constant across the substeps of this interval
        for (int sub = 0; sub < options.substeps; ++sub) {
            rhs = f + model.mass * ((4.0 / (h * h)) * x + (4.0 / h) * v + a) +
                  model.damping * ((2.0 / h) * x + v);
            x_next = keff_ldlt.solve(rhs);
            v_next = (2.0 / h) * (x_next - x) - v;
            a = (4.0 / (h * h)) * (x_next - x) - (4.0 / h) * v - a;
            x = x_next;
            v = v_next;
        }
        emit(s);
    }
    return record;
}

SystemModel benchmark_4dof() {
    Eigen::MatrixXd mass = Eigen::Vector4d(1.0, 2.0, 3.0, 4.0).asDiagonal();
    Eigen::MatrixXd stiffness(4, 4);
    stiffness << 1000.0, -800.0, 0.0, 0.0,
                 -800.0, 2400.0, -1600.0, 0.0,
                 0.0, -1600.0, 4800.0, -3200.0,
                 0.0, 0.0, -3200.0, 8000.0;
    return SystemModel::rayleigh(std::move(mass), std::move(stiffness), 0.1, 0.0);
}

}  // namespace modalsep
