#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "modalsep/record.hpp"

namespace modalsep {

/// Linear time-invariant n-DOF structural model: M x'' + C x' + K x = f(t).
struct SystemModel {
    Eigen::MatrixXd mass;       ///< n x n, kg
    Eigen::MatrixXd stiffness;  ///< n x n, N/m
    Eigen::MatrixXd damping;    ///< n x n, N s/m
    double rayleigh_alpha = 0.0;  ///< 1/s
    double rayleigh_beta = 0.0;   ///< s

    Eigen::Index dof_count() const { return mass.rows(); }

    /// Builds a model with proportional damping C = alpha*M + beta*K.
    static SystemModel rayleigh(Eigen::MatrixXd mass, Eigen::MatrixXd stiffness,
                                double alpha, double beta);

    /// Throws ShapeMismatch / NotSymmetric / NotPositiveDefinite.
    void validate() const;
};

/// Exact modal decomposition of a SystemModel.
struct ModalTruth {
    Eigen::VectorXd frequencies_hz;         ///< ascending
    Eigen::VectorXd damping_ratios;         ///< dimensionless
    Eigen::VectorXd damped_frequencies_hz;  ///< f_i * sqrt(1 - zeta_i^2)
    Eigen::MatrixXd shapes;                 ///< column i = mass-normalized shape of mode i

    Eigen::Index mode_count() const { return frequencies_hz.size(); }
};

/// Stochastic excitation description.
struct ExcitationSpec {
    enum class Kind { GaussianWhite, None };
    Kind kind = Kind::GaussianWhite;
    Eigen::VectorXd std_per_dof;  ///< N (force), one entry per DOF; >= 0
    std::uint64_t seed = 0;
};

/// Initial displacement/velocity; empty vectors mean zeros.
struct InitialState {
    Eigen::VectorXd displacement;
    Eigen::VectorXd velocity;
};

/// Integrator options. `substeps` refines the internal time step while keeping
/// the output rate; the excitation is held constant across the substeps of one
/// output interval, so the realized force sequence does not depend on it.
struct NewmarkOptions {
    int substeps = 1;
    Quantity output = Quantity::Acceleration;
};

/// Solves the generalized eigenproblem K phi = w^2 M phi (via Cholesky of M),
/// with damping ratios from the Rayleigh coefficients. Shapes are
/// mass-normalized and sign-fixed so the largest-magnitude component of each
/// shape is positive. Throws NonClassicalDamping when C deviates from
/// alpha*M + beta*K.
ModalTruth eigen_modes(const SystemModel& model);

/// The modal frequencies/damping the average-acceleration integrator actually
/// realizes at a finite time step: per mode, the discrete one-step transition
/// is analyzed and its complex eigenvalue converted back to an equivalent
/// continuous frequency and damping ratio. Shapes are unchanged. Useful as the
/// oracle for identification on simulated data, where the discretization bias
/// (about (w*h)^2/12 in frequency) is visible at coarse sampling.
ModalTruth discretized_modes(const ModalTruth& truth, double sample_rate, int substeps = 1);

/// Integrates the model under the given excitation with the Newmark
/// average-acceleration scheme (gamma = 1/2, beta = 1/4). Returns
/// round(duration * sample_rate) samples starting at t = 0; sample 0 holds the
/// initial state. Deterministic for a fixed seed.
ResponseRecord newmark_integrate(const SystemModel& model, const ExcitationSpec& excitation,
                                 double duration_s, double sample_rate,
                                 const InitialState& initial_state = {},
                                 const NewmarkOptions& options = {});

/// The 4-DOF spring-mass example system used by the benchmark tests:
/// M = diag(1,2,3,4), banded K, C = 0.1*M.
SystemModel benchmark_4dof();

}  // namespace modalsep
