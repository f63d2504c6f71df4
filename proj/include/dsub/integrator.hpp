#pragma once

#include "dsub/common.hpp"
#include "dsub/coupling.hpp"
#include "dsub/model.hpp"

#include <Eigen/LU>

#include <vector>

namespace dsub {

struct SolverConfig {
    double dt = 1e-3;
    double gamma = 0.5;
    Index subcycles = 1;
    double duration = 1.0;
    /// A state whose infinity norm exceeds this aborts the run.
    double divergence_bound = 1e8;
    /// Worker threads for the free-solution phase; 0 reads DSUB_THREADS (default 1).
    int threads = 0;

    /// Throws ModelError on dt <= 0, gamma outside (0, 1], subcycles < 1 or a
    /// duration that is not a whole number of steps (within one step).
    void validate() const;
    Index step_count() const;
};

/// Thread count from DSUB_THREADS, or 1.
int threads_from_environment();

/// State and state rate of one substructure at one instant.
struct StepState {
    Vector state;
    Vector rate;
};

/// D = A + gamma h R0, factorized once.
///
/// Because the displacement rows of D are [I, -gamma h I], solves go through
/// the n x n Schur complement S = M + gamma h C_t + (gamma h)^2 K_t.
class EffectiveMatrix {
public:
    EffectiveMatrix(const FirstOrderForm& form, double step, double gamma);

    const Matrix& matrix() const { return d_; }
    double step() const { return step_; }
    double gamma() const { return gamma_; }

    Vector solve(const Vector& rhs) const;
    Matrix solve(const Matrix& rhs) const;

private:
    double step_;
    double gamma_;
    Matrix d_;
    Matrix tangent_stiffness_;
    Eigen::PartialPivLU<Matrix> schur_;
};

/// Trapezoidal predictor / rate / corrector stages of one free step:
///   Y~ = Y_n + (1 - gamma) h Y'_n
///   Y' = D^-1 (F - R(Y~))
///   Y  = Y~ + gamma h Y'
StepState free_step(const FirstOrderForm& form, const EffectiveMatrix& d, const StepState& previous,
                    const Vector& force);

/// Initial rate A^-1 (F - R(Y)) of an uncoupled substructure.
Vector initial_rate(const FirstOrderForm& form, const Vector& state, const Vector& force);

/// Interface (Steklov-Poincare) operator H = sum_s G_s D_s^-1 L_s.
///
/// D_s is built with the substructure's own step (the inner step when it is
/// sub-cycled), while link states are always advanced with the coupling step:
/// Y_s^L = gamma dt D_s^-1 L_s Lambda. Multipliers are
/// Lambda = -(gamma dt H)^-1 sum_s G_s Y_s^F, which makes the coupled
/// G-weighted state sum vanish.
class InterfaceOperator {
public:
    InterfaceOperator(std::vector<Matrix> compatibility, std::vector<Matrix> locators,
                      const std::vector<const EffectiveMatrix*>& effective, double coupling_step);

    Index constraint_count() const { return h_.rows(); }
    const Matrix& matrix() const { return h_; }
    const Matrix& compatibility(Index s) const { return g_[static_cast<std::size_t>(s)]; }
    /// D_s^-1 L_s: state-rate response of substructure s to unit multipliers.
    const Matrix& link_response(Index s) const { return link_[static_cast<std::size_t>(s)]; }
    double link_scale(Index s) const { return link_scale_[static_cast<std::size_t>(s)]; }

    /// sum_s G_s Y_s.
    Vector gap(const std::vector<StepState>& states) const;
    Vector multipliers(const Vector& gap) const;

private:
    std::vector<Matrix> g_;
    std::vector<Matrix> link_;
    std::vector<double> link_scale_;  // gamma dt
    double coupling_scale_;           // gamma dt
    Matrix h_;
    Eigen::FullPivLU<Matrix> lu_;
};

InterfaceOperator steklov_poincare(const CouplingTopology& topology,
                                   const std::vector<const EffectiveMatrix*>& effective, double coupling_step);

struct CouplingResult {
    Vector multipliers;
    std::vector<StepState> link;
};

/// Multipliers from the free solutions, and the link solutions
/// Y'^L = D^-1 L Lambda, Y^L = gamma dt Y'^L for every substructure.
CouplingResult coupling_step(const InterfaceOperator& op, const std::vector<StepState>& free);

}  // namespace dsub
