#include "dsub/integrator.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <cstdlib>
#include <sstream>
#include <utility>

namespace dsub {

void SolverConfig::validate() const {
    if (!(dt > 0.0)) throw ModelError("dt must be positive");
    if (!(gamma > 0.0 && gamma <= 1.0)) throw ModelError("gamma must lie in (0, 1]");
    if (subcycles < 1) throw ModelError("subcycles must be at least 1");
    if (!(duration >= 0.0)) throw ModelError("duration must be non-negative");
    if (!(divergence_bound > 0.0)) throw ModelError("divergence bound must be positive");
    const double steps = duration / dt;
    if (std::abs(steps - std::round(steps)) > 1e-6) {
        throw ModelError("duration is not a whole number of time steps");
    }
}

Index SolverConfig::step_count() const { return static_cast<Index>(std::llround(duration / dt)); }

int threads_from_environment() {
    if (const char* env = std::getenv("DSUB_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    return 1;
}

EffectiveMatrix::EffectiveMatrix(const FirstOrderForm& form, double step, double gamma)
    : step_(step), gamma_(gamma), tangent_stiffness_(form.tangent_stiffness()) {
    const double a = gamma * step;
    d_ = form.state_mass() + a * form.tangent_at_zero();
    const Matrix s = form.mass() + a * form.tangent_damping() + (a * a) * form.tangent_stiffness();
    schur_.compute(s);
    const double rcond = schur_.rcond();
    if (!(rcond > 1e-14)) {
        std::ostringstream msg;
        msg << "effective matrix is singular for dt = " << step << ", gamma = " << gamma
            << " (reciprocal condition " << rcond << ")";
        throw SolverError(msg.str());
    }
}

Vector EffectiveMatrix::solve(const Vector& rhs) const {
    const Index n = tangent_stiffness_.rows();
    const double a = gamma_ * step_;
    // [I, -aI; aK, M + aC] [x_u; x_v] = [r_u; r_v]
    Vector x(2 * n);
    x.tail(n) = schur_.solve(rhs.tail(n) - a * (tangent_stiffness_ * rhs.head(n)));
    x.head(n) = rhs.head(n) + a * x.tail(n);
    return x;
}

Matrix EffectiveMatrix::solve(const Matrix& rhs) const {
    const Index n = tangent_stiffness_.rows();
    const double a = gamma_ * step_;
    Matrix x(2 * n, rhs.cols());
    x.bottomRows(n) = schur_.solve(rhs.bottomRows(n) - a * (tangent_stiffness_ * rhs.topRows(n)));
    x.topRows(n) = rhs.topRows(n) + a * x.bottomRows(n);
    return x;
}

StepState free_step(const FirstOrderForm& form, const EffectiveMatrix& d, const StepState& previous,
                    const Vector& force) {
    const double h = d.step();
    const double g = d.gamma();
    const Vector predicted = previous.state + ((1.0 - g) * h) * previous.rate;
    StepState next;
    next.rate = d.solve(Vector(force - form.restoring_force(predicted)));
    next.state = predicted + (g * h) * next.rate;
    return next;
}

Vector initial_rate(const FirstOrderForm& form, const Vector& state, const Vector& force) {
    const Index n = form.dof_count();
    const Vector rhs = force - form.restoring_force(state);
    Vector rate(2 * n);
    rate.head(n) = rhs.head(n);
    Eigen::LDLT<Matrix> m(form.mass());
    rate.tail(n) = m.solve(rhs.tail(n));
    return rate;
}

InterfaceOperator::InterfaceOperator(std::vector<Matrix> compatibility, std::vector<Matrix> locators,
                                     const std::vector<const EffectiveMatrix*>& effective,
                                     double coupling_step)
    : g_(std::move(compatibility)) {
    const std::size_t ns = g_.size();
    if (locators.size() != ns || effective.size() != ns) {
        throw ModelError("interface operator: one G, L and D per substructure required");
    }
    if (ns == 0) throw ModelError("interface operator needs at least one substructure");
    const Index nc = g_.front().rows();
    const double gamma = effective.front()->gamma();
    coupling_scale_ = gamma * coupling_step;
    h_ = Matrix::Zero(nc, nc);
    for (std::size_t s = 0; s < ns; ++s) {
        if (g_[s].rows() != nc || locators[s].cols() != nc) {
            throw ModelError("interface operator: constraint counts disagree between substructures");
        }
        link_.push_back(effective[s]->solve(locators[s]));
        link_scale_.push_back(coupling_scale_);
        h_.noalias() += g_[s] * link_.back();
    }
    if (nc == 0) return;
    lu_.compute(h_);
    if (!lu_.isInvertible()) {
        throw SolverError("interface operator is singular (rank " + std::to_string(lu_.rank()) + " of " +
                          std::to_string(nc) + "); check for redundant or uncoupled constraints");
    }
}

Vector InterfaceOperator::gap(const std::vector<StepState>& states) const {
    Vector sum = Vector::Zero(constraint_count());
    for (std::size_t s = 0; s < g_.size(); ++s) sum.noalias() += g_[s] * states[s].state;
    return sum;
}

Vector InterfaceOperator::multipliers(const Vector& gap) const {
    if (constraint_count() == 0) return Vector(0);
    return -lu_.solve(gap) / coupling_scale_;
}

InterfaceOperator steklov_poincare(const CouplingTopology& topology,
                                   const std::vector<const EffectiveMatrix*>& effective, double coupling_step) {
    std::vector<Matrix> g;
    std::vector<Matrix> l;
    for (Index s = 0; s < topology.substructure_count(); ++s) {
        g.push_back(topology.compatibility(s));
        l.push_back(topology.locator(s));
    }
    return InterfaceOperator(std::move(g), std::move(l), effective, coupling_step);
}

CouplingResult coupling_step(const InterfaceOperator& op, const std::vector<StepState>& free) {
    CouplingResult out;
    out.multipliers = op.multipliers(op.gap(free));
    out.link.resize(free.size());
    for (std::size_t s = 0; s < free.size(); ++s) {
        auto& link = out.link[s];
        const auto si = static_cast<Index>(s);
        link.rate = op.link_response(si) * out.multipliers;
        link.state = op.link_scale(si) * link.rate;
    }
    return out;
}

}  // namespace dsub
