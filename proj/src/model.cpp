#include "dsub/model.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace dsub {

namespace {

constexpr double kSymmetryTolerance = 1e-10;

void require_square(const Matrix& m, Index n, const char* what) {
    if (m.rows() != n || m.cols() != n) {
        throw ModelError(std::string(what) + " matrix is " + std::to_string(m.rows()) + "x" +
                         std::to_string(m.cols()) + ", expected " + std::to_string(n) + "x" +
                         std::to_string(n));
    }
}

}  // namespace

LinearSubstructure::LinearSubstructure(Matrix mass, Matrix damping, Matrix stiffness,
                                       DofPartition partition, Matrix loads)
    : mass_(std::move(mass)),
      damping_(std::move(damping)),
      stiffness_(std::move(stiffness)),
      partition_(std::move(partition)),
      loads_(std::move(loads)) {
    const Index n = mass_.rows();
    if (n == 0) throw ModelError("linear substructure has no DOFs");
    require_square(mass_, n, "mass");
    require_square(stiffness_, n, "stiffness");
    if (damping_.size() == 0) damping_ = Matrix::Zero(n, n);
    require_square(damping_, n, "damping");
    if (loads_.size() == 0) loads_ = Matrix::Zero(n, loads_.cols());
    if (loads_.rows() != n) {
        throw ModelError("load matrix has " + std::to_string(loads_.rows()) + " rows, expected " +
                         std::to_string(n));
    }
    if (asymmetry(mass_) > kSymmetryTolerance) throw ModelError("mass matrix is not symmetric");
    if (asymmetry(stiffness_) > kSymmetryTolerance) throw ModelError("stiffness matrix is not symmetric");
    if (asymmetry(damping_) > kSymmetryTolerance) throw ModelError("damping matrix is not symmetric");
    for (Index i = 0; i < n; ++i) {
        if (!(mass_(i, i) > 0.0)) {
            throw ModelError("mass matrix diagonal entry " + std::to_string(i) + " is not positive");
        }
    }
    partition_.validate(n);
}

LinearSubstructure LinearSubstructure::with_rayleigh_damping(double alpha, double beta) const {
    return LinearSubstructure(mass_, alpha * mass_ + beta * stiffness_, stiffness_, partition_, loads_);
}

LinearSubstructure LinearSubstructure::with_loads(Matrix loads) const {
    return LinearSubstructure(mass_, damping_, stiffness_, partition_, std::move(loads));
}

double spring_force(const SuspensionElement& e, double displacement) { return e.k1 * displacement; }

double damper_force(const SuspensionElement& e, double velocity) {
    return e.c1 * velocity + e.c2 * velocity / (e.c3 + std::abs(velocity));
}

double element_force(const SuspensionElement& e, double displacement, double velocity) {
    if (e.custom_law) return e.custom_law(displacement, velocity);
    return spring_force(e, displacement) + damper_force(e, velocity);
}

double damper_tangent(const SuspensionElement& e, double velocity) {
    const double d = e.c3 + std::abs(velocity);
    return e.c1 + e.c2 * e.c3 / (d * d);
}

NonlinearSubstructure::NonlinearSubstructure(std::vector<SuspensionElement> elements, bool relative_motion)
    : elements_(std::move(elements)), relative_motion_(relative_motion) {
    if (elements_.empty()) throw ModelError("nonlinear substructure needs at least one element");
    for (std::size_t i = 0; i < elements_.size(); ++i) {
        const auto& e = elements_[i];
        const std::string tag = "suspension element " + std::to_string(i);
        if (!(e.mass > 0.0)) throw ModelError(tag + ": mass must be positive");
        if (!(e.attachment_mass > 0.0)) throw ModelError(tag + ": attachment mass must be positive");
        if (!(e.c3 > 0.0)) throw ModelError(tag + ": c3 must be positive");
        if (e.base_excitation_channel && *e.base_excitation_channel < 0) {
            throw ModelError(tag + ": negative input channel");
        }
    }
    const Index ne = element_count();
    for (Index e = 0; e < ne; ++e) {
        partition_.internal.push_back(wheel_dof(e));
        partition_.boundary.push_back(attachment_dof(e));
    }
}

Matrix NonlinearSubstructure::mass() const {
    Vector diag(dof_count());
    for (Index e = 0; e < element_count(); ++e) {
        diag(wheel_dof(e)) = elements_[static_cast<std::size_t>(e)].mass;
        diag(attachment_dof(e)) = elements_[static_cast<std::size_t>(e)].attachment_mass;
    }
    return diag.asDiagonal();
}

Matrix NonlinearSubstructure::loads() const {
    Index channels = 0;
    for (const auto& e : elements_) {
        if (e.base_excitation_channel) channels = std::max(channels, *e.base_excitation_channel + 1);
    }
    Matrix b = Matrix::Zero(dof_count(), channels);
    for (Index e = 0; e < element_count(); ++e) {
        const auto& el = elements_[static_cast<std::size_t>(e)];
        if (el.base_excitation_channel) b(wheel_dof(e), *el.base_excitation_channel) += el.mass;
    }
    return b;
}

Vector NonlinearSubstructure::internal_force(const Vector& u, const Vector& v) const {
    Vector f = Vector::Zero(dof_count());
    for (Index e = 0; e < element_count(); ++e) {
        const Index w = wheel_dof(e);
        const Index a = attachment_dof(e);
        const double x = relative_motion_ ? u(w) - u(a) : u(w);
        const double xd = relative_motion_ ? v(w) - v(a) : v(w);
        const double force = element_force(elements_[static_cast<std::size_t>(e)], x, xd);
        f(w) += force;
        f(a) -= force;
    }
    return f;
}

std::pair<Matrix, Matrix> NonlinearSubstructure::tangent_at_zero() const {
    const Index n = dof_count();
    Matrix kt = Matrix::Zero(n, n);
    Matrix ct = Matrix::Zero(n, n);
    for (Index e = 0; e < element_count(); ++e) {
        const auto& el = elements_[static_cast<std::size_t>(e)];
        double dfdx = el.k1;
        double dfdv = damper_tangent(el, 0.0);
        if (el.custom_law) {
            constexpr double h = 1e-6;
            dfdx = (el.custom_law(h, 0.0) - el.custom_law(-h, 0.0)) / (2 * h);
            dfdv = (el.custom_law(0.0, h) - el.custom_law(0.0, -h)) / (2 * h);
        }
        const Index w = wheel_dof(e);
        const Index a = attachment_dof(e);
        // Row w carries +f, row a carries -f.
        kt(w, w) += dfdx;
        kt(a, w) -= dfdx;
        ct(w, w) += dfdv;
        ct(a, w) -= dfdv;
        if (relative_motion_) {
            kt(w, a) -= dfdx;
            kt(a, a) += dfdx;
            ct(w, a) -= dfdv;
            ct(a, a) += dfdv;
        }
    }
    return {kt, ct};
}

FirstOrderForm::FirstOrderForm(Substructure model) : model_(std::move(model)) {
    if (const auto* lin = std::get_if<LinearSubstructure>(&model_)) {
        mass_ = lin->mass();
        loads_ = lin->loads();
        tangent_stiffness_ = lin->stiffness();
        tangent_damping_ = lin->damping();
    } else {
        const auto& nl = std::get<NonlinearSubstructure>(model_);
        mass_ = nl.mass();
        loads_ = nl.loads();
        std::tie(tangent_stiffness_, tangent_damping_) = nl.tangent_at_zero();
    }
}

const DofPartition& FirstOrderForm::partition() const {
    return std::visit([](const auto& m) -> const DofPartition& { return m.partition(); }, model_);
}

Matrix FirstOrderForm::state_mass() const {
    const Index n = dof_count();
    Matrix a = Matrix::Zero(2 * n, 2 * n);
    a.topLeftCorner(n, n).setIdentity();
    a.bottomRightCorner(n, n) = mass_;
    return a;
}

Vector FirstOrderForm::restoring_force(const Vector& state) const {
    const Index n = dof_count();
    if (state.size() != 2 * n) {
        throw ModelError("state has " + std::to_string(state.size()) + " entries, expected " +
                         std::to_string(2 * n));
    }
    const auto u = state.head(n);
    const auto v = state.tail(n);
    Vector r(2 * n);
    r.head(n) = -v;
    if (const auto* lin = std::get_if<LinearSubstructure>(&model_)) {
        r.tail(n).noalias() = lin->damping() * v;
        r.tail(n).noalias() += lin->stiffness() * u;
    } else {
        r.tail(n) = std::get<NonlinearSubstructure>(model_).internal_force(u, v);
    }
    return r;
}

Matrix FirstOrderForm::tangent_at_zero() const {
    const Index n = dof_count();
    Matrix r0 = Matrix::Zero(2 * n, 2 * n);
    r0.topRightCorner(n, n) = -Matrix::Identity(n, n);
    r0.bottomLeftCorner(n, n) = tangent_stiffness_;
    r0.bottomRightCorner(n, n) = tangent_damping_;
    return r0;
}

Vector FirstOrderForm::external_force(const Vector& channels) const {
    const Index n = dof_count();
    Vector f = Vector::Zero(2 * n);
    const Index used = std::min(loads_.cols(), channels.size());
    if (used > 0) f.tail(n).noalias() = loads_.leftCols(used) * channels.head(used);
    return f;
}

Vector FirstOrderForm::inject(const Vector& physical_force) const {
    const Index n = dof_count();
    if (physical_force.size() != n) throw ModelError("force vector dimension mismatch");
    Vector f = Vector::Zero(2 * n);
    f.tail(n) = physical_force;
    return f;
}

FirstOrderForm assemble_first_order(Substructure model) { return FirstOrderForm(std::move(model)); }

Matrix finite_difference_jacobian(const std::function<Vector(const Vector&)>& f, const Vector& y) {
    const double h = 1e-6 * std::max(1.0, y.norm());
    const Vector f0 = f(y);
    Matrix jac(f0.size(), y.size());
    Vector yp = y;
    for (Index j = 0; j < y.size(); ++j) {
        yp(j) = y(j) + h;
        const Vector fp = f(yp);
        yp(j) = y(j) - h;
        const Vector fm = f(yp);
        yp(j) = y(j);
        jac.col(j) = (fp - fm) / (2 * h);
    }
    return jac;
}

}  // namespace dsub
