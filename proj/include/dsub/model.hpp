#pragma once

#include "dsub/common.hpp"

#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace dsub {

/// Linear structural substructure M x'' + C x' + K x = f.
///
/// The load matrix maps input-channel samples to physical forces (f = B s);
/// it has one row per DOF and one column per referenced input channel.
class LinearSubstructure {
public:
    LinearSubstructure(Matrix mass, Matrix damping, Matrix stiffness, DofPartition partition,
                       Matrix loads = Matrix());

    const Matrix& mass() const { return mass_; }
    const Matrix& damping() const { return damping_; }
    const Matrix& stiffness() const { return stiffness_; }
    const DofPartition& partition() const { return partition_; }
    const Matrix& loads() const { return loads_; }
    Index dof_count() const { return mass_.rows(); }

    /// Copy with C replaced by alpha M + beta K.
    LinearSubstructure with_rayleigh_damping(double alpha, double beta) const;
    /// Copy with a different load matrix.
    LinearSubstructure with_loads(Matrix loads) const;

private:
    Matrix mass_;
    Matrix damping_;
    Matrix stiffness_;
    DofPartition partition_;
    Matrix loads_;
};

/// Wheel mass hanging from a frame attachment point through a linear spring
/// and a dry-friction type damper:
///   f_r(x) = k1 x,   f_d(x') = c1 x' + c2 x' / (c3 + |x'|)
struct SuspensionElement {
    double mass = 0.160;
    double k1 = 35.0;
    double c1 = 0.65;
    double c2 = 10.0;
    double c3 = 0.55;
    /// Lumped mass of the attachment (boundary) DOF; must be positive so that
    /// the first-order mass operator stays invertible.
    double attachment_mass = 0.001;
    /// Input channel driving the wheel; the wheel receives mass * signal.
    std::optional<Index> base_excitation_channel;
    /// Optional replacement of f_r + f_d. Tangents then come from central differences.
    std::function<double(double displacement, double velocity)> custom_law;
};

double spring_force(const SuspensionElement& e, double displacement);
double damper_force(const SuspensionElement& e, double velocity);
/// Total element force f_r + f_d, or the custom law when one is set.
double element_force(const SuspensionElement& e, double displacement, double velocity);
/// d f_d / d x', equal to c1 + c2 c3 / (c3 + |x'|)^2.
double damper_tangent(const SuspensionElement& e, double velocity);

/// A set of suspension elements. DOF layout: wheel of element e is DOF e
/// (internal), its attachment point is DOF n_e + e (boundary).
class NonlinearSubstructure {
public:
    explicit NonlinearSubstructure(std::vector<SuspensionElement> elements, bool relative_motion = true);

    const std::vector<SuspensionElement>& elements() const { return elements_; }
    bool relative_motion() const { return relative_motion_; }
    Index element_count() const { return static_cast<Index>(elements_.size()); }
    Index dof_count() const { return 2 * element_count(); }
    Index wheel_dof(Index e) const { return e; }
    Index attachment_dof(Index e) const { return element_count() + e; }

    const DofPartition& partition() const { return partition_; }
    Matrix mass() const;
    Matrix loads() const;

    /// Physical restoring forces f_nl(u, v), one entry per DOF.
    Vector internal_force(const Vector& u, const Vector& v) const;
    /// Tangent stiffness and damping of f_nl at u = v = 0.
    std::pair<Matrix, Matrix> tangent_at_zero() const;

private:
    std::vector<SuspensionElement> elements_;
    bool relative_motion_;
    DofPartition partition_;
};

using Substructure = std::variant<LinearSubstructure, NonlinearSubstructure>;

/// First-order form A Y' + R(Y) = F with Y = [u; v], A = blockdiag(I, M) and
/// R(Y) = [-v; C v + K u + f_nl(u, v)]. External forces enter the velocity rows only.
class FirstOrderForm {
public:
    explicit FirstOrderForm(Substructure model);

    const Substructure& model() const { return model_; }
    bool is_linear() const { return std::holds_alternative<LinearSubstructure>(model_); }
    Index dof_count() const { return mass_.rows(); }
    Index state_size() const { return 2 * dof_count(); }
    const DofPartition& partition() const;

    const Matrix& mass() const { return mass_; }
    /// A = blockdiag(I, M).
    Matrix state_mass() const;

    Vector restoring_force(const Vector& state) const;
    /// dR/dY at Y = 0: [[0, -I], [K_t, C_t]].
    Matrix tangent_at_zero() const;
    const Matrix& tangent_stiffness() const { return tangent_stiffness_; }
    const Matrix& tangent_damping() const { return tangent_damping_; }

    /// [0; B s] for channel samples s. Channels beyond the load matrix are ignored.
    Vector external_force(const Vector& channels) const;
    /// [0; f] for a physical force vector f.
    Vector inject(const Vector& physical_force) const;
    /// Number of input channels the load matrix references.
    Index channel_count() const { return loads_.cols(); }

private:
    Substructure model_;
    Matrix mass_;
    Matrix loads_;
    Matrix tangent_stiffness_;
    Matrix tangent_damping_;
};

FirstOrderForm assemble_first_order(Substructure model);

/// Central-difference Jacobian of f at y with step 1e-6 * max(1, |y|).
Matrix finite_difference_jacobian(const std::function<Vector(const Vector&)>& f, const Vector& y);

}  // namespace dsub
