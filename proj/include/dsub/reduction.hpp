#pragma once

#include "dsub/common.hpp"
#include "dsub/model.hpp"

#include <optional>

namespace dsub {

/// Mass-normalized eigenvectors (columns) and natural frequencies in rad/s, ascending.
struct ModalBasis {
    Matrix shapes;
    Vector frequencies;
};

/// Dense solution of K phi = w^2 M phi: Cholesky of M, then a standard symmetric
/// eigensolve. Returns the `count` lowest pairs (all pairs when count < 0).
/// Throws ModelError if M is not positive definite.
ModalBasis generalized_modes(const Matrix& mass, const Matrix& stiffness, Index count = -1);

/// The r lowest modes of the internal partition with the boundary DOFs clamped.
ModalBasis fixed_interface_modes(const LinearSubstructure& sub, Index r);

/// Static response of the internal DOFs to unit boundary displacements: -K_ii^-1 K_ib.
Matrix constraint_modes(const LinearSubstructure& sub);

struct ReductionOptions {
    double symmetry_tolerance = 1e-8;
    double orthogonality_tolerance = 1e-8;
};

/// Craig-Bampton reduction of a linear substructure.
///
/// Physical DOFs are ordered internal first, boundary last (the partition's
/// `ordering()`); reduced coordinates are [q; x_b] with q the modal amplitudes.
///
///     [x_i]   [Phi_r  Psi] [q  ]
///     [x_b] = [  0     I ] [x_b]
class CraigBamptonReduction {
public:
    CraigBamptonReduction(const LinearSubstructure& sub, Index mode_count,
                          const ReductionOptions& options = {});

    Index mode_count() const { return retained_modes_.cols(); }
    Index boundary_count() const { return static_cast<Index>(partition_.boundary.size()); }
    Index reduced_size() const { return transform_.cols(); }
    Index physical_size() const { return transform_.rows(); }

    const Matrix& retained_modes() const { return retained_modes_; }
    const Vector& retained_frequencies() const { return retained_frequencies_; }
    /// Frequency of the lowest discarded fixed-interface mode; empty when every mode is kept.
    std::optional<double> first_discarded_frequency() const { return first_discarded_; }
    const Matrix& constraint_modes() const { return constraint_modes_; }
    const Matrix& transform() const { return transform_; }
    const Matrix& reduced_mass() const { return reduced_mass_; }
    const Matrix& reduced_stiffness() const { return reduced_stiffness_; }
    const Matrix& reduced_damping() const { return reduced_damping_; }
    const Matrix& reduced_loads() const { return reduced_loads_; }
    const DofPartition& physical_partition() const { return partition_; }

    /// The reduced model as a substructure: modal coordinates internal, x_b boundary.
    LinearSubstructure reduced_substructure() const;

    /// CB * reduced, in internal-first physical ordering.
    Vector expand(const Vector& reduced) const;
    /// Scatters an internal-first physical vector back to original DOF numbering.
    Vector to_original_order(const Vector& partitioned) const;
    /// Row of CB producing physical DOF `dof` (original numbering) from reduced coordinates.
    Eigen::RowVectorXd physical_row(Index dof) const;
    /// Index in the reduced coordinates of boundary DOF `dof` (original numbering).
    Index reduced_dof(Index dof) const;

private:
    DofPartition partition_;
    Matrix retained_modes_;
    Vector retained_frequencies_;
    std::optional<double> first_discarded_;
    Matrix constraint_modes_;
    Matrix transform_;
    Matrix reduced_mass_;
    Matrix reduced_stiffness_;
    Matrix reduced_damping_;
    Matrix reduced_loads_;
    std::vector<Index> position_of_dof_;
};

CraigBamptonReduction reduce(const LinearSubstructure& sub, Index mode_count,
                             const ReductionOptions& options = {});

}  // namespace dsub
