#pragma once

#include "dsub/common.hpp"

#include <vector>

namespace dsub {

struct InterfaceEnd {
    Index substructure = 0;
    Index dof = 0;
    int sign = 1;
};

/// One scalar constraint: sign_a v_a + sign_b v_b = 0 between two substructures.
struct InterfaceConstraint {
    InterfaceEnd first;
    InterfaceEnd second;
};

/// Signed collocation of interface DOFs across substructures.
///
/// G_s (n_c x 2 n_s) selects the boundary velocity rows of the first-order
/// state of substructure s; L_s = G_s^T places the multipliers into the
/// matching momentum rows, so the two ends of a constraint receive equal and
/// opposite forces.
class CouplingTopology {
public:
    CouplingTopology() = default;
    CouplingTopology(std::vector<InterfaceConstraint> constraints, std::vector<Index> dof_counts);

    Index constraint_count() const { return static_cast<Index>(constraints_.size()); }
    Index substructure_count() const { return static_cast<Index>(dof_counts_.size()); }
    const std::vector<InterfaceConstraint>& constraints() const { return constraints_; }
    const std::vector<Index>& dof_counts() const { return dof_counts_; }

    Matrix compatibility(Index substructure) const;
    Matrix locator(Index substructure) const;

private:
    std::vector<InterfaceConstraint> constraints_;
    std::vector<Index> dof_counts_;
};

}  // namespace dsub
