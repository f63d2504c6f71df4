#include "dsub/coupling.hpp"

#include <utility>

namespace dsub {

CouplingTopology::CouplingTopology(std::vector<InterfaceConstraint> constraints, std::vector<Index> dof_counts)
    : constraints_(std::move(constraints)), dof_counts_(std::move(dof_counts)) {
    for (std::size_t c = 0; c < constraints_.size(); ++c) {
        const auto& con = constraints_[c];
        const std::string tag = "interface constraint " + std::to_string(c);
        for (const InterfaceEnd* end : {&con.first, &con.second}) {
            if (end->substructure < 0 || end->substructure >= substructure_count()) {
                throw ModelError(tag + ": unknown substructure " + std::to_string(end->substructure));
            }
            const Index n = dof_counts_[static_cast<std::size_t>(end->substructure)];
            if (end->dof < 0 || end->dof >= n) {
                throw ModelError(tag + ": DOF " + std::to_string(end->dof) + " outside substructure");
            }
            if (end->sign != 1 && end->sign != -1) throw ModelError(tag + ": sign must be +1 or -1");
        }
        if (con.first.substructure == con.second.substructure) {
            throw ModelError(tag + ": both ends lie on the same substructure");
        }
        if (con.first.sign == con.second.sign) throw ModelError(tag + ": ends must carry opposite signs");
    }
}

Matrix CouplingTopology::compatibility(Index substructure) const {
    const Index n = dof_counts_.at(static_cast<std::size_t>(substructure));
    Matrix g = Matrix::Zero(constraint_count(), 2 * n);
    for (Index c = 0; c < constraint_count(); ++c) {
        const auto& con = constraints_[static_cast<std::size_t>(c)];
        for (const InterfaceEnd* end : {&con.first, &con.second}) {
            if (end->substructure == substructure) g(c, n + end->dof) += end->sign;
        }
    }
    return g;
}

Matrix CouplingTopology::locator(Index substructure) const { return compatibility(substructure).transpose(); }

}  // namespace dsub
