#include "dsub/common.hpp"

#include <algorithm>

namespace dsub {

std::vector<Index> DofPartition::ordering() const {
    std::vector<Index> order(internal);
    order.insert(order.end(), boundary.begin(), boundary.end());
    return order;
}

void DofPartition::validate(Index dof_count) const {
    std::vector<int> seen(static_cast<std::size_t>(dof_count), 0);
    auto mark = [&](const std::vector<Index>& dofs, const char* which) {
        for (Index d : dofs) {
            if (d < 0 || d >= dof_count) {
                throw ModelError(std::string(which) + " DOF " + std::to_string(d) +
                                 " outside 0.." + std::to_string(dof_count - 1));
            }
            if (seen[static_cast<std::size_t>(d)]++ != 0) {
                throw ModelError("DOF " + std::to_string(d) + " listed more than once in partition");
            }
        }
    };
    mark(internal, "internal");
    mark(boundary, "boundary");
    if (std::find(seen.begin(), seen.end(), 0) != seen.end()) {
        throw ModelError("DOF partition does not cover every DOF of the substructure");
    }
}

Matrix submatrix(const Matrix& m, const std::vector<Index>& rows, const std::vector<Index>& cols) {
    Matrix out(static_cast<Index>(rows.size()), static_cast<Index>(cols.size()));
    for (Index j = 0; j < out.cols(); ++j) {
        for (Index i = 0; i < out.rows(); ++i) {
            out(i, j) = m(rows[static_cast<std::size_t>(i)], cols[static_cast<std::size_t>(j)]);
        }
    }
    return out;
}

double asymmetry(const Matrix& a) {
    if (a.size() == 0) return 0.0;
    const double scale = a.cwiseAbs().maxCoeff();
    if (scale == 0.0) return 0.0;
    return (a - a.transpose()).cwiseAbs().maxCoeff() / scale;
}

}  // namespace dsub
