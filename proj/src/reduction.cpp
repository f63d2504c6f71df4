#include "dsub/reduction.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <cmath>

namespace dsub {

namespace {

Matrix symmetrized(const Matrix& a) { return 0.5 * (a + a.transpose()); }

}  // namespace

ModalBasis generalized_modes(const Matrix& mass, const Matrix& stiffness, Index count) {
    const Index n = mass.rows();
    if (mass.cols() != n || stiffness.rows() != n || stiffness.cols() != n) {
        throw ModelError("generalized eigenproblem: matrix dimensions disagree");
    }
    if (count < 0 || count > n) count = n;
    if (n == 0) return {Matrix(0, 0), Vector(0)};

    Eigen::LLT<Matrix> chol(mass);
    if (chol.info() != Eigen::Success) {
        throw ModelError("mass matrix is singular or not positive definite");
    }
    // L^-1 K L^-T y = lambda y,  phi = L^-T y  (mass-normalized by construction)
    const auto lower = chol.matrixL();
    Matrix c = lower.solve(stiffness);
    c = lower.solve(c.transpose()).transpose();
    Eigen::SelfAdjointEigenSolver<Matrix> eig(symmetrized(c));
    if (eig.info() != Eigen::Success) throw SolverError("symmetric eigensolver did not converge");

    ModalBasis out;
    out.shapes = chol.matrixU().solve(eig.eigenvectors().leftCols(count));
    out.frequencies = eig.eigenvalues().head(count).cwiseMax(0.0).cwiseSqrt();
    return out;
}

ModalBasis fixed_interface_modes(const LinearSubstructure& sub, Index r) {
    const auto& p = sub.partition();
    const Index ni = static_cast<Index>(p.internal.size());
    if (r < 0 || r > ni) {
        throw ModelError("requested " + std::to_string(r) + " fixed-interface modes but only " +
                         std::to_string(ni) + " internal DOFs exist");
    }
    return generalized_modes(submatrix(sub.mass(), p.internal, p.internal),
                             submatrix(sub.stiffness(), p.internal, p.internal), r);
}

Matrix constraint_modes(const LinearSubstructure& sub) {
    const auto& p = sub.partition();
    const Matrix kii = submatrix(sub.stiffness(), p.internal, p.internal);
    const Matrix kib = submatrix(sub.stiffness(), p.internal, p.boundary);
    if (kii.rows() == 0) return Matrix(0, kib.cols());

    Eigen::LLT<Matrix> chol(kii);
    if (chol.info() == Eigen::Success) return -chol.solve(kib);

    Eigen::FullPivLU<Matrix> lu(kii);
    if (!lu.isInvertible()) {
        throw ModelError("K_ii is singular (rank " + std::to_string(lu.rank()) + " of " +
                         std::to_string(kii.rows()) +
                         "); the boundary DOFs do not restrain every internal rigid-body motion");
    }
    return -lu.solve(kib);
}

CraigBamptonReduction::CraigBamptonReduction(const LinearSubstructure& sub, Index mode_count,
                                             const ReductionOptions& options)
    : partition_(sub.partition()) {
    const Index ni = static_cast<Index>(partition_.internal.size());
    const Index nb = static_cast<Index>(partition_.boundary.size());
    const Index n = ni + nb;
    if (mode_count < 0 || mode_count > ni) {
        throw ModelError("requested " + std::to_string(mode_count) + " fixed-interface modes but only " +
                         std::to_string(ni) + " internal DOFs exist");
    }

    // All fixed-interface modes come out of the dense solve; keep the first r.
    const ModalBasis all = fixed_interface_modes(sub, ni);
    retained_modes_ = all.shapes.leftCols(mode_count);
    retained_frequencies_ = all.frequencies.head(mode_count);
    if (mode_count < ni) first_discarded_ = all.frequencies(mode_count);
    constraint_modes_ = dsub::constraint_modes(sub);

    transform_ = Matrix::Zero(n, mode_count + nb);
    transform_.topLeftCorner(ni, mode_count) = retained_modes_;
    transform_.topRightCorner(ni, nb) = constraint_modes_;
    transform_.bottomRightCorner(nb, nb).setIdentity();

    const auto order = partition_.ordering();
    const Matrix m = submatrix(sub.mass(), order, order);
    const Matrix k = submatrix(sub.stiffness(), order, order);
    const Matrix c = submatrix(sub.damping(), order, order);

    reduced_mass_ = transform_.transpose() * m * transform_;
    reduced_stiffness_ = transform_.transpose() * k * transform_;
    reduced_damping_ = transform_.transpose() * c * transform_;

    Matrix loads(n, sub.loads().cols());
    for (Index i = 0; i < n; ++i) loads.row(i) = sub.loads().row(order[static_cast<std::size_t>(i)]);
    reduced_loads_ = transform_.transpose() * loads;

    if (asymmetry(reduced_mass_) > options.symmetry_tolerance ||
        asymmetry(reduced_stiffness_) > options.symmetry_tolerance) {
        throw SolverError("reduced mass/stiffness lost symmetry beyond tolerance");
    }
    reduced_mass_ = symmetrized(reduced_mass_);
    reduced_stiffness_ = symmetrized(reduced_stiffness_);
    reduced_damping_ = symmetrized(reduced_damping_);

    if (mode_count > 0) {
        const Matrix mii = submatrix(sub.mass(), partition_.internal, partition_.internal);
        const Matrix gram = retained_modes_.transpose() * mii * retained_modes_;
        const double err = (gram - Matrix::Identity(mode_count, mode_count)).cwiseAbs().maxCoeff();
        if (err > options.orthogonality_tolerance) {
            throw SolverError("fixed-interface modes are not mass-orthonormal (error " +
                              std::to_string(err) + ")");
        }
    }

    position_of_dof_.assign(static_cast<std::size_t>(n), 0);
    for (Index i = 0; i < n; ++i) position_of_dof_[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])] = i;
}

LinearSubstructure CraigBamptonReduction::reduced_substructure() const {
    DofPartition p;
    for (Index i = 0; i < mode_count(); ++i) p.internal.push_back(i);
    for (Index i = 0; i < boundary_count(); ++i) p.boundary.push_back(mode_count() + i);
    return LinearSubstructure(reduced_mass_, reduced_damping_, reduced_stiffness_, std::move(p),
                              reduced_loads_);
}

Vector CraigBamptonReduction::expand(const Vector& reduced) const {
    if (reduced.size() != reduced_size()) {
        throw ModelError("reduced vector has " + std::to_string(reduced.size()) + " entries, expected " +
                         std::to_string(reduced_size()));
    }
    return transform_ * reduced;
}

Vector CraigBamptonReduction::to_original_order(const Vector& partitioned) const {
    if (partitioned.size() != physical_size()) throw ModelError("physical vector dimension mismatch");
    Vector out(partitioned.size());
    for (Index d = 0; d < out.size(); ++d) out(d) = partitioned(position_of_dof_[static_cast<std::size_t>(d)]);
    return out;
}

Eigen::RowVectorXd CraigBamptonReduction::physical_row(Index dof) const {
    if (dof < 0 || dof >= physical_size()) throw ModelError("DOF " + std::to_string(dof) + " out of range");
    return transform_.row(position_of_dof_[static_cast<std::size_t>(dof)]);
}

Index CraigBamptonReduction::reduced_dof(Index dof) const {
    if (dof < 0 || dof >= physical_size()) throw ModelError("DOF " + std::to_string(dof) + " out of range");
    const Index ni = physical_size() - boundary_count();
    const Index pos = position_of_dof_[static_cast<std::size_t>(dof)];
    if (pos < ni) throw ModelError("DOF " + std::to_string(dof) + " is internal and has no reduced coordinate");
    return mode_count() + (pos - ni);
}

CraigBamptonReduction reduce(const LinearSubstructure& sub, Index mode_count, const ReductionOptions& options) {
    return CraigBamptonReduction(sub, mode_count, options);
}

}  // namespace dsub
