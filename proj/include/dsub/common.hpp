#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace dsub {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using SparseMatrix = Eigen::SparseMatrix<double>;

/// Raised when a substructure, topology or reduction cannot be built from its inputs.
class ModelError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised when a linear solve or factorization inside an integrator fails.
class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised by the time integrators when a state norm exceeds the divergence bound.
class DivergenceError : public SolverError {
public:
    DivergenceError(Index step, double norm)
        : SolverError("simulation diverged at step " + std::to_string(step) +
                      " (state norm " + std::to_string(norm) + ")"),
          step_(step), norm_(norm) {}

    Index step() const { return step_; }
    double norm() const { return norm_; }

private:
    Index step_;
    double norm_;
};

/// Ordered split of a substructure's DOFs into internal and boundary (interface) sets.
struct DofPartition {
    std::vector<Index> internal;
    std::vector<Index> boundary;

    /// Internal DOFs followed by boundary DOFs.
    std::vector<Index> ordering() const;

    /// Throws ModelError unless internal and boundary are a disjoint cover of {0..n-1}.
    void validate(Index dof_count) const;
};

/// Extracts rows/cols of `m` selected by `rows` and `cols`.
Matrix submatrix(const Matrix& m, const std::vector<Index>& rows, const std::vector<Index>& cols);

/// max|a - a^T| / max|a|, zero for an all-zero matrix.
double asymmetry(const Matrix& a);

}  // namespace dsub
