#pragma once

#include "dsub/common.hpp"

#include <vector>

namespace dsub {

/// MAC(i, j) = |a_i^T b_j|^2 / ((a_i^T a_i)(b_j^T b_j)) over the columns of a and b.
/// Throws ModelError on a row-count mismatch or a zero-norm mode.
Matrix mac(const Matrix& modes_a, const Matrix& modes_b);

struct FrequencyErrorTable {
    Vector full;
    Vector reduced;
    /// (reduced - full) / full, per mode.
    Vector relative_error;
    /// mean((reduced - full)^2) / mean(full^2).
    double nmse = 0.0;

    double max_abs_relative_error() const;
};

/// Compares the first n entries. Throws ModelError if n exceeds either length.
FrequencyErrorTable frequency_error_table(const Vector& full, const Vector& reduced, Index n);

struct MseResult {
    double mse = 0.0;
    /// mse / mean(reference^2); zero when both signals vanish identically.
    double relative = 0.0;
};

/// b is the reference. Throws ModelError on a length mismatch or empty input.
MseResult trajectory_mse(const std::vector<double>& a, const std::vector<double>& b);

struct Smoothness {
    double max_step = 0.0;
    double rms_step = 0.0;
};

/// Max and RMS of |x[k+1] - x[k]|. Needs at least two samples.
Smoothness smoothness(const std::vector<double>& channel);

}  // namespace dsub
