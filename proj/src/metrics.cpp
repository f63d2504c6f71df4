#include "dsub/metrics.hpp"

#include <cmath>

namespace dsub {

Matrix mac(const Matrix& modes_a, const Matrix& modes_b) {
    if (modes_a.rows() != modes_b.rows()) {
        throw ModelError("MAC needs mode sets of equal dimension (" + std::to_string(modes_a.rows()) + " vs " +
                         std::to_string(modes_b.rows()) + ")");
    }
    const Vector na = modes_a.colwise().squaredNorm().transpose();
    const Vector nb = modes_b.colwise().squaredNorm().transpose();
    for (Index i = 0; i < na.size(); ++i) {
        if (na(i) == 0.0) throw ModelError("MAC: mode " + std::to_string(i) + " of the first set has zero norm");
    }
    for (Index j = 0; j < nb.size(); ++j) {
        if (nb(j) == 0.0) throw ModelError("MAC: mode " + std::to_string(j) + " of the second set has zero norm");
    }
    const Matrix cross = modes_a.transpose() * modes_b;
    Matrix out(cross.rows(), cross.cols());
    for (Index j = 0; j < cross.cols(); ++j) {
        for (Index i = 0; i < cross.rows(); ++i) {
            out(i, j) = std::min(1.0, cross(i, j) * cross(i, j) / (na(i) * nb(j)));
        }
    }
    return out;
}

double FrequencyErrorTable::max_abs_relative_error() const {
    return relative_error.size() == 0 ? 0.0 : relative_error.cwiseAbs().maxCoeff();
}

FrequencyErrorTable frequency_error_table(const Vector& full, const Vector& reduced, Index n) {
    if (n < 0 || n > full.size() || n > reduced.size()) {
        throw ModelError("frequency table: " + std::to_string(n) + " modes requested, " +
                         std::to_string(full.size()) + " full and " + std::to_string(reduced.size()) +
                         " reduced available");
    }
    FrequencyErrorTable t;
    t.full = full.head(n);
    t.reduced = reduced.head(n);
    t.relative_error = (t.reduced - t.full).cwiseQuotient(t.full);
    if (n > 0) {
        const double ref = t.full.squaredNorm();
        t.nmse = ref > 0.0 ? (t.reduced - t.full).squaredNorm() / ref : 0.0;
    }
    return t;
}

MseResult trajectory_mse(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) {
        throw ModelError("trajectory_mse: channel lengths differ (" + std::to_string(a.size()) + " vs " +
                         std::to_string(b.size()) + ")");
    }
    if (a.empty()) throw ModelError("trajectory_mse: empty channels");
    double err = 0.0;
    double ref = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        err += (a[k] - b[k]) * (a[k] - b[k]);
        ref += b[k] * b[k];
    }
    const auto n = static_cast<double>(a.size());
    MseResult r;
    r.mse = err / n;
    if (ref > 0.0) {
        r.relative = err / ref;
    } else {
        r.relative = err > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    }
    return r;
}

Smoothness smoothness(const std::vector<double>& channel) {
    if (channel.size() < 2) throw ModelError("smoothness needs at least two samples");
    Smoothness s;
    double sum = 0.0;
    for (std::size_t k = 1; k < channel.size(); ++k) {
        const double d = std::abs(channel[k] - channel[k - 1]);
        s.max_step = std::max(s.max_step, d);
        sum += d * d;
    }
    s.rms_step = std::sqrt(sum / static_cast<double>(channel.size() - 1));
    return s;
}

}  // namespace dsub
