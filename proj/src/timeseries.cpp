#include "dsub/timeseries.hpp"

#include <cmath>
#include <utility>

namespace dsub {

InputTable::InputTable(double sample_period, Matrix samples)
    : period_(sample_period), samples_(std::move(samples)) {
    if (!(period_ > 0.0)) throw ModelError("input sample period must be positive");
}

double InputTable::end_time() const {
    return samples_.rows() == 0 ? 0.0 : period_ * static_cast<double>(samples_.rows() - 1);
}

Vector InputTable::at(double t) const {
    if (samples_.cols() == 0) return Vector(0);
    const double pos = t / period_;
    const double nearest = std::round(pos);
    const double last = static_cast<double>(samples_.rows() - 1);
    if (pos < -1e-9 || pos > last + 1e-9) {
        throw ModelError("input signals do not cover t = " + std::to_string(t));
    }
    if (std::abs(pos - nearest) < 1e-9) {
        return samples_.row(static_cast<Index>(nearest)).transpose();
    }
    const auto i = static_cast<Index>(std::floor(pos));
    const double w = pos - static_cast<double>(i);
    return ((1.0 - w) * samples_.row(i) + w * samples_.row(i + 1)).transpose();
}

std::vector<double> Trajectory::channel(Index substructure, Index dof, int component) const {
    const auto& hist = states.at(static_cast<std::size_t>(substructure));
    std::vector<double> out;
    out.reserve(hist.size());
    for (const auto& y : hist) {
        const Index n = y.size() / 2;
        out.push_back(y(component == 0 ? dof : n + dof));
    }
    return out;
}

}  // namespace dsub
