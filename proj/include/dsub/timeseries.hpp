#pragma once

#include "dsub/common.hpp"

#include <vector>

namespace dsub {

/// Uniformly sampled input signals, one column per channel.
class InputTable {
public:
    InputTable() = default;
    InputTable(double sample_period, Matrix samples);

    Index channel_count() const { return samples_.cols(); }
    Index sample_count() const { return samples_.rows(); }
    double sample_period() const { return period_; }
    double end_time() const;
    const Matrix& samples() const { return samples_; }

    /// Channel values at time t; exact at sample instants, linear in between.
    /// Throws ModelError outside [0, end_time()].
    Vector at(double t) const;

private:
    double period_ = 1.0;
    Matrix samples_;
};

/// Time history produced by the partitioned and monolithic solvers.
struct Trajectory {
    struct Timing {
        double setup_seconds = 0.0;     ///< tangents, factorizations, interface operator
        double stepping_seconds = 0.0;  ///< the time-stepping loop
    };

    std::vector<double> times;
    /// states[s][k]: first-order state [u; v] of substructure s at times[k].
    std::vector<std::vector<Vector>> states;
    /// multipliers[k]: interface force intensities at times[k].
    std::vector<Vector> multipliers;
    /// Sub-cycled substructures keep every inner state (ss per coupled step, plus t = 0).
    std::vector<std::vector<Vector>> fine_states;
    double fine_period = 0.0;
    /// |sum_s G_s Y_s| after coupling, and the same quantity for the free solutions.
    std::vector<double> compatibility_residual;
    std::vector<double> free_gap;
    Timing timing;

    Index step_count() const { return static_cast<Index>(times.size()); }
    /// Displacement (component 0) or velocity (component 1) history of one DOF.
    std::vector<double> channel(Index substructure, Index dof, int component = 0) const;
};

}  // namespace dsub
