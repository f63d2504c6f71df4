#pragma once

#include "dsub/coupling.hpp"
#include "dsub/integrator.hpp"
#include "dsub/model.hpp"
#include "dsub/timeseries.hpp"

#include <string>
#include <vector>

namespace dsub {

struct Component {
    std::string name;
    FirstOrderForm form;
    /// Integrated with ss inner steps when the solver runs with subcycles > 1.
    bool physical = false;
};

/// Substructures plus the interface constraints that tie them together.
struct PartitionedSystem {
    std::vector<Component> components;
    CouplingTopology topology;

    /// Throws ModelError unless the topology matches the components' DOF counts.
    void validate() const;
};

/// Partitioned trapezoidal integration with dual coupling, one coupling solve
/// per step. Physical components are sub-cycled when config.subcycles > 1:
/// their free solution is replaced by ss inner steps of size dt/ss, each
/// loaded with the previous multipliers scaled by (1 - j/ss).
///
/// `initial_states` may be empty (all zero) or hold one state per component.
Trajectory simulate(const PartitionedSystem& system, const SolverConfig& config, const InputTable& inputs,
                    const std::vector<Vector>& initial_states = {});

/// simulate() with at least one physical component required.
Trajectory simulate_subcycled(const PartitionedSystem& system, const SolverConfig& config,
                              const InputTable& inputs, const std::vector<Vector>& initial_states = {});

}  // namespace dsub
