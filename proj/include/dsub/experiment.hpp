#pragma once

#include "dsub/generators.hpp"
#include "dsub/io.hpp"
#include "dsub/metrics.hpp"
#include "dsub/partitioned.hpp"
#include "dsub/reference.hpp"
#include "dsub/signals.hpp"

#include <optional>
#include <string>
#include <vector>

namespace dsub {

/// Every substructure in first-order form with the set's topology.
PartitionedSystem build_partitioned(const ModelSet& set);

/// Partitioned solve of a model set.
Trajectory simulate_set(const ModelSet& set, const SolverConfig& config, const InputTable& inputs);

/// Monolithic solve of the primal assembly of a model set; states are reported per substructure.
Trajectory monolithic_set(const ModelSet& set, const SolverConfig& config, const InputTable& inputs);

struct ExperimentConfig {
    json model;
    /// Fixed-interface modes kept for the first substructure; empty runs it at full order.
    std::optional<Index> modes;
    SolverConfig solver;
    SignalSpec signal;
    /// Number of input channels; defaults to the largest channel the model references.
    std::optional<Index> channels;
    bool run_partitioned = true;
    bool run_monolithic = true;
    /// Directory for partitioned.csv, monolithic.csv, inputs.csv and report.json; empty writes nothing.
    std::string output_dir;
};

ExperimentConfig experiment_config_from_json(const json& j);

struct ProbeError {
    std::string label;
    MseResult error;
};

struct ExperimentReport {
    Index full_dofs = 0;
    Index reduced_dofs = 0;
    double reduction_seconds = 0.0;
    /// Reduction plus factorizations and interface operator of the partitioned run.
    double offline_seconds = 0.0;
    /// Stepping loop of the partitioned run.
    double online_seconds = 0.0;
    double monolithic_setup_seconds = 0.0;
    double monolithic_online_seconds = 0.0;
    std::optional<FrequencyErrorTable> frequencies;
    /// Partitioned against monolithic, per boundary displacement trace.
    std::vector<ProbeError> errors;
    double max_relative_mse = 0.0;
    double speedup = 0.0;

    json to_json() const;
};

/// Reduction (offline), partitioned and monolithic solves (online), and the comparison
/// of boundary displacement traces between them.
ExperimentReport run_experiment(const ExperimentConfig& config);

}  // namespace dsub
