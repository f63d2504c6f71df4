#pragma once

#include "dsub/generators.hpp"
#include "dsub/integrator.hpp"
#include "dsub/reduction.hpp"
#include "dsub/timeseries.hpp"

#include <json.hpp>

#include <iosfwd>
#include <string>
#include <vector>

namespace dsub {

using json = nlohmann::json;

/// Numeric CSV with one header row.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

CsvTable read_csv(const std::string& path);
void write_csv(const std::string& path, const CsvTable& table);
void write_csv(std::ostream& out, const CsvTable& table);

/// Matrices are stored as {"rows": r, "cols": c, "data": [row-major values]}.
json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const json& j);

/// Model files hold a list of substructures and the interface constraints:
///
///     {"substructures": [
///         {"name": "frame", "kind": "linear", "generator": {"type": "frame_analog", "nx": 20}},
///         {"name": "wheels", "kind": "suspension", "physical": true, "elements": [{"channel": 0}]}],
///      "interfaces": [{"first": {"substructure": 0, "dof": 200, "sign": 1},
///                      "second": {"substructure": 1, "dof": 4, "sign": -1}}]}
///
/// Linear entries give either "generator" (chain or frame_analog) or explicit
/// "mass", "stiffness", optional "damping" and "loads", plus "boundary" DOFs.
/// When "interfaces" is absent and the file holds a linear body followed by a
/// suspension set, the two are joined as in frame_with_suspensions.
ModelSet model_from_json(const json& j);
json model_to_json(const ModelSet& set);
ModelSet read_model(const std::string& path);
void write_model(const std::string& path, const ModelSet& set);

json chain_spec_to_json(const ChainSpec& spec);
ChainSpec chain_spec_from_json(const json& j);
json frame_spec_to_json(const FrameAnalogSpec& spec);
FrameAnalogSpec frame_spec_from_json(const json& j);
json suspension_to_json(const SuspensionElement& e);
SuspensionElement suspension_from_json(const json& j);

/// Compact model file: the generated frame analog plus four default suspensions.
json frame_model_json(const FrameAnalogSpec& spec, bool relative_motion = true);
/// Compact model file holding a single chain.
json chain_model_json(const ChainSpec& spec);

json read_json(const std::string& path);
void write_json(const std::string& path, const json& j);

/// {"dt", "gamma", "subcycles", "duration", "divergence_bound", "threads"}; missing keys keep defaults.
SolverConfig solver_config_from_json(const json& j);
json solver_config_to_json(const SolverConfig& c);

/// Inputs CSV: a "time" column followed by one column per channel, uniformly sampled.
InputTable read_inputs(const std::string& path);
void write_inputs(const std::string& path, const InputTable& inputs);

/// One selected output channel.
struct Probe {
    Index substructure = 0;
    Index dof = 0;
    /// DOF number used in the column name; negative means `dof`.
    Index label = -1;
};

/// Boundary DOFs of every substructure.
std::vector<Probe> boundary_probes(const ModelSet& set);

/// Columns: time, then <name>_u<dof> and <name>_v<dof> per probe, then lambda<c>.
CsvTable trajectory_table(const Trajectory& traj, const std::vector<std::string>& names,
                          const std::vector<Probe>& probes);

/// Matrices, frequencies and partition of a reduction.
json reduction_to_json(const CraigBamptonReduction& red);

}  // namespace dsub
