#pragma once

#include "dsub/coupling.hpp"
#include "dsub/integrator.hpp"
#include "dsub/model.hpp"
#include "dsub/timeseries.hpp"

#include <utility>
#include <vector>

namespace dsub {

/// Suspension element placed on global DOFs.
struct NonlinearHook {
    SuspensionElement element;
    Index wheel = 0;
    Index attachment = 0;
    bool relative_motion = true;
};

/// Primal assembly of coupled substructures: interface DOFs are merged into
/// one global DOF, so compatibility holds exactly.
struct AssembledSystem {
    SparseMatrix mass;
    SparseMatrix damping;
    SparseMatrix stiffness;
    Matrix loads;
    std::vector<NonlinearHook> hooks;
    /// dof_map[s][local DOF] = global DOF.
    std::vector<std::vector<Index>> dof_map;
    Index constraint_count = 0;

    Index dof_count() const { return mass.rows(); }
    /// Physical nonlinear forces of all hooks.
    Vector hook_force(const Vector& u, const Vector& v) const;
    /// Tangent stiffness / damping (linear part plus hooks at zero state).
    std::pair<SparseMatrix, SparseMatrix> tangent_at_zero() const;
};

AssembledSystem assemble_global(const std::vector<Substructure>& substructures, const CouplingTopology& topology);

/// Trapezoidal integration of the assembled system with the same
/// predictor / rate / corrector stages as free_step. States are scattered
/// back to the substructures; multipliers are reported as zeros.
Trajectory solve_monolithic(const AssembledSystem& system, const SolverConfig& config, const InputTable& inputs);

/// Newmark average-acceleration (beta = 1/4, gamma = 1/2) in second-order form.
/// Nonlinear hooks are resolved each step by modified Newton iterations with
/// the zero-state tangent.
Trajectory solve_newmark(const AssembledSystem& system, const SolverConfig& config, const InputTable& inputs);

/// Closed-form free vibration of m u'' + c u' + k u = 0; returns (u, v) at t.
std::pair<double, double> analytic_sdof(double m, double c, double k, double u0, double v0, double t);

}  // namespace dsub
