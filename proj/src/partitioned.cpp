#include "dsub/partitioned.hpp"

#include <tbb/parallel_for.h>
#include <tbb/task_arena.h>

#include <chrono>
#include <cmath>
#include <optional>

namespace dsub {

void PartitionedSystem::validate() const {
    if (components.empty()) throw ModelError("partitioned system has no substructures");
    if (topology.substructure_count() != static_cast<Index>(components.size())) {
        throw ModelError("coupling topology describes " + std::to_string(topology.substructure_count()) +
                         " substructures, system has " + std::to_string(components.size()));
    }
    for (std::size_t s = 0; s < components.size(); ++s) {
        if (topology.dof_counts()[s] != components[s].form.dof_count()) {
            throw ModelError("coupling topology DOF count disagrees with substructure '" +
                             components[s].name + "'");
        }
    }
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

void check_inputs(const PartitionedSystem& system, const SolverConfig& config, const InputTable& inputs) {
    for (const auto& c : system.components) {
        if (c.form.channel_count() > inputs.channel_count()) {
            throw ModelError("substructure '" + c.name + "' references input channel " +
                             std::to_string(c.form.channel_count() - 1) + " but only " +
                             std::to_string(inputs.channel_count()) + " channels were supplied");
        }
    }
    if (inputs.channel_count() > 0 && inputs.end_time() < config.duration - 1e-9 * config.dt) {
        throw ModelError("input signals end at t = " + std::to_string(inputs.end_time()) +
                         " before the simulation horizon " + std::to_string(config.duration));
    }
}

double state_norm(const Vector& y) {
    if (!y.allFinite()) return std::numeric_limits<double>::infinity();
    return y.size() == 0 ? 0.0 : y.lpNorm<Eigen::Infinity>();
}

void check_divergence(const Vector& y, double bound, Index step) {
    const double norm = state_norm(y);
    if (!(norm <= bound)) throw DivergenceError(step, norm);
}

}  // namespace

Trajectory simulate(const PartitionedSystem& system, const SolverConfig& config, const InputTable& inputs,
                    const std::vector<Vector>& initial_states) {
    config.validate();
    system.validate();
    check_inputs(system, config, inputs);

    const auto setup_start = Clock::now();
    const std::size_t ns = system.components.size();
    const Index ss = config.subcycles;
    const double dt = config.dt;
    const Index steps = config.step_count();
    const bool coupled = system.topology.constraint_count() > 0;

    std::vector<double> own_step(ns);
    std::vector<EffectiveMatrix> effective;
    effective.reserve(ns);
    for (std::size_t s = 0; s < ns; ++s) {
        own_step[s] = system.components[s].physical ? dt / static_cast<double>(ss) : dt;
        effective.emplace_back(system.components[s].form, own_step[s], config.gamma);
    }
    std::vector<const EffectiveMatrix*> effective_ptrs;
    for (const auto& d : effective) effective_ptrs.push_back(&d);
    std::optional<InterfaceOperator> interface;
    std::vector<Matrix> locators(ns);
    if (coupled) {
        interface.emplace(steklov_poincare(system.topology, effective_ptrs, dt));
        for (std::size_t s = 0; s < ns; ++s) locators[s] = system.topology.locator(static_cast<Index>(s));
    }
    const Index nc = system.topology.constraint_count();

    std::vector<StepState> current(ns);
    const Vector inputs0 = inputs.at(0.0);
    for (std::size_t s = 0; s < ns; ++s) {
        const auto& form = system.components[s].form;
        if (initial_states.empty()) {
            current[s].state = Vector::Zero(form.state_size());
        } else {
            if (initial_states.size() != ns || initial_states[s].size() != form.state_size()) {
                throw ModelError("initial state dimensions do not match the substructures");
            }
            current[s].state = initial_states[s];
        }
        current[s].rate = initial_rate(form, current[s].state, form.external_force(inputs0));
    }
    Vector multipliers = Vector::Zero(nc);

    Trajectory traj;
    traj.states.resize(ns);
    traj.fine_states.resize(ns);
    traj.fine_period = dt / static_cast<double>(ss);
    traj.times.reserve(static_cast<std::size_t>(steps + 1));
    traj.times.push_back(0.0);
    traj.multipliers.push_back(multipliers);
    traj.compatibility_residual.push_back(coupled ? interface->gap(current).norm() : 0.0);
    traj.free_gap.push_back(traj.compatibility_residual.back());
    for (std::size_t s = 0; s < ns; ++s) {
        traj.states[s].reserve(static_cast<std::size_t>(steps + 1));
        traj.states[s].push_back(current[s].state);
        if (system.components[s].physical) {
            traj.fine_states[s].reserve(static_cast<std::size_t>(steps * ss + 1));
            traj.fine_states[s].push_back(current[s].state);
        }
    }

    const int threads = config.threads > 0 ? config.threads : threads_from_environment();
    std::optional<tbb::task_arena> arena;
    if (threads > 1 && ns > 1) arena.emplace(threads);
    traj.timing.setup_seconds = seconds_since(setup_start);

    const auto stepping_start = Clock::now();
    std::vector<StepState> free(ns);
    for (Index n = 0; n < steps; ++n) {
        const double t_next = static_cast<double>(n + 1) * dt;

        auto free_phase = [&](std::size_t s) {
            const auto& comp = system.components[s];
            if (!comp.physical) {
                free[s] = free_step(comp.form, effective[s], current[s], comp.form.external_force(inputs.at(t_next)));
                return;
            }
            StepState inner = current[s];
            for (Index j = 1; j <= ss; ++j) {
                const double t = static_cast<double>(n * ss + j) * own_step[s];
                Vector force = comp.form.external_force(inputs.at(t));
                if (coupled) {
                    const double ramp = 1.0 - static_cast<double>(j) / static_cast<double>(ss);
                    force.noalias() += ramp * (locators[s] * multipliers);
                }
                inner = free_step(comp.form, effective[s], inner, force);
                if (j < ss) {
                    check_divergence(inner.state, config.divergence_bound, n + 1);
                    traj.fine_states[s].push_back(inner.state);
                }
            }
            free[s] = std::move(inner);
        };
        if (arena) {
            arena->execute([&] {
                tbb::parallel_for(std::size_t{0}, ns, [&](std::size_t s) { free_phase(s); });
            });
        } else {
            for (std::size_t s = 0; s < ns; ++s) free_phase(s);
        }

        if (coupled) {
            const Vector gap = interface->gap(free);
            const CouplingResult link = coupling_step(*interface, free);
            multipliers = link.multipliers;
            for (std::size_t s = 0; s < ns; ++s) {
                current[s].state = free[s].state + link.link[s].state;
                current[s].rate = free[s].rate + link.link[s].rate;
            }
            traj.free_gap.push_back(gap.norm());
            traj.compatibility_residual.push_back(interface->gap(current).norm());
        } else {
            for (std::size_t s = 0; s < ns; ++s) current[s] = free[s];
            traj.free_gap.push_back(0.0);
            traj.compatibility_residual.push_back(0.0);
        }

        traj.times.push_back(t_next);
        traj.multipliers.push_back(multipliers);
        for (std::size_t s = 0; s < ns; ++s) {
            check_divergence(current[s].state, config.divergence_bound, n + 1);
            traj.states[s].push_back(current[s].state);
            if (system.components[s].physical) traj.fine_states[s].push_back(current[s].state);
        }
    }
    traj.timing.stepping_seconds = seconds_since(stepping_start);
    return traj;
}

Trajectory simulate_subcycled(const PartitionedSystem& system, const SolverConfig& config,
                              const InputTable& inputs, const std::vector<Vector>& initial_states) {
    bool any_physical = false;
    for (const auto& c : system.components) any_physical = any_physical || c.physical;
    if (!any_physical) throw ModelError("sub-cycling needs at least one physical substructure");
    return simulate(system, config, inputs, initial_states);
}

}  // namespace dsub
