#include "dsub/reference.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

namespace dsub {

namespace {

using Clock = std::chrono::steady_clock;
using Triplets = std::vector<Eigen::Triplet<double>>;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

Index find_root(std::vector<Index>& parent, Index i) {
    while (parent[static_cast<std::size_t>(i)] != i) {
        parent[static_cast<std::size_t>(i)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(i)])];
        i = parent[static_cast<std::size_t>(i)];
    }
    return i;
}

void scatter_dense(const Matrix& local, const std::vector<Index>& map, Triplets& out) {
    for (Index j = 0; j < local.cols(); ++j) {
        for (Index i = 0; i < local.rows(); ++i) {
            if (local(i, j) != 0.0) {
                out.emplace_back(map[static_cast<std::size_t>(i)], map[static_cast<std::size_t>(j)], local(i, j));
            }
        }
    }
}

SparseMatrix build(Index n, const Triplets& t) {
    SparseMatrix m(n, n);
    m.setFromTriplets(t.begin(), t.end());
    m.makeCompressed();
    return m;
}

struct HookKinematics {
    double x;
    double xd;
};

HookKinematics kinematics(const NonlinearHook& h, const Vector& u, const Vector& v) {
    if (h.relative_motion) return {u(h.wheel) - u(h.attachment), v(h.wheel) - v(h.attachment)};
    return {u(h.wheel), v(h.wheel)};
}

void check_inputs(const AssembledSystem& system, const SolverConfig& config, const InputTable& inputs) {
    config.validate();
    if (system.loads.cols() > inputs.channel_count()) {
        throw ModelError("assembled system references " + std::to_string(system.loads.cols()) +
                         " input channels but only " + std::to_string(inputs.channel_count()) + " were supplied");
    }
    if (inputs.channel_count() > 0 && inputs.end_time() < config.duration - 1e-9 * config.dt) {
        throw ModelError("input signals end before the simulation horizon");
    }
}

Vector physical_load(const AssembledSystem& system, const InputTable& inputs, double t) {
    const Vector s = inputs.at(t);
    Vector f = Vector::Zero(system.dof_count());
    const Index used = std::min(system.loads.cols(), s.size());
    if (used > 0) f.noalias() = system.loads.leftCols(used) * s.head(used);
    return f;
}

void check_divergence(const Vector& a, const Vector& b, double bound, Index step) {
    double norm = std::max(a.size() ? a.lpNorm<Eigen::Infinity>() : 0.0, b.size() ? b.lpNorm<Eigen::Infinity>() : 0.0);
    if (!a.allFinite() || !b.allFinite()) norm = std::numeric_limits<double>::infinity();
    if (!(norm <= bound)) throw DivergenceError(step, norm);
}

/// Scatters global (u, v) histories into per-substructure first-order states.
Trajectory scatter(const AssembledSystem& system, std::vector<double> times, const std::vector<Vector>& u,
                   const std::vector<Vector>& v) {
    Trajectory traj;
    traj.times = std::move(times);
    traj.states.resize(system.dof_map.size());
    traj.fine_states.resize(system.dof_map.size());
    for (std::size_t s = 0; s < system.dof_map.size(); ++s) {
        const auto& map = system.dof_map[s];
        const auto n = static_cast<Index>(map.size());
        traj.states[s].reserve(u.size());
        for (std::size_t k = 0; k < u.size(); ++k) {
            Vector y(2 * n);
            for (Index i = 0; i < n; ++i) {
                y(i) = u[k](map[static_cast<std::size_t>(i)]);
                y(n + i) = v[k](map[static_cast<std::size_t>(i)]);
            }
            traj.states[s].push_back(std::move(y));
        }
    }
    traj.multipliers.assign(u.size(), Vector::Zero(system.constraint_count));
    traj.compatibility_residual.assign(u.size(), 0.0);
    traj.free_gap.assign(u.size(), 0.0);
    return traj;
}

}  // namespace

Vector AssembledSystem::hook_force(const Vector& u, const Vector& v) const {
    Vector f = Vector::Zero(dof_count());
    for (const auto& h : hooks) {
        const auto [x, xd] = kinematics(h, u, v);
        const double force = element_force(h.element, x, xd);
        f(h.wheel) += force;
        f(h.attachment) -= force;
    }
    return f;
}

std::pair<SparseMatrix, SparseMatrix> AssembledSystem::tangent_at_zero() const {
    Triplets kt;
    Triplets ct;
    for (const auto& h : hooks) {
        // One-element substructure gives the local tangent in (wheel, attachment) order.
        const NonlinearSubstructure local({h.element}, h.relative_motion);
        const auto [k, c] = local.tangent_at_zero();
        const std::vector<Index> map{h.wheel, h.attachment};
        scatter_dense(k, map, kt);
        scatter_dense(c, map, ct);
    }
    SparseMatrix k = stiffness + build(dof_count(), kt);
    SparseMatrix c = damping + build(dof_count(), ct);
    return {k, c};
}

AssembledSystem assemble_global(const std::vector<Substructure>& substructures, const CouplingTopology& topology) {
    const std::size_t ns = substructures.size();
    std::vector<Index> offset(ns + 1, 0);
    for (std::size_t s = 0; s < ns; ++s) {
        const Index n = std::visit([](const auto& m) { return m.dof_count(); }, substructures[s]);
        offset[s + 1] = offset[s] + n;
    }
    if (topology.substructure_count() != static_cast<Index>(ns)) {
        throw ModelError("topology and substructure list disagree in length");
    }
    for (std::size_t s = 0; s < ns; ++s) {
        if (topology.dof_counts()[s] != offset[s + 1] - offset[s]) {
            throw ModelError("topology DOF count disagrees with substructure " + std::to_string(s));
        }
    }

    const Index total = offset[ns];
    std::vector<Index> parent(static_cast<std::size_t>(total));
    std::iota(parent.begin(), parent.end(), Index{0});
    for (const auto& con : topology.constraints()) {
        const Index a = find_root(parent, offset[static_cast<std::size_t>(con.first.substructure)] + con.first.dof);
        const Index b = find_root(parent, offset[static_cast<std::size_t>(con.second.substructure)] + con.second.dof);
        if (a == b) throw ModelError("redundant interface constraint: DOFs are already merged");
        parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
    }

    AssembledSystem out;
    out.constraint_count = topology.constraint_count();
    std::vector<Index> global_of_root(static_cast<std::size_t>(total), -1);
    Index next = 0;
    out.dof_map.resize(ns);
    for (std::size_t s = 0; s < ns; ++s) {
        const Index n = offset[s + 1] - offset[s];
        std::vector<Index> seen_roots;
        for (Index d = 0; d < n; ++d) {
            const Index root = find_root(parent, offset[s] + d);
            if (std::find(seen_roots.begin(), seen_roots.end(), root) != seen_roots.end()) {
                throw ModelError("interface constraints merge two DOFs of substructure " + std::to_string(s));
            }
            seen_roots.push_back(root);
            auto& g = global_of_root[static_cast<std::size_t>(root)];
            if (g < 0) g = next++;
            out.dof_map[s].push_back(g);
        }
    }
    if (next != total - topology.constraint_count()) {
        throw ModelError("inconsistent constraint graph");
    }

    Triplets mt;
    Triplets ct;
    Triplets kt;
    Index channels = 0;
    for (const auto& sub : substructures) {
        channels = std::max(channels, std::visit([](const auto& m) { return Index{m.loads().cols()}; }, sub));
    }
    out.loads = Matrix::Zero(next, channels);
    for (std::size_t s = 0; s < ns; ++s) {
        const auto& map = out.dof_map[s];
        if (const auto* lin = std::get_if<LinearSubstructure>(&substructures[s])) {
            scatter_dense(lin->mass(), map, mt);
            scatter_dense(lin->damping(), map, ct);
            scatter_dense(lin->stiffness(), map, kt);
            for (Index i = 0; i < lin->dof_count(); ++i) {
                out.loads.row(map[static_cast<std::size_t>(i)]).head(lin->loads().cols()) += lin->loads().row(i);
            }
        } else {
            const auto& nl = std::get<NonlinearSubstructure>(substructures[s]);
            scatter_dense(nl.mass(), map, mt);
            const Matrix b = nl.loads();
            for (Index i = 0; i < nl.dof_count(); ++i) {
                out.loads.row(map[static_cast<std::size_t>(i)]).head(b.cols()) += b.row(i);
            }
            for (Index e = 0; e < nl.element_count(); ++e) {
                out.hooks.push_back({nl.elements()[static_cast<std::size_t>(e)],
                                     map[static_cast<std::size_t>(nl.wheel_dof(e))],
                                     map[static_cast<std::size_t>(nl.attachment_dof(e))], nl.relative_motion()});
            }
        }
    }
    out.mass = build(next, mt);
    out.damping = build(next, ct);
    out.stiffness = build(next, kt);
    return out;
}

Trajectory solve_monolithic(const AssembledSystem& system, const SolverConfig& config, const InputTable& inputs) {
    check_inputs(system, config, inputs);
    const auto setup_start = Clock::now();
    const Index n = system.dof_count();
    const double h = config.dt;
    const double a = config.gamma * h;
    const auto [kt, ct] = system.tangent_at_zero();

    SparseMatrix s = system.mass + a * ct + (a * a) * kt;
    s.makeCompressed();
    Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
    lu.compute(s);
    if (lu.info() != Eigen::Success) {
        throw SolverError("monolithic effective matrix is singular for dt = " + std::to_string(h));
    }
    Eigen::SimplicialLDLT<SparseMatrix> mass_solver(system.mass);
    if (mass_solver.info() != Eigen::Success) throw SolverError("assembled mass matrix is singular");

    const bool nonlinear = !system.hooks.empty();
    auto restoring_v = [&](const Vector& u, const Vector& v) {
        Vector r = system.damping * v + system.stiffness * u;
        if (nonlinear) r += system.hook_force(u, v);
        return r;
    };

    const Index steps = config.step_count();
    Vector u = Vector::Zero(n);
    Vector v = Vector::Zero(n);
    Vector du = v;
    Vector dv = mass_solver.solve(physical_load(system, inputs, 0.0) - restoring_v(u, v));

    std::vector<double> times{0.0};
    std::vector<Vector> hist_u{u};
    std::vector<Vector> hist_v{v};
    times.reserve(static_cast<std::size_t>(steps + 1));
    hist_u.reserve(static_cast<std::size_t>(steps + 1));
    hist_v.reserve(static_cast<std::size_t>(steps + 1));
    const double setup = seconds_since(setup_start);

    const auto stepping_start = Clock::now();
    for (Index k = 0; k < steps; ++k) {
        const double t = static_cast<double>(k + 1) * h;
        const Vector pu = u + ((1.0 - config.gamma) * h) * du;
        const Vector pv = v + ((1.0 - config.gamma) * h) * dv;
        // rhs = F - R(Y~): displacement rows carry +v~, velocity rows F - f(u~, v~)
        const Vector& ru = pv;
        const Vector rv = physical_load(system, inputs, t) - restoring_v(pu, pv);
        dv = lu.solve(rv - a * (kt * ru));
        du = ru + a * dv;
        u = pu + a * du;
        v = pv + a * dv;
        check_divergence(u, v, config.divergence_bound, k + 1);
        times.push_back(t);
        hist_u.push_back(u);
        hist_v.push_back(v);
    }
    const double stepping = seconds_since(stepping_start);

    Trajectory traj = scatter(system, std::move(times), hist_u, hist_v);
    traj.timing.setup_seconds = setup;
    traj.timing.stepping_seconds = stepping;
    return traj;
}

Trajectory solve_newmark(const AssembledSystem& system, const SolverConfig& config, const InputTable& inputs) {
    check_inputs(system, config, inputs);
    const auto setup_start = Clock::now();
    const Index n = system.dof_count();
    const double h = config.dt;
    const auto [kt, ct] = system.tangent_at_zero();
    SparseMatrix s = system.mass + (0.5 * h) * ct + (0.25 * h * h) * kt;
    s.makeCompressed();
    Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
    lu.compute(s);
    if (lu.info() != Eigen::Success) throw SolverError("Newmark effective matrix is singular");
    Eigen::SimplicialLDLT<SparseMatrix> mass_solver(system.mass);
    if (mass_solver.info() != Eigen::Success) throw SolverError("assembled mass matrix is singular");

    auto residual = [&](const Vector& f, const Vector& acc, const Vector& u, const Vector& v) {
        Vector r = f - system.mass * acc - system.damping * v - system.stiffness * u;
        if (!system.hooks.empty()) r -= system.hook_force(u, v);
        return r;
    };

    Vector u = Vector::Zero(n);
    Vector v = Vector::Zero(n);
    Vector acc = mass_solver.solve(residual(physical_load(system, inputs, 0.0), Vector::Zero(n), u, v));
    const Index steps = config.step_count();
    std::vector<double> times{0.0};
    std::vector<Vector> hist_u{u};
    std::vector<Vector> hist_v{v};
    const double setup = seconds_since(setup_start);

    const auto stepping_start = Clock::now();
    constexpr int kMaxIterations = 100;
    for (Index k = 0; k < steps; ++k) {
        const double t = static_cast<double>(k + 1) * h;
        const Vector f = physical_load(system, inputs, t);
        const Vector pu = u + h * v + (0.25 * h * h) * acc;
        const Vector pv = v + (0.5 * h) * acc;
        Vector next = acc;
        bool converged = false;
        for (int it = 0; it < kMaxIterations; ++it) {
            const Vector delta =
                lu.solve(residual(f, next, pu + (0.25 * h * h) * next, pv + (0.5 * h) * next));
            next += delta;
            if (delta.norm() <= 1e-10 * std::max(next.norm(), 1e-300) || delta.norm() == 0.0) {
                converged = true;
                break;
            }
        }
        if (!converged) throw SolverError("Newmark iterations did not converge at step " + std::to_string(k + 1));
        acc = next;
        u = pu + (0.25 * h * h) * acc;
        v = pv + (0.5 * h) * acc;
        check_divergence(u, v, config.divergence_bound, k + 1);
        times.push_back(t);
        hist_u.push_back(u);
        hist_v.push_back(v);
    }
    const double stepping = seconds_since(stepping_start);
    Trajectory traj = scatter(system, std::move(times), hist_u, hist_v);
    traj.timing.setup_seconds = setup;
    traj.timing.stepping_seconds = stepping;
    return traj;
}

std::pair<double, double> analytic_sdof(double m, double c, double k, double u0, double v0, double t) {
    if (!(m > 0.0) || !(k > 0.0)) throw ModelError("analytic_sdof needs positive mass and stiffness");
    if (c < 0.0) throw ModelError("analytic_sdof needs non-negative damping");
    const double w0 = std::sqrt(k / m);
    const double zeta = c / (2.0 * m * w0);
    const double alpha = -zeta * w0;
    const double decay = std::exp(alpha * t);
    const double b = v0 - alpha * u0;
    if (std::abs(zeta - 1.0) < 1e-10) {
        return {decay * (u0 + b * t), decay * (alpha * (u0 + b * t) + b)};
    }
    if (zeta < 1.0) {
        const double wd = w0 * std::sqrt(1.0 - zeta * zeta);
        const double cs = std::cos(wd * t);
        const double sn = std::sin(wd * t);
        const double bb = b / wd;
        return {decay * (u0 * cs + bb * sn), decay * ((alpha * u0 + bb * wd) * cs + (alpha * bb - u0 * wd) * sn)};
    }
    const double ws = w0 * std::sqrt(zeta * zeta - 1.0);
    const double ch = std::cosh(ws * t);
    const double sh = std::sinh(ws * t);
    const double bb = b / ws;
    return {decay * (u0 * ch + bb * sh), decay * ((alpha * u0 + bb * ws) * ch + (alpha * bb + u0 * ws) * sh)};
}

}  // namespace dsub
