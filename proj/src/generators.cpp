#include "dsub/generators.hpp"

#include <algorithm>
#include <array>

namespace dsub {

namespace {

DofPartition partition_with_boundary(Index n, std::vector<Index> boundary) {
    DofPartition p;
    std::sort(boundary.begin(), boundary.end());
    for (Index d = 0; d < n; ++d) {
        if (!std::binary_search(boundary.begin(), boundary.end(), d)) p.internal.push_back(d);
    }
    p.boundary = std::move(boundary);
    return p;
}

void add_spring(Matrix& k, Index a, Index b, double value) {
    k(a, a) += value;
    k(b, b) += value;
    k(a, b) -= value;
    k(b, a) -= value;
}

void add_bending(Matrix& k, Index a, Index b, Index c, double value) {
    const std::array<Index, 3> idx{a, b, c};
    const std::array<double, 3> w{1.0, -2.0, 1.0};
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < 3; ++j) k(idx[i], idx[j]) += value * w[i] * w[j];
    }
}

Index count_of(const Substructure& s) {
    return std::visit([](const auto& m) { return m.dof_count(); }, s);
}

const DofPartition& partition_of(const Substructure& s) {
    return std::visit([](const auto& m) -> const DofPartition& { return m.partition(); }, s);
}

}  // namespace

LinearSubstructure make_chain(const ChainSpec& spec) {
    if (spec.n < 1) throw ModelError("chain needs at least one mass");
    if (!(spec.mass > 0.0)) throw ModelError("chain mass must be positive");
    const Index n = spec.n;
    Matrix k = Matrix::Zero(n, n);
    Matrix c = Matrix::Zero(n, n);
    if (spec.grounded) {
        k(0, 0) += spec.stiffness;
        c(0, 0) += spec.damping;
    }
    for (Index i = 0; i + 1 < n; ++i) {
        add_spring(k, i, i + 1, spec.stiffness);
        add_spring(c, i, i + 1, spec.damping);
    }
    for (Index b : spec.boundary) {
        if (b < 0 || b >= n) throw ModelError("chain boundary DOF " + std::to_string(b) + " out of range");
    }
    return LinearSubstructure(spec.mass * Matrix::Identity(n, n), c, k, partition_with_boundary(n, spec.boundary));
}

LinearSubstructure make_frame_analog(const FrameAnalogSpec& spec) {
    if (spec.nx < 6 || spec.ny < 3) throw ModelError("frame analog needs nx >= 6 and ny >= 3");
    if (!(spec.node_mass > 0.0) || !(spec.mount_mass > 0.0)) throw ModelError("frame masses must be positive");
    const Index nx = spec.nx;
    const Index ny = spec.ny;
    const Index nodes = nx * ny;
    const Index n = nodes + 4;
    auto idx = [nx](Index i, Index j) { return j * nx + i; };

    Matrix k = Matrix::Zero(n, n);
    for (Index j = 0; j < ny; ++j) {
        for (Index i = 0; i < nx; ++i) {
            if (i + 1 < nx) add_spring(k, idx(i, j), idx(i + 1, j), spec.membrane_stiffness);
            if (j + 1 < ny) add_spring(k, idx(i, j), idx(i, j + 1), spec.membrane_stiffness);
            if (i + 2 < nx) add_bending(k, idx(i, j), idx(i + 1, j), idx(i + 2, j), spec.bending_stiffness);
            if (j + 2 < ny) add_bending(k, idx(i, j), idx(i, j + 1), idx(i, j + 2), spec.bending_stiffness);
        }
    }
    const std::array<Index, 4> corners{idx(0, 0), idx(nx - 1, 0), idx(0, ny - 1), idx(nx - 1, ny - 1)};
    const std::array<double, 4> corner_scale{1.0, 1.5, 2.0, 2.5};
    for (std::size_t c = 0; c < 4; ++c) k(corners[c], corners[c]) += spec.corner_stiffness * corner_scale[c];

    const std::array<Index, 4> mounts{idx(nx / 5, 1), idx(nx - 1 - nx / 4, 1), idx(nx / 6, ny - 2),
                                      idx(nx - 1 - nx / 5, ny - 2)};
    std::vector<Index> boundary;
    for (Index e = 0; e < 4; ++e) {
        add_spring(k, nodes + e, mounts[static_cast<std::size_t>(e)], spec.bracket_stiffness);
        boundary.push_back(nodes + e);
    }

    Vector m(n);
    m.head(nodes).setConstant(spec.node_mass);
    m.tail(4).setConstant(spec.mount_mass);
    const Matrix mass = m.asDiagonal();
    const Matrix damping = spec.rayleigh_alpha * mass + spec.rayleigh_beta * k;
    return LinearSubstructure(mass, damping, k, partition_with_boundary(n, boundary));
}

std::vector<SuspensionElement> default_suspensions(Index count) {
    std::vector<SuspensionElement> out(static_cast<std::size_t>(count));
    for (Index e = 0; e < count; ++e) out[static_cast<std::size_t>(e)].base_excitation_channel = e;
    return out;
}

LinearSubstructure linearized_suspensions(const NonlinearSubstructure& suspensions) {
    const auto [k, c] = suspensions.tangent_at_zero();
    return LinearSubstructure(suspensions.mass(), c, k, suspensions.partition(), suspensions.loads());
}

ModelSet frame_with_suspensions(const LinearSubstructure& frame, const Substructure& suspensions) {
    const auto& boundary = frame.partition().boundary;
    const auto& attach = partition_of(suspensions).boundary;
    if (boundary.size() != attach.size()) {
        throw ModelError("frame has " + std::to_string(boundary.size()) + " boundary DOFs but the suspension set " +
                         std::to_string(attach.size()));
    }
    std::vector<InterfaceConstraint> constraints;
    for (std::size_t e = 0; e < boundary.size(); ++e) {
        constraints.push_back({{0, boundary[e], 1}, {1, attach[e], -1}});
    }
    ModelSet set;
    set.names = {"frame", "suspension"};
    set.substructures = {frame, suspensions};
    set.physical = {false, true};
    set.topology = CouplingTopology(std::move(constraints), {frame.dof_count(), count_of(suspensions)});
    return set;
}

ReducedModelSet reduce_frame(const ModelSet& set, Index mode_count) {
    const auto* frame = std::get_if<LinearSubstructure>(&set.substructures.at(0));
    if (frame == nullptr) throw ModelError("first substructure must be the linear frame");
    CraigBamptonReduction red(*frame, mode_count);
    ModelSet out = set;
    out.substructures[0] = red.reduced_substructure();
    std::vector<InterfaceConstraint> constraints = set.topology.constraints();
    for (auto& con : constraints) {
        for (InterfaceEnd* end : {&con.first, &con.second}) {
            if (end->substructure == 0) end->dof = red.reduced_dof(end->dof);
        }
    }
    std::vector<Index> counts = set.topology.dof_counts();
    counts[0] = red.reduced_size();
    out.topology = CouplingTopology(std::move(constraints), std::move(counts));
    return {std::move(out), std::move(red)};
}

}  // namespace dsub
