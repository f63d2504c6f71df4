#pragma once

#include "dsub/coupling.hpp"
#include "dsub/model.hpp"
#include "dsub/reduction.hpp"

#include <string>
#include <vector>

namespace dsub {

/// Spring-mass chain of n equal masses. With `grounded` the first mass is tied
/// to ground and the last end is free, giving the tridiagonal [-1, 2, -1]
/// pattern with a 1 in the last diagonal entry; otherwise both ends are free.
/// Damping follows the same pattern with c.
struct ChainSpec {
    Index n = 3;
    double mass = 1.0;
    double stiffness = 1.0;
    double damping = 0.0;
    bool grounded = true;
    /// Boundary DOFs; all other DOFs are internal.
    std::vector<Index> boundary;
};

LinearSubstructure make_chain(const ChainSpec& spec);

/// Plate-like lattice standing in for a vehicle frame: nx x ny nodes with one
/// vertical DOF each, nearest-neighbour membrane springs, three-point bending
/// springs along both grid directions, and unequal ground springs at the four
/// corners. Four mount DOFs are attached to interior nodes by bracket springs;
/// they are the last four DOFs and form the boundary.
struct FrameAnalogSpec {
    Index nx = 20;
    Index ny = 10;
    double node_mass = 0.01;
    double mount_mass = 0.001;
    double membrane_stiffness = 1e4;
    double bending_stiffness = 1e4;
    double corner_stiffness = 100.0;
    double bracket_stiffness = 1e3;
    double rayleigh_alpha = 0.0;
    double rayleigh_beta = 0.0;

    Index dof_count() const { return nx * ny + 4; }
};

LinearSubstructure make_frame_analog(const FrameAnalogSpec& spec);

/// `count` suspension elements with the default coefficients; element e is
/// driven by input channel e.
std::vector<SuspensionElement> default_suspensions(Index count = 4);

/// Linear counterpart of a suspension set: the same DOF layout, masses and
/// zero-state tangents, with the wheel loads of the nonlinear model.
LinearSubstructure linearized_suspensions(const NonlinearSubstructure& suspensions);

/// A set of named substructures and the constraints between them.
struct ModelSet {
    std::vector<std::string> names;
    std::vector<Substructure> substructures;
    /// Components flagged physical are the ones sub-cycled.
    std::vector<bool> physical;
    CouplingTopology topology;
};

/// Couples boundary DOF k of `frame` (sign +1) to the attachment DOF of
/// suspension element k (sign -1).
ModelSet frame_with_suspensions(const LinearSubstructure& frame, const Substructure& suspensions);

struct ReducedModelSet {
    ModelSet set;
    CraigBamptonReduction reduction;
};

/// The same system with the frame (substructure 0) replaced by its
/// Craig-Bampton reduction; interface constraints are renumbered accordingly.
ReducedModelSet reduce_frame(const ModelSet& set, Index mode_count);

}  // namespace dsub
