#include "dsub/generators.hpp"
#include "dsub/integrator.hpp"
#include "dsub/partitioned.hpp"
#include "dsub/reference.hpp"

#include <gtest/gtest.h>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>

using namespace dsub;

namespace {

LinearSubstructure sdof(double m, double c, double k) {
    return LinearSubstructure(Matrix::Constant(1, 1, m), Matrix::Constant(1, 1, c), Matrix::Constant(1, 1, k),
                              DofPartition{{}, {0}});
}

LinearSubstructure two_mass(double k2) {
    Matrix k(2, 2);
    k << 1.0 + k2, -k2, -k2, k2;
    Matrix m(2, 2);
    m << 1.0, 0.0, 0.0, 0.5;
    return LinearSubstructure(m, 0.02 * k, k, DofPartition{{0}, {1}});
}

InputTable constant_inputs(double duration, double dt, Index channels, double value) {
    const auto n = static_cast<Index>(std::llround(duration / dt)) + 1;
    return InputTable(dt, Matrix::Constant(n, channels, value));
}

InputTable ramp_inputs(double duration, double dt, Index channels) {
    const auto n = static_cast<Index>(std::llround(duration / dt)) + 1;
    Matrix s(n, channels);
    for (Index k = 0; k < n; ++k) {
        for (Index c = 0; c < channels; ++c) s(k, c) = std::sin(30.0 * k * dt + c) + 0.3 * std::cos(170.0 * k * dt);
    }
    return InputTable(dt, s);
}

// Two-mass chain (frame side) coupled at its tip to a single mass (other side).
PartitionedSystem coupled_pair(int sign = 1) {
    Matrix b(2, 1);
    b << 1.0, 0.0;
    const LinearSubstructure left = two_mass(3.0).with_loads(b);
    const LinearSubstructure right(Matrix::Constant(1, 1, 0.7), Matrix::Constant(1, 1, 0.05),
                                   Matrix::Constant(1, 1, 2.0), DofPartition{{}, {0}});
    CouplingTopology topo({{{0, 1, sign}, {1, 0, -sign}}}, {2, 1});
    return PartitionedSystem{{{"left", FirstOrderForm(left), false}, {"right", FirstOrderForm(right), true}}, topo};
}

}  // namespace

TEST(EffectiveMatrix, HandAssembledOscillator) {
    const FirstOrderForm form(sdof(1, 0, 1));
    const EffectiveMatrix d(form, 0.1, 0.5);
    Matrix expected(2, 2);
    expected << 1, -0.05, 0.05, 1;
    EXPECT_TRUE(d.matrix().isApprox(expected, 1e-15));
    const Vector rhs = Vector::LinSpaced(2, 0.3, -1.2);
    EXPECT_LT((d.solve(rhs) - expected.lu().solve(rhs)).norm(), 1e-14);
}

TEST(EffectiveMatrix, ZeroGammaIsStateMass) {
    const FirstOrderForm form(two_mass(2.0));
    const EffectiveMatrix d(form, 0.1, 0.0);
    EXPECT_TRUE(d.matrix().isApprox(form.state_mass()));
}

TEST(EffectiveMatrix, SchurSolveMatchesDenseSolve) {
    const FirstOrderForm form(NonlinearSubstructure(std::vector<SuspensionElement>(2)));
    const EffectiveMatrix d(form, 1e-3, 0.5);
    const Matrix rhs = Matrix::Random(form.state_size(), 3);
    EXPECT_LT((d.solve(rhs) - d.matrix().fullPivLu().solve(rhs)).norm(), 1e-10 * rhs.norm());
}

TEST(SolverConfig, Validation) {
    SolverConfig c;
    EXPECT_NO_THROW(c.validate());
    c.dt = 0.0;
    EXPECT_THROW(c.validate(), ModelError);
    c = SolverConfig{};
    c.gamma = 0.0;
    EXPECT_THROW(c.validate(), ModelError);
    c = SolverConfig{};
    c.gamma = 1.5;
    EXPECT_THROW(c.validate(), ModelError);
    c = SolverConfig{};
    c.subcycles = 0;
    EXPECT_THROW(c.validate(), ModelError);
    c = SolverConfig{};
    c.duration = 0.00125;
    EXPECT_THROW(c.validate(), ModelError);
    c.duration = 0.002;
    EXPECT_EQ(c.step_count(), 2);
}

TEST(FreeStep, ZeroStaysZero) {
    const FirstOrderForm form(two_mass(1.0));
    const EffectiveMatrix d(form, 1e-3, 0.5);
    const StepState next = free_step(form, d, {Vector::Zero(4), Vector::Zero(4)}, Vector::Zero(4));
    EXPECT_TRUE(next.state.isZero(0.0));
    EXPECT_TRUE(next.rate.isZero(0.0));
}

TEST(FreeStep, OneStepOfUnitOscillator) {
    const FirstOrderForm form(sdof(1, 0, 1));
    const EffectiveMatrix d(form, 0.01, 0.5);
    Vector y(2);
    y << 1, 0;
    const StepState s0{y, initial_rate(form, y, Vector::Zero(2))};
    const StepState s1 = free_step(form, d, s0, Vector::Zero(2));
    // Local error of the trapezoidal rule is dt^3 / 12 times the third derivative.
    EXPECT_LT(std::abs(s1.state(0) - std::cos(0.01)), 1e-7);
    EXPECT_LT(std::abs(s1.state(1) + std::sin(0.01)), 1e-6);
}

TEST(FreeStep, SecondOrderAgainstMatrixExponential) {
    const LinearSubstructure sub = two_mass(4.0);
    const FirstOrderForm form(sub);
    Vector y0(4);
    y0 << 0.3, -0.1, 0.0, 0.5;
    const Matrix system = -form.state_mass().inverse() * form.tangent_at_zero();
    const Vector exact = (system * 1.0).exp() * y0;
    auto error = [&](double dt) {
        const EffectiveMatrix d(form, dt, 0.5);
        StepState s{y0, initial_rate(form, y0, Vector::Zero(4))};
        const auto steps = static_cast<int>(std::lround(1.0 / dt));
        for (int k = 0; k < steps; ++k) s = free_step(form, d, s, Vector::Zero(4));
        return (s.state - exact).norm();
    };
    const double e1 = error(1e-2);
    const double e2 = error(5e-3);
    const double e3 = error(2.5e-3);
    EXPECT_NEAR(e1 / e2, 4.0, 0.1);
    EXPECT_NEAR(e2 / e3, 4.0, 0.1);
}

TEST(FreeStep, ConservesDiscreteEnergyOfUndampedSystem) {
    const LinearSubstructure sub(two_mass(4.0).mass(), Matrix::Zero(2, 2), two_mass(4.0).stiffness(),
                                 DofPartition{{0}, {1}});
    const FirstOrderForm form(sub);
    const EffectiveMatrix d(form, 1e-2, 0.5);
    Vector y(4);
    y << 0.3, -0.2, 0.1, 0.4;
    auto energy = [&](const Vector& s) {
        const Vector u = s.head(2);
        const Vector v = s.tail(2);
        return 0.5 * v.dot(sub.mass() * v) + 0.5 * u.dot(sub.stiffness() * u);
    };
    StepState s{y, initial_rate(form, y, Vector::Zero(4))};
    const double e0 = energy(y);
    double worst = 0.0;
    for (int k = 0; k < 10000; ++k) {
        s = free_step(form, d, s, Vector::Zero(4));
        worst = std::max(worst, std::abs(energy(s.state) - e0));
    }
    EXPECT_LT(worst, 1e-12 * e0);
}

TEST(InterfaceOperator, IdenticalSingleDofPair) {
    const FirstOrderForm form(sdof(2.0, 0.1, 3.0));
    const EffectiveMatrix d(form, 1e-2, 0.5);
    const CouplingTopology topo({{{0, 0, 1}, {1, 0, -1}}}, {1, 1});
    const InterfaceOperator h = steklov_poincare(topo, {&d, &d}, 1e-2);
    const Matrix g = topo.compatibility(0);
    const Matrix l = topo.locator(0);
    const double expected = 2.0 * (g * d.matrix().inverse() * l)(0, 0);
    ASSERT_EQ(h.matrix().rows(), 1);
    EXPECT_NEAR(h.matrix()(0, 0), expected, 1e-14 * std::abs(expected));
}

TEST(InterfaceOperator, ZeroCompatibilityIsSingular) {
    const FirstOrderForm form(sdof(1, 0, 1));
    const EffectiveMatrix d(form, 1e-2, 0.5);
    EXPECT_THROW(InterfaceOperator({Matrix::Zero(1, 2)}, {Matrix::Zero(2, 1)}, {&d}, 1e-2), SolverError);
}

TEST(InterfaceOperator, RedundantConstraintsAreSingular) {
    const FirstOrderForm form(sdof(1, 0, 1));
    const EffectiveMatrix d(form, 1e-2, 0.5);
    const CouplingTopology topo({{{0, 0, 1}, {1, 0, -1}}, {{0, 0, 1}, {1, 0, -1}}}, {1, 1});
    EXPECT_THROW(steklov_poincare(topo, {&d, &d}, 1e-2), SolverError);
}

TEST(InterfaceOperator, SignFlipFlipsRowAndColumn) {
    const FirstOrderForm a(two_mass(2.0));
    const FirstOrderForm b(two_mass(5.0));
    const EffectiveMatrix da(a, 1e-3, 0.5);
    const EffectiveMatrix db(b, 1e-3, 0.5);
    const CouplingTopology plain({{{0, 0, 1}, {1, 0, -1}}, {{0, 1, 1}, {1, 1, -1}}}, {2, 2});
    const CouplingTopology flipped({{{0, 0, -1}, {1, 0, 1}}, {{0, 1, 1}, {1, 1, -1}}}, {2, 2});
    const Matrix h1 = steklov_poincare(plain, {&da, &db}, 1e-3).matrix();
    const Matrix h2 = steklov_poincare(flipped, {&da, &db}, 1e-3).matrix();
    EXPECT_NEAR(h2(0, 0), h1(0, 0), 1e-15);
    EXPECT_NEAR(h2(1, 1), h1(1, 1), 1e-15);
    EXPECT_NEAR(h2(0, 1), -h1(0, 1), 1e-15);
    EXPECT_NEAR(h2(1, 0), -h1(1, 0), 1e-15);
}

TEST(Coupling, CompatibleFreeSolutionsNeedNoMultipliers) {
    const FirstOrderForm form(two_mass(2.0));
    const EffectiveMatrix d(form, 1e-3, 0.5);
    const CouplingTopology topo({{{0, 1, 1}, {1, 1, -1}}}, {2, 2});
    const InterfaceOperator op = steklov_poincare(topo, {&d, &d}, 1e-3);
    Vector y(4);
    y << 0.1, 0.2, 0.3, 0.4;
    const CouplingResult r = coupling_step(op, {{y, y}, {y, y}});
    EXPECT_TRUE(r.multipliers.isZero(0.0));
    EXPECT_TRUE(r.link[0].state.isZero(0.0));
    EXPECT_TRUE(r.link[1].rate.isZero(0.0));
}

TEST(Coupling, ResidualAnnihilatedAndActionReaction) {
    const FirstOrderForm a(two_mass(2.0));
    const FirstOrderForm b(NonlinearSubstructure(std::vector<SuspensionElement>(1)));
    const EffectiveMatrix da(a, 1e-3, 0.5);
    const EffectiveMatrix db(b, 1e-3, 0.5);
    const CouplingTopology topo({{{0, 1, 1}, {1, 1, -1}}}, {2, 2});
    const InterfaceOperator op = steklov_poincare(topo, {&da, &db}, 1e-3);
    std::vector<StepState> free{{Vector::LinSpaced(4, 0.1, 0.9), Vector::Zero(4)},
                                {Vector::LinSpaced(4, -0.4, 0.2), Vector::Zero(4)}};
    const CouplingResult r = coupling_step(op, free);
    std::vector<StepState> coupled = free;
    for (std::size_t s = 0; s < 2; ++s) coupled[s].state += r.link[s].state;
    EXPECT_LE(op.gap(coupled).norm(), 1e-10 * op.gap(free).norm());
    // Forces L_s Lambda on the two ends are equal and opposite.
    const Vector fa = topo.locator(0) * r.multipliers;
    const Vector fb = topo.locator(1) * r.multipliers;
    EXPECT_DOUBLE_EQ(fa(3), -fb(3));
    EXPECT_DOUBLE_EQ(fa(2), 0.0);
}

TEST(Topology, Validation) {
    EXPECT_THROW(CouplingTopology({{{0, 0, 1}, {0, 1, -1}}}, {2}), ModelError);
    EXPECT_THROW(CouplingTopology({{{0, 0, 1}, {1, 0, 1}}}, {1, 1}), ModelError);
    EXPECT_THROW(CouplingTopology({{{0, 0, 2}, {1, 0, -2}}}, {1, 1}), ModelError);
    EXPECT_THROW(CouplingTopology({{{0, 3, 1}, {1, 0, -1}}}, {1, 1}), ModelError);
    EXPECT_THROW(CouplingTopology({{{0, 0, 1}, {2, 0, -1}}}, {1, 1}), ModelError);
    const CouplingTopology ok({{{0, 1, 1}, {1, 0, -1}}}, {2, 1});
    Matrix g0 = Matrix::Zero(1, 4);
    g0(0, 3) = 1.0;
    EXPECT_TRUE(ok.compatibility(0).isApprox(g0));
    EXPECT_TRUE(ok.locator(0).isApprox(g0.transpose()));
    EXPECT_DOUBLE_EQ(ok.compatibility(1)(0, 1), -1.0);
}

TEST(Simulate, ZeroInputZeroState) {
    const PartitionedSystem sys = coupled_pair();
    SolverConfig cfg;
    cfg.duration = 0.2;
    const Trajectory t = simulate(sys, cfg, constant_inputs(0.2, 1e-3, 1, 0.0));
    ASSERT_EQ(t.step_count(), 201);
    for (const auto& hist : t.states) {
        for (const auto& y : hist) EXPECT_TRUE(y.isZero(0.0));
    }
    for (const auto& l : t.multipliers) EXPECT_TRUE(l.isZero(0.0));
}

TEST(Simulate, SingleSubstructureIsRepeatedFreeStep) {
    const LinearSubstructure sub = two_mass(3.0).with_loads(Matrix::Ones(2, 1));
    const FirstOrderForm form(sub);
    PartitionedSystem sys{{{"only", form, false}}, CouplingTopology({}, {2})};
    SolverConfig cfg;
    cfg.duration = 0.05;
    const InputTable in = ramp_inputs(0.05, 1e-3, 1);
    const Trajectory t = simulate(sys, cfg, in);
    const EffectiveMatrix d(form, cfg.dt, cfg.gamma);
    StepState s{Vector::Zero(4), initial_rate(form, Vector::Zero(4), form.external_force(in.at(0.0)))};
    for (Index k = 1; k < t.step_count(); ++k) {
        s = free_step(form, d, s, form.external_force(in.at(static_cast<double>(k) * cfg.dt)));
        EXPECT_EQ(t.states[0][static_cast<std::size_t>(k)], s.state);
    }
}

TEST(Simulate, TimesAreUniform) {
    const PartitionedSystem sys = coupled_pair();
    SolverConfig cfg;
    cfg.duration = 0.1;
    const Trajectory t = simulate(sys, cfg, ramp_inputs(0.1, 1e-3, 1));
    for (std::size_t k = 0; k < t.times.size(); ++k) EXPECT_NEAR(t.times[k], 1e-3 * static_cast<double>(k), 1e-15);
    EXPECT_EQ(t.multipliers.size(), t.times.size());
    EXPECT_EQ(t.states[1].size(), t.times.size());
}

TEST(Simulate, VelocityCompatibilityEveryStep) {
    const PartitionedSystem sys = coupled_pair();
    SolverConfig cfg;
    cfg.duration = 0.5;
    const Trajectory t = simulate(sys, cfg, ramp_inputs(0.5, 1e-3, 1));
    for (std::size_t k = 1; k < t.times.size(); ++k) {
        EXPECT_LE(t.compatibility_residual[k], 1e-10 * std::max(t.free_gap[k], 1e-300));
        EXPECT_NEAR(t.states[0][k](3), t.states[1][k](1), 1e-12);
    }
}

TEST(Simulate, SignConventionDoesNotChangeMotion) {
    SolverConfig cfg;
    cfg.duration = 0.3;
    const InputTable in = ramp_inputs(0.3, 1e-3, 1);
    const Trajectory a = simulate(coupled_pair(1), cfg, in);
    const Trajectory b = simulate(coupled_pair(-1), cfg, in);
    for (std::size_t k = 0; k < a.times.size(); ++k) {
        EXPECT_LT((a.states[0][k] - b.states[0][k]).norm(), 1e-12);
        EXPECT_LT((a.states[1][k] - b.states[1][k]).norm(), 1e-12);
        EXPECT_NEAR(a.multipliers[k](0), -b.multipliers[k](0), 1e-9);
    }
}

TEST(Simulate, MirroredSubstructuresShareBoundaryVelocity) {
    const FirstOrderForm form(two_mass(2.0));
    PartitionedSystem sys{{{"a", form, false}, {"b", form, false}},
                          CouplingTopology({{{0, 1, 1}, {1, 1, -1}}}, {2, 2})};
    SolverConfig cfg;
    cfg.duration = 0.2;
    Vector ya(4);
    ya << 0.2, 0.0, 0.0, 0.0;
    const Trajectory t = simulate(sys, cfg, InputTable(), {ya, -ya});
    for (std::size_t k = 0; k < t.times.size(); ++k) {
        EXPECT_NEAR(t.states[0][k](3), t.states[1][k](3), 1e-12);
        EXPECT_NEAR(t.states[0][k](3), 0.0, 1e-12);
    }
}

TEST(Simulate, MatchesMonolithicSolveOnLinearSystem) {
    const PartitionedSystem sys = coupled_pair();
    SolverConfig cfg;
    cfg.duration = 1.0;
    const InputTable in = ramp_inputs(1.0, 1e-3, 1);
    const Trajectory p = simulate(sys, cfg, in);
    std::vector<Substructure> subs{sys.components[0].form.model(), sys.components[1].form.model()};
    const Trajectory m = solve_monolithic(assemble_global(subs, sys.topology), cfg, in);
    for (std::size_t k = 0; k < p.times.size(); ++k) {
        EXPECT_LT((p.states[0][k] - m.states[0][k]).norm(), 1e-10);
        EXPECT_LT((p.states[1][k] - m.states[1][k]).norm(), 1e-10);
    }
}

TEST(Simulate, ParallelRunIsBitwiseDeterministic) {
    const ModelSet set = frame_with_suspensions(make_frame_analog(FrameAnalogSpec{}),
                                                NonlinearSubstructure(default_suspensions(4)));
    PartitionedSystem sys{{}, set.topology};
    for (std::size_t s = 0; s < 2; ++s) {
        sys.components.push_back({set.names[s], FirstOrderForm(set.substructures[s]), set.physical[s]});
    }
    SolverConfig cfg;
    cfg.duration = 0.1;
    const InputTable in = ramp_inputs(0.1, 1e-3, 4);
    cfg.threads = 1;
    const Trajectory serial = simulate(sys, cfg, in);
    cfg.threads = 4;
    const Trajectory parallel = simulate(sys, cfg, in);
    for (std::size_t s = 0; s < 2; ++s) {
        for (std::size_t k = 0; k < serial.times.size(); ++k) EXPECT_EQ(serial.states[s][k], parallel.states[s][k]);
    }
}

TEST(Simulate, DivergenceReportsStep) {
    const PartitionedSystem sys = coupled_pair();
    SolverConfig cfg;
    cfg.duration = 0.1;
    cfg.divergence_bound = 1e-3;
    try {
        simulate(sys, cfg, constant_inputs(0.1, 1e-3, 1, 100.0));
        FAIL() << "expected DivergenceError";
    } catch (const DivergenceError& e) {
        EXPECT_GT(e.step(), 0);
        EXPECT_GT(e.norm(), 1e-3);
    }
}

TEST(Simulate, InputValidation) {
    const PartitionedSystem sys = coupled_pair();
    SolverConfig cfg;
    cfg.duration = 0.1;
    EXPECT_THROW(simulate(sys, cfg, InputTable()), ModelError);
    EXPECT_THROW(simulate(sys, cfg, constant_inputs(0.05, 1e-3, 1, 0.0)), ModelError);
    PartitionedSystem bad = sys;
    bad.topology = CouplingTopology({}, {2});
    EXPECT_THROW(simulate(bad, cfg, constant_inputs(0.1, 1e-3, 1, 0.0)), ModelError);
    EXPECT_THROW(simulate(sys, cfg, constant_inputs(0.1, 1e-3, 1, 0.0), {Vector::Zero(3)}), ModelError);
}

TEST(Subcycling, SingleInnerStepIsIdentical) {
    PartitionedSystem plain = coupled_pair();
    plain.components[1].physical = false;
    const PartitionedSystem sub = coupled_pair();
    SolverConfig cfg;
    cfg.duration = 0.3;
    const InputTable in = ramp_inputs(0.3, 1e-3, 1);
    const Trajectory a = simulate(plain, cfg, in);
    const Trajectory b = simulate_subcycled(sub, cfg, in);
    for (std::size_t k = 0; k < a.times.size(); ++k) {
        EXPECT_EQ(a.states[0][k], b.states[0][k]);
        EXPECT_EQ(a.states[1][k], b.states[1][k]);
        EXPECT_EQ(a.multipliers[k], b.multipliers[k]);
    }
}

TEST(Subcycling, FineStatesAndVelocityCompatibility) {
    const PartitionedSystem sys = coupled_pair();
    SolverConfig cfg;
    cfg.duration = 0.2;
    cfg.subcycles = 5;
    const Trajectory t = simulate_subcycled(sys, cfg, ramp_inputs(0.2, 2e-4, 1));
    EXPECT_EQ(t.fine_states[1].size(), 200u * 5u + 1u);
    EXPECT_TRUE(t.fine_states[0].empty());
    EXPECT_DOUBLE_EQ(t.fine_period, 2e-4);
    for (std::size_t k = 1; k < t.times.size(); ++k) {
        EXPECT_LE(t.compatibility_residual[k], 1e-10 * std::max(t.free_gap[k], 1e-300));
        EXPECT_EQ(t.fine_states[1][k * 5], t.states[1][k]);
    }
}

TEST(Subcycling, ConvergesToMonolithicAsStepShrinks) {
    const PartitionedSystem sys = coupled_pair();
    std::vector<Substructure> subs{sys.components[0].form.model(), sys.components[1].form.model()};
    const AssembledSystem global = assemble_global(subs, sys.topology);
    SolverConfig cfg;
    cfg.duration = 0.5;
    cfg.subcycles = 4;
    const InputTable in = ramp_inputs(0.5, 1.25e-4, 1);
    std::vector<double> errors;
    for (double dt : {2e-3, 1e-3, 5e-4}) {
        cfg.dt = dt;
        const Trajectory p = simulate_subcycled(sys, cfg, in);
        SolverConfig mono = cfg;
        mono.subcycles = 1;
        const Trajectory m = solve_monolithic(global, mono, in);
        double worst = 0.0;
        for (std::size_t k = 0; k < p.times.size(); ++k) worst = std::max(worst, std::abs(p.states[0][k](1) - m.states[0][k](1)));
        errors.push_back(worst);
    }
    EXPECT_GE(std::log2(errors[0] / errors[1]), 1.0);
    EXPECT_GE(std::log2(errors[1] / errors[2]), 1.0);
}

TEST(Subcycling, NeedsPhysicalComponent) {
    PartitionedSystem sys = coupled_pair();
    sys.components[1].physical = false;
    SolverConfig cfg;
    cfg.duration = 0.01;
    cfg.subcycles = 2;
    EXPECT_THROW(simulate_subcycled(sys, cfg, ramp_inputs(0.01, 1e-3, 1)), ModelError);
}

TEST(Environment, ThreadCount) {
    setenv("DSUB_THREADS", "3", 1);
    EXPECT_EQ(threads_from_environment(), 3);
    setenv("DSUB_THREADS", "bogus", 1);
    EXPECT_EQ(threads_from_environment(), 1);
    unsetenv("DSUB_THREADS");
    EXPECT_EQ(threads_from_environment(), 1);
}
