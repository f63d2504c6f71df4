#include "dsub/io.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

using namespace dsub;

namespace {

std::string temp_file(const std::string& name) {
    return (std::filesystem::temp_directory_path() / ("dsub_io_" + name)).string();
}

}  // namespace

TEST(Csv, RoundTrip) {
    const auto path = temp_file("table.csv");
    const CsvTable t{{"x", "y"}, {{1.5, -2.0}, {1e-17, 3.25}}};
    write_csv(path, t);
    const CsvTable back = read_csv(path);
    EXPECT_EQ(back.header, t.header);
    EXPECT_EQ(back.rows, t.rows);
    std::filesystem::remove(path);
}

TEST(Csv, Errors) {
    EXPECT_THROW(read_csv(temp_file("missing.csv")), ModelError);
    const auto path = temp_file("bad.csv");
    std::ofstream(path) << "a,b\n1,2\n3\n";
    EXPECT_THROW(read_csv(path), ModelError);
    std::ofstream(path) << "a\nfoo\n";
    EXPECT_THROW(read_csv(path), ModelError);
    std::filesystem::remove(path);
}

TEST(Json, MatrixRoundTrip) {
    Matrix m(2, 3);
    m << 1, 2, 3, 4, 5, 6;
    const json j = matrix_to_json(m);
    EXPECT_EQ(j.at("data")[1].get<double>(), 2.0);
    EXPECT_EQ(matrix_from_json(j), m);
    json bad = j;
    bad["rows"] = 3;
    EXPECT_THROW(matrix_from_json(bad), ModelError);
}

TEST(Json, SolverConfigRoundTrip) {
    SolverConfig c;
    c.dt = 2e-4;
    c.subcycles = 5;
    c.threads = 2;
    const SolverConfig back = solver_config_from_json(solver_config_to_json(c));
    EXPECT_EQ(back.dt, c.dt);
    EXPECT_EQ(back.subcycles, 5);
    EXPECT_EQ(back.threads, 2);
    EXPECT_EQ(solver_config_from_json(json::object()).gamma, SolverConfig{}.gamma);
}

TEST(Json, SuspensionRoundTrip) {
    SuspensionElement e;
    e.k1 = 40.0;
    e.base_excitation_channel = 3;
    const SuspensionElement back = suspension_from_json(suspension_to_json(e));
    EXPECT_EQ(back.k1, 40.0);
    EXPECT_EQ(back.c3, e.c3);
    ASSERT_TRUE(back.base_excitation_channel.has_value());
    EXPECT_EQ(*back.base_excitation_channel, 3);
}

TEST(Json, CompactFrameModelExpands) {
    const ModelSet set = model_from_json(frame_model_json(FrameAnalogSpec{6, 4}));
    ASSERT_EQ(set.substructures.size(), 2u);
    EXPECT_EQ(set.topology.constraint_count(), 4);
    EXPECT_EQ(set.topology.dof_counts()[0], 28);
    EXPECT_TRUE(set.physical[1]);
    EXPECT_FALSE(set.physical[0]);
}

TEST(Json, ModelRoundTripPreservesMatrices) {
    const ModelSet set = model_from_json(frame_model_json(FrameAnalogSpec{6, 3}, false));
    const auto path = temp_file("model.json");
    write_model(path, set);
    const ModelSet back = read_model(path);
    std::filesystem::remove(path);
    ASSERT_EQ(back.substructures.size(), 2u);
    const auto& a = std::get<LinearSubstructure>(set.substructures[0]);
    const auto& b = std::get<LinearSubstructure>(back.substructures[0]);
    EXPECT_EQ(a.stiffness(), b.stiffness());
    EXPECT_EQ(a.mass(), b.mass());
    EXPECT_EQ(a.partition().boundary, b.partition().boundary);
    EXPECT_FALSE(std::get<NonlinearSubstructure>(back.substructures[1]).relative_motion());
    EXPECT_EQ(back.names, set.names);
    ASSERT_EQ(back.topology.constraint_count(), 4);
    EXPECT_EQ(back.topology.constraints()[2].second.dof, set.topology.constraints()[2].second.dof);
}

TEST(Json, MalformedModel) {
    EXPECT_THROW(model_from_json(json::object()), ModelError);
    EXPECT_THROW(model_from_json(json::parse(R"({"substructures": [{"kind": "bogus"}]})")), ModelError);
    EXPECT_THROW(model_from_json(json::parse(R"({"substructures": [{"generator": {"type": "torus"}}]})")),
                 ModelError);
}

TEST(Inputs, RoundTripAndValidation) {
    const auto path = temp_file("inputs.csv");
    Matrix s(3, 2);
    s << 1, 2, 3, 4, 5, 6;
    write_inputs(path, InputTable(1e-3, s));
    const InputTable back = read_inputs(path);
    EXPECT_EQ(back.samples(), s);
    EXPECT_NEAR(back.sample_period(), 1e-3, 1e-15);
    std::ofstream(path) << "time,a\n0,1\n0.001,2\n0.003,3\n";
    EXPECT_THROW(read_inputs(path), ModelError);
    std::ofstream(path) << "t,a\n0,1\n0.001,2\n";
    EXPECT_THROW(read_inputs(path), ModelError);
    std::ofstream(path) << "time,a\n0.5,1\n0.501,2\n";
    EXPECT_THROW(read_inputs(path), ModelError);
    std::filesystem::remove(path);
}

TEST(TrajectoryTable, Columns) {
    Trajectory t;
    t.times = {0.0, 0.1};
    Vector y0(4), y1(4);
    y0 << 1, 2, 3, 4;
    y1 << 5, 6, 7, 8;
    t.states = {{y0, y1}};
    t.multipliers = {Vector::Constant(1, 0.5), Vector::Constant(1, 0.25)};
    const CsvTable table = trajectory_table(t, {"frame"}, {{0, 1, 7}});
    const std::vector<std::string> header{"time", "frame_u7", "frame_v7", "lambda0"};
    EXPECT_EQ(table.header, header);
    EXPECT_EQ(table.rows[1], (std::vector<double>{0.1, 6, 8, 0.25}));
}

TEST(Probes, BoundaryOfEverySubstructure) {
    const ModelSet set = model_from_json(frame_model_json(FrameAnalogSpec{6, 3}));
    const auto probes = boundary_probes(set);
    ASSERT_EQ(probes.size(), 8u);
    EXPECT_EQ(probes[0].dof, 18);
    EXPECT_EQ(probes[4].substructure, 1);
    EXPECT_EQ(probes[4].dof, 4);
}
