#include "dsub/experiment.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <sstream>

using namespace dsub;

namespace {

CsvTable frequency_csv(const FrequencyErrorTable& t) {
    CsvTable csv;
    csv.header = {"mode", "full_hz", "reduced_hz", "relative_error"};
    for (Index i = 0; i < t.full.size(); ++i) {
        const double to_hz = 0.5 / std::numbers::pi;
        csv.rows.push_back({static_cast<double>(i + 1), t.full(i) * to_hz, t.reduced(i) * to_hz, t.relative_error(i)});
    }
    return csv;
}

CsvTable mac_csv(const Matrix& m) {
    CsvTable csv;
    csv.header.push_back("mode");
    for (Index j = 0; j < m.cols(); ++j) csv.header.push_back("full" + std::to_string(j + 1));
    for (Index i = 0; i < m.rows(); ++i) {
        std::vector<double> row{static_cast<double>(i + 1)};
        for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        csv.rows.push_back(std::move(row));
    }
    return csv;
}

const LinearSubstructure& first_linear(const ModelSet& set) {
    const auto* lin = std::get_if<LinearSubstructure>(&set.substructures.at(0));
    if (lin == nullptr) throw ModelError("the first substructure of the model must be linear");
    return *lin;
}

void emit(const std::string& path, const CsvTable& table) {
    if (path.empty() || path == "-") {
        write_csv(std::cout, table);
    } else {
        write_csv(path, table);
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Craig-Bampton reduction and partitioned simulation of coupled substructures"};
    app.require_subcommand(1);

    // generate-model
    auto* gen_model = app.add_subcommand("generate-model", "Write a chain or frame-analog model file");
    std::string model_kind = "frame_analog";
    std::string model_out;
    FrameAnalogSpec frame_spec;
    ChainSpec chain_spec;
    bool absolute_motion = false;
    gen_model->add_option("--kind", model_kind, "chain or frame_analog")
        ->check(CLI::IsMember({"chain", "frame_analog"}));
    gen_model->add_option("--out", model_out, "Output JSON file")->required();
    gen_model->add_option("--nx", frame_spec.nx, "Frame lattice nodes along x");
    gen_model->add_option("--ny", frame_spec.ny, "Frame lattice nodes along y");
    gen_model->add_option("--alpha", frame_spec.rayleigh_alpha, "Rayleigh mass coefficient");
    gen_model->add_option("--beta", frame_spec.rayleigh_beta, "Rayleigh stiffness coefficient");
    gen_model->add_flag("--absolute-motion", absolute_motion, "Suspensions act on absolute wheel motion");
    gen_model->add_option("--n", chain_spec.n, "Chain length");
    gen_model->add_option("--m", chain_spec.mass, "Chain mass");
    gen_model->add_option("--k", chain_spec.stiffness, "Chain stiffness");
    gen_model->add_option("--c", chain_spec.damping, "Chain damping");
    gen_model->add_option("--boundary", chain_spec.boundary, "Chain boundary DOFs");

    // generate-signal
    auto* gen_signal = app.add_subcommand("generate-signal", "Write an input CSV");
    std::string signal_kind = "bandlimited_white_noise";
    std::string signal_out;
    SignalSpec signal;
    double signal_duration = 1.0;
    Index signal_channels = 4;
    gen_signal->add_option("--kind", signal_kind, "multisine or bandlimited_white_noise")
        ->check(CLI::IsMember({"multisine", "bandlimited_white_noise"}));
    gen_signal->add_option("--out", signal_out, "Output CSV file")->required();
    gen_signal->add_option("--rate", signal.sample_rate, "Sample rate (Hz)");
    gen_signal->add_option("--duration", signal_duration, "Length (s)");
    gen_signal->add_option("--channels", signal_channels, "Number of channels");
    gen_signal->add_option("--band-low", signal.band_low, "Lower band edge (Hz)");
    gen_signal->add_option("--band-high", signal.band_high, "Upper band edge (Hz)");
    gen_signal->add_option("--variance", signal.variance, "Noise variance");
    gen_signal->add_option("--seed", signal.seed, "Random seed");

    // reduce
    auto* reduce_cmd = app.add_subcommand("reduce", "Craig-Bampton reduction of the first substructure");
    std::string reduce_model;
    std::string reduce_out;
    std::string reduce_report;
    Index reduce_modes = 30;
    Index report_modes = 20;
    reduce_cmd->add_option("--model", reduce_model, "Model JSON file")->required();
    reduce_cmd->add_option("--modes", reduce_modes, "Fixed-interface modes to keep");
    reduce_cmd->add_option("--out", reduce_out, "Reduction artifact (JSON)");
    reduce_cmd->add_option("--report", reduce_report, "Frequency comparison CSV ('-' for stdout)");
    reduce_cmd->add_option("--report-modes", report_modes, "Modes in the frequency report");

    // simulate
    auto* sim = app.add_subcommand("simulate", "Partitioned or monolithic time integration");
    std::string sim_model;
    std::string sim_config;
    std::string sim_inputs;
    std::string sim_out;
    Index sim_subcycles = 0;
    Index sim_modes = -1;
    bool sim_monolithic = false;
    sim->add_option("--model", sim_model, "Model JSON file")->required();
    sim->add_option("--config", sim_config, "Solver configuration JSON");
    sim->add_option("--inputs", sim_inputs, "Input CSV (time column plus channels)");
    sim->add_option("--out", sim_out, "Trajectory CSV ('-' for stdout)");
    sim->add_option("--subcycles", sim_subcycles, "Inner steps of physical substructures");
    sim->add_option("--modes", sim_modes, "Reduce the first substructure to this many modes");
    sim->add_flag("--monolithic", sim_monolithic, "Solve the primal-assembled system instead");

    // compare
    auto* cmp = app.add_subcommand("compare", "Error summary between two trajectory CSVs");
    std::string cmp_a;
    std::string cmp_b;
    std::string cmp_out;
    cmp->add_option("--a", cmp_a, "Trajectory under test")->required();
    cmp->add_option("--b", cmp_b, "Reference trajectory")->required();
    cmp->add_option("--out", cmp_out, "Summary CSV ('-' for stdout)");

    // mac
    auto* mac_cmd = app.add_subcommand("mac", "MAC and frequency table, full against reduced");
    std::string mac_full;
    std::string mac_reduced;
    std::string mac_out;
    std::string mac_freq_out;
    Index mac_count = 10;
    mac_cmd->add_option("--full", mac_full, "Model JSON file")->required();
    mac_cmd->add_option("--reduced", mac_reduced, "Reduction artifact written by 'reduce'")->required();
    mac_cmd->add_option("--count", mac_count, "Number of modes");
    mac_cmd->add_option("--out", mac_out, "MAC CSV ('-' for stdout)");
    mac_cmd->add_option("--frequencies", mac_freq_out, "Frequency table CSV");

    // run-experiment
    auto* exp = app.add_subcommand("run-experiment", "Reduction, partitioned and monolithic runs with timing");
    std::string exp_config;
    std::string exp_out;
    exp->add_option("--config", exp_config, "Experiment JSON")->required();
    exp->add_option("--out", exp_out, "Report JSON (default stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*gen_model) {
            if (model_kind == "chain") {
                write_json(model_out, chain_model_json(chain_spec));
            } else {
                write_json(model_out, frame_model_json(frame_spec, !absolute_motion));
            }
            read_model(model_out);
        } else if (*gen_signal) {
            signal.kind = signal_kind_from_string(signal_kind);
            if (signal.kind == SignalSpec::Kind::multisine) {
                SignalSpec ms = default_multisine();
                ms.sample_rate = signal.sample_rate;
                ms.seed = signal.seed;
                if (gen_signal->count("--variance")) ms.variance = signal.variance;
                if (gen_signal->count("--band-high")) {
                    ms.band_low = signal.band_low;
                    ms.band_high = signal.band_high;
                }
                signal = ms;
            }
            const auto n = static_cast<Index>(std::llround(signal_duration * signal.sample_rate)) + 1;
            write_inputs(signal_out, InputTable(1.0 / signal.sample_rate, generate_channels(signal, n, signal_channels)));
        } else if (*reduce_cmd) {
            const ModelSet set = read_model(reduce_model);
            const LinearSubstructure& frame = first_linear(set);
            const CraigBamptonReduction red(frame, reduce_modes);
            if (!reduce_out.empty()) write_json(reduce_out, reduction_to_json(red));
            if (!reduce_report.empty()) {
                const Index count = std::min(report_modes, red.reduced_size());
                const ModalBasis full = generalized_modes(frame.mass(), frame.stiffness(), count);
                const ModalBasis reduced = generalized_modes(red.reduced_mass(), red.reduced_stiffness(), count);
                const auto table = frequency_error_table(full.frequencies, reduced.frequencies, count);
                emit(reduce_report, frequency_csv(table));
                std::fprintf(stderr, "max relative error %.3e, NMSE %.3e\n", table.max_abs_relative_error(),
                             table.nmse);
            }
            if (red.first_discarded_frequency()) {
                std::fprintf(stderr, "first discarded fixed-interface mode: %.3f Hz\n",
                             *red.first_discarded_frequency() / (2.0 * std::numbers::pi));
            }
        } else if (*sim) {
            SolverConfig cfg = sim_config.empty() ? SolverConfig{} : solver_config_from_json(read_json(sim_config));
            if (sim_subcycles > 0) cfg.subcycles = sim_subcycles;
            const InputTable inputs = sim_inputs.empty() ? InputTable() : read_inputs(sim_inputs);
            const ModelSet full = read_model(sim_model);
            std::vector<Probe> probes = boundary_probes(full);
            Trajectory traj;
            std::vector<std::string> names = full.names;
            if (sim_monolithic) {
                traj = monolithic_set(full, cfg, inputs);
            } else if (sim_modes >= 0) {
                const ReducedModelSet reduced = reduce_frame(full, sim_modes);
                for (auto& p : probes) {
                    if (p.substructure == 0) {
                        p.label = p.dof;
                        p.dof = reduced.reduction.reduced_dof(p.dof);
                    }
                }
                traj = simulate_set(reduced.set, cfg, inputs);
            } else {
                traj = simulate_set(full, cfg, inputs);
            }
            emit(sim_out, trajectory_table(traj, names, probes));
            std::fprintf(stderr, "setup %.4f s, stepping %.4f s\n", traj.timing.setup_seconds,
                         traj.timing.stepping_seconds);
        } else if (*cmp) {
            const CsvTable a = read_csv(cmp_a);
            const CsvTable b = read_csv(cmp_b);
            if (a.header != b.header) throw ModelError("trajectory files have different columns");
            std::ostringstream out;
            out << "column,mse,relative_mse\n" << std::setprecision(17);
            for (std::size_t c = 1; c < a.header.size(); ++c) {
                std::vector<double> x;
                std::vector<double> y;
                for (const auto& r : a.rows) x.push_back(r[c]);
                for (const auto& r : b.rows) y.push_back(r[c]);
                const MseResult e = trajectory_mse(x, y);
                out << a.header[c] << ',' << e.mse << ',' << e.relative << '\n';
            }
            if (cmp_out.empty() || cmp_out == "-") {
                std::cout << out.str();
            } else {
                std::ofstream file(cmp_out);
                if (!file) throw ModelError("cannot write " + cmp_out);
                file << out.str();
            }
        } else if (*mac_cmd) {
            const ModelSet set = read_model(mac_full);
            const LinearSubstructure& frame = first_linear(set);
            const json artifact = read_json(mac_reduced);
            const Matrix transform = matrix_from_json(artifact.at("transform"));
            const Matrix reduced_mass = matrix_from_json(artifact.at("reduced_mass"));
            const Matrix reduced_stiffness = matrix_from_json(artifact.at("reduced_stiffness"));
            std::vector<Index> order = artifact.at("internal").get<std::vector<Index>>();
            for (Index b : artifact.at("boundary").get<std::vector<Index>>()) order.push_back(b);
            if (transform.rows() != frame.dof_count() || static_cast<Index>(order.size()) != frame.dof_count()) {
                throw ModelError("reduction artifact does not match the model");
            }
            const Index count = std::min(mac_count, transform.cols());
            const ModalBasis full = generalized_modes(frame.mass(), frame.stiffness(), count);
            const ModalBasis reduced = generalized_modes(reduced_mass, reduced_stiffness, count);
            const Matrix partitioned = transform * reduced.shapes;
            Matrix expanded(frame.dof_count(), count);
            for (Index i = 0; i < frame.dof_count(); ++i) {
                expanded.row(order[static_cast<std::size_t>(i)]) = partitioned.row(i);
            }
            emit(mac_out, mac_csv(mac(expanded, full.shapes)));
            if (!mac_freq_out.empty()) {
                emit(mac_freq_out,
                     frequency_csv(frequency_error_table(full.frequencies, reduced.frequencies, count)));
            }
        } else if (*exp) {
            const ExperimentReport report = run_experiment(experiment_config_from_json(read_json(exp_config)));
            if (exp_out.empty()) {
                std::cout << report.to_json().dump(2) << '\n';
            } else {
                write_json(exp_out, report.to_json());
            }
        }
    } catch (const DivergenceError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        std::fprintf(stderr, "diverged at step %lld\n", static_cast<long long>(e.step()));
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
