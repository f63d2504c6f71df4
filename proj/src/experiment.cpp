#include "dsub/experiment.hpp"

#include <chrono>
#include <filesystem>

namespace dsub {

namespace {

using Clock = std::chrono::steady_clock;

Index referenced_channels(const ModelSet& set) {
    Index out = 0;
    for (const auto& s : set.substructures) {
        out = std::max(out, std::visit([](const auto& m) { return Index{m.loads().cols()}; }, s));
    }
    return out;
}

SignalSpec signal_from_json(const json& j) {
    SignalSpec s = j.value("kind", std::string("bandlimited_white_noise")) == "multisine" ? default_multisine()
                                                                                           : SignalSpec{};
    if (j.contains("kind")) s.kind = signal_kind_from_string(j.at("kind").get<std::string>());
    s.sample_rate = j.value("sample_rate", s.sample_rate);
    if (j.contains("frequencies")) s.frequencies = j.at("frequencies").get<std::vector<double>>();
    if (j.contains("amplitudes")) s.amplitudes = j.at("amplitudes").get<std::vector<double>>();
    if (j.contains("phases")) s.phases = j.at("phases").get<std::vector<double>>();
    s.band_low = j.value("band_low", s.band_low);
    s.band_high = j.value("band_high", s.band_high);
    s.variance = j.value("variance", s.variance);
    s.seed = j.value("seed", s.seed);
    s.path = j.value("path", s.path);
    s.column = j.value("column", s.column);
    s.validate();
    return s;
}

}  // namespace

PartitionedSystem build_partitioned(const ModelSet& set) {
    PartitionedSystem sys{{}, set.topology};
    for (std::size_t s = 0; s < set.substructures.size(); ++s) {
        sys.components.push_back(
            {set.names.at(s), FirstOrderForm(set.substructures[s]), static_cast<bool>(set.physical.at(s))});
    }
    return sys;
}

Trajectory simulate_set(const ModelSet& set, const SolverConfig& config, const InputTable& inputs) {
    return simulate(build_partitioned(set), config, inputs);
}

Trajectory monolithic_set(const ModelSet& set, const SolverConfig& config, const InputTable& inputs) {
    return solve_monolithic(assemble_global(set.substructures, set.topology), config, inputs);
}

ExperimentConfig experiment_config_from_json(const json& j) {
    ExperimentConfig c;
    try {
        c.model = j.at("model");
        if (c.model.is_string()) c.model = read_json(c.model.get<std::string>());
        if (j.contains("modes") && !j.at("modes").is_null()) c.modes = j.at("modes").get<Index>();
        if (j.contains("solver")) c.solver = solver_config_from_json(j.at("solver"));
        c.signal.sample_rate = 1.0 / c.solver.dt;
        if (j.contains("signal")) {
            json s = j.at("signal");
            if (!s.contains("sample_rate")) s["sample_rate"] = 1.0 / c.solver.dt;
            c.signal = signal_from_json(s);
        }
        if (j.contains("channels")) c.channels = j.at("channels").get<Index>();
        c.run_partitioned = j.value("partitioned", true);
        c.run_monolithic = j.value("monolithic", true);
        c.output_dir = j.value("output_dir", std::string());
    } catch (const json::exception& e) {
        throw ModelError(std::string("malformed experiment configuration: ") + e.what());
    }
    return c;
}

json ExperimentReport::to_json() const {
    json j;
    j["full_dofs"] = full_dofs;
    j["reduced_dofs"] = reduced_dofs;
    j["reduction_time"] = reduction_seconds;
    j["offline_time"] = offline_seconds;
    j["online_time"] = online_seconds;
    j["monolithic_setup_time"] = monolithic_setup_seconds;
    j["monolithic_online_time"] = monolithic_online_seconds;
    j["speedup"] = speedup;
    j["max_relative_mse"] = max_relative_mse;
    json errs = json::array();
    for (const auto& e : errors) {
        errs.push_back({{"channel", e.label}, {"mse", e.error.mse}, {"relative_mse", e.error.relative}});
    }
    j["errors"] = errs;
    if (frequencies) {
        j["frequency_nmse"] = frequencies->nmse;
        j["frequency_max_relative_error"] = frequencies->max_abs_relative_error();
    }
    return j;
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
    config.solver.validate();
    const ModelSet full = model_from_json(config.model);
    ExperimentReport report;
    for (const auto& s : full.substructures) {
        report.full_dofs += std::visit([](const auto& m) { return m.dof_count(); }, s);
    }

    const Index channels = config.channels.value_or(referenced_channels(full));
    const double rate = config.signal.sample_rate;
    const auto samples = static_cast<Index>(std::ceil(config.solver.duration * rate - 1e-9)) + 1;
    const InputTable inputs(1.0 / rate, generate_channels(config.signal, samples, channels));

    ModelSet partitioned = full;
    std::vector<Probe> full_probes = boundary_probes(full);
    std::vector<Probe> part_probes = full_probes;
    const auto reduction_start = Clock::now();
    if (config.modes) {
        const ReducedModelSet reduced = reduce_frame(full, *config.modes);
        partitioned = reduced.set;
        for (auto& p : part_probes) {
            if (p.substructure == 0) {
                p.label = p.dof;
                p.dof = reduced.reduction.reduced_dof(p.dof);
            }
        }
        const auto& frame = std::get<LinearSubstructure>(full.substructures[0]);
        const ModalBasis fm = generalized_modes(frame.mass(), frame.stiffness(), std::min<Index>(20, reduced.reduction.reduced_size()));
        const ModalBasis rm = generalized_modes(reduced.reduction.reduced_mass(), reduced.reduction.reduced_stiffness(),
                                                fm.frequencies.size());
        report.frequencies = frequency_error_table(fm.frequencies, rm.frequencies, fm.frequencies.size());
    }
    report.reduction_seconds = std::chrono::duration<double>(Clock::now() - reduction_start).count();
    for (const auto& s : partitioned.substructures) {
        report.reduced_dofs += std::visit([](const auto& m) { return m.dof_count(); }, s);
    }

    const bool write = !config.output_dir.empty();
    if (write) {
        std::filesystem::create_directories(config.output_dir);
        write_inputs(config.output_dir + "/inputs.csv", inputs);
    }

    std::optional<Trajectory> part;
    std::optional<Trajectory> mono;
    if (config.run_partitioned) {
        part = simulate_set(partitioned, config.solver, inputs);
        report.offline_seconds = report.reduction_seconds + part->timing.setup_seconds;
        report.online_seconds = part->timing.stepping_seconds;
        if (write) {
            write_csv(config.output_dir + "/partitioned.csv", trajectory_table(*part, partitioned.names, part_probes));
        }
    }
    if (config.run_monolithic) {
        SolverConfig mono_cfg = config.solver;
        mono_cfg.subcycles = 1;
        mono = monolithic_set(full, mono_cfg, inputs);
        report.monolithic_setup_seconds = mono->timing.setup_seconds;
        report.monolithic_online_seconds = mono->timing.stepping_seconds;
        if (write) write_csv(config.output_dir + "/monolithic.csv", trajectory_table(*mono, full.names, full_probes));
    }
    if (part && mono) {
        for (std::size_t p = 0; p < full_probes.size(); ++p) {
            const auto a = part->channel(part_probes[p].substructure, part_probes[p].dof);
            const auto b = mono->channel(full_probes[p].substructure, full_probes[p].dof);
            ProbeError e{full.names[static_cast<std::size_t>(full_probes[p].substructure)] + "_u" +
                             std::to_string(full_probes[p].dof),
                         trajectory_mse(a, b)};
            report.max_relative_mse = std::max(report.max_relative_mse, e.error.relative);
            report.errors.push_back(std::move(e));
        }
        if (report.online_seconds > 0.0) report.speedup = report.monolithic_online_seconds / report.online_seconds;
    }
    if (write) write_json(config.output_dir + "/report.json", report.to_json());
    return report;
}

}  // namespace dsub
