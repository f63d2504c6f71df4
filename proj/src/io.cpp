#include "dsub/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace dsub {

namespace {

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
        out.push_back(cell);
    }
    return out;
}

std::vector<Index> index_list(const json& j, const char* key) {
    std::vector<Index> out;
    if (j.contains(key)) {
        for (const auto& v : j.at(key)) out.push_back(v.get<Index>());
    }
    return out;
}

DofPartition partition_from_boundary(Index n, const std::vector<Index>& boundary) {
    DofPartition p;
    p.boundary = boundary;
    for (Index d = 0; d < n; ++d) {
        if (std::find(boundary.begin(), boundary.end(), d) == boundary.end()) p.internal.push_back(d);
    }
    return p;
}

LinearSubstructure linear_from_json(const json& j) {
    LinearSubstructure sub = [&] {
        if (j.contains("generator")) {
            const json& g = j.at("generator");
            const std::string type = g.value("type", "");
            if (type == "chain") return make_chain(chain_spec_from_json(g));
            if (type == "frame_analog") return make_frame_analog(frame_spec_from_json(g));
            throw ModelError("unknown generator type '" + type + "'");
        }
        const Matrix m = matrix_from_json(j.at("mass"));
        const Matrix k = matrix_from_json(j.at("stiffness"));
        const Matrix c = j.contains("damping") ? matrix_from_json(j.at("damping")) : Matrix();
        const Matrix b = j.contains("loads") ? matrix_from_json(j.at("loads")) : Matrix();
        DofPartition p;
        if (j.contains("internal")) {
            p.internal = index_list(j, "internal");
            p.boundary = index_list(j, "boundary");
        } else {
            p = partition_from_boundary(m.rows(), index_list(j, "boundary"));
        }
        return LinearSubstructure(m, c, k, std::move(p), b);
    }();
    if (j.contains("rayleigh")) {
        sub = sub.with_rayleigh_damping(j.at("rayleigh").value("alpha", 0.0), j.at("rayleigh").value("beta", 0.0));
    }
    if (j.contains("generator") && j.contains("loads")) sub = sub.with_loads(matrix_from_json(j.at("loads")));
    return sub;
}

json linear_to_json(const LinearSubstructure& sub) {
    json j;
    j["kind"] = "linear";
    j["mass"] = matrix_to_json(sub.mass());
    j["damping"] = matrix_to_json(sub.damping());
    j["stiffness"] = matrix_to_json(sub.stiffness());
    if (sub.loads().size() > 0) j["loads"] = matrix_to_json(sub.loads());
    j["internal"] = sub.partition().internal;
    j["boundary"] = sub.partition().boundary;
    return j;
}

}  // namespace

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ModelError("cannot open " + path);
    CsvTable t;
    std::string line;
    if (!std::getline(in, line)) throw ModelError(path + " is empty");
    t.header = split(line);
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        const auto cells = split(line);
        if (cells.size() != t.header.size()) {
            throw ModelError(path + ":" + std::to_string(lineno) + ": expected " + std::to_string(t.header.size()) +
                             " values, found " + std::to_string(cells.size()));
        }
        std::vector<double> row;
        row.reserve(cells.size());
        for (const auto& c : cells) {
            try {
                row.push_back(std::stod(c));
            } catch (const std::exception&) {
                throw ModelError(path + ":" + std::to_string(lineno) + ": '" + c + "' is not a number");
            }
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

void write_csv(std::ostream& out, const CsvTable& table) {
    for (std::size_t i = 0; i < table.header.size(); ++i) out << (i ? "," : "") << table.header[i];
    out << '\n';
    out << std::setprecision(std::numeric_limits<double>::max_digits10);
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
        out << '\n';
    }
}

void write_csv(const std::string& path, const CsvTable& table) {
    std::ofstream out(path);
    if (!out) throw ModelError("cannot write " + path);
    write_csv(out, table);
}

json matrix_to_json(const Matrix& m) {
    std::vector<double> data;
    data.reserve(static_cast<std::size_t>(m.size()));
    for (Index i = 0; i < m.rows(); ++i) {
        for (Index j = 0; j < m.cols(); ++j) data.push_back(m(i, j));
    }
    return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", data}};
}

Matrix matrix_from_json(const json& j) {
    const auto rows = j.at("rows").get<Index>();
    const auto cols = j.at("cols").get<Index>();
    const auto& data = j.at("data");
    if (rows < 0 || cols < 0 || static_cast<Index>(data.size()) != rows * cols) {
        throw ModelError("matrix record declares " + std::to_string(rows) + "x" + std::to_string(cols) +
                         " but holds " + std::to_string(data.size()) + " values");
    }
    Matrix m(rows, cols);
    for (Index i = 0; i < rows; ++i) {
        for (Index c = 0; c < cols; ++c) m(i, c) = data[static_cast<std::size_t>(i * cols + c)].get<double>();
    }
    return m;
}

json chain_spec_to_json(const ChainSpec& s) {
    return {{"type", "chain"}, {"n", s.n},          {"m", s.mass},           {"k", s.stiffness},
            {"c", s.damping},  {"grounded", s.grounded}, {"boundary", s.boundary}};
}

ChainSpec chain_spec_from_json(const json& j) {
    ChainSpec s;
    s.n = j.value("n", s.n);
    s.mass = j.value("m", s.mass);
    s.stiffness = j.value("k", s.stiffness);
    s.damping = j.value("c", s.damping);
    s.grounded = j.value("grounded", s.grounded);
    s.boundary = index_list(j, "boundary");
    return s;
}

json frame_spec_to_json(const FrameAnalogSpec& s) {
    return {{"type", "frame_analog"},
            {"nx", s.nx},
            {"ny", s.ny},
            {"node_mass", s.node_mass},
            {"mount_mass", s.mount_mass},
            {"membrane_stiffness", s.membrane_stiffness},
            {"bending_stiffness", s.bending_stiffness},
            {"corner_stiffness", s.corner_stiffness},
            {"bracket_stiffness", s.bracket_stiffness},
            {"rayleigh_alpha", s.rayleigh_alpha},
            {"rayleigh_beta", s.rayleigh_beta}};
}

FrameAnalogSpec frame_spec_from_json(const json& j) {
    FrameAnalogSpec s;
    s.nx = j.value("nx", s.nx);
    s.ny = j.value("ny", s.ny);
    s.node_mass = j.value("node_mass", s.node_mass);
    s.mount_mass = j.value("mount_mass", s.mount_mass);
    s.membrane_stiffness = j.value("membrane_stiffness", s.membrane_stiffness);
    s.bending_stiffness = j.value("bending_stiffness", s.bending_stiffness);
    s.corner_stiffness = j.value("corner_stiffness", s.corner_stiffness);
    s.bracket_stiffness = j.value("bracket_stiffness", s.bracket_stiffness);
    s.rayleigh_alpha = j.value("rayleigh_alpha", s.rayleigh_alpha);
    s.rayleigh_beta = j.value("rayleigh_beta", s.rayleigh_beta);
    return s;
}

json suspension_to_json(const SuspensionElement& e) {
    json j = {{"mass", e.mass}, {"k1", e.k1}, {"c1", e.c1},
              {"c2", e.c2},     {"c3", e.c3}, {"attachment_mass", e.attachment_mass}};
    if (e.base_excitation_channel) j["channel"] = *e.base_excitation_channel;
    return j;
}

SuspensionElement suspension_from_json(const json& j) {
    SuspensionElement e;
    e.mass = j.value("mass", e.mass);
    e.k1 = j.value("k1", e.k1);
    e.c1 = j.value("c1", e.c1);
    e.c2 = j.value("c2", e.c2);
    e.c3 = j.value("c3", e.c3);
    e.attachment_mass = j.value("attachment_mass", e.attachment_mass);
    if (j.contains("channel")) e.base_excitation_channel = j.at("channel").get<Index>();
    return e;
}

json frame_model_json(const FrameAnalogSpec& spec, bool relative_motion) {
    json elements = json::array();
    for (const auto& e : default_suspensions(4)) elements.push_back(suspension_to_json(e));
    return {{"substructures",
             {{{"name", "frame"}, {"kind", "linear"}, {"generator", frame_spec_to_json(spec)}},
              {{"name", "suspension"},
               {"kind", "suspension"},
               {"physical", true},
               {"relative_motion", relative_motion},
               {"elements", elements}}}}};
}

json chain_model_json(const ChainSpec& spec) {
    return {{"substructures", {{{"name", "chain"}, {"kind", "linear"}, {"generator", chain_spec_to_json(spec)}}}},
            {"interfaces", json::array()}};
}

ModelSet model_from_json(const json& j) {
    try {
        ModelSet set;
        for (const auto& entry : j.at("substructures")) {
            const std::string kind = entry.value("kind", "linear");
            set.names.push_back(entry.value("name", "s" + std::to_string(set.names.size())));
            if (kind == "linear") {
                set.substructures.emplace_back(linear_from_json(entry));
                set.physical.push_back(entry.value("physical", false));
            } else if (kind == "suspension") {
                std::vector<SuspensionElement> elements;
                for (const auto& e : entry.at("elements")) elements.push_back(suspension_from_json(e));
                set.substructures.emplace_back(
                    NonlinearSubstructure(std::move(elements), entry.value("relative_motion", true)));
                set.physical.push_back(entry.value("physical", true));
            } else {
                throw ModelError("unknown substructure kind '" + kind + "'");
            }
        }
        if (!j.contains("interfaces") && set.substructures.size() == 2 &&
            std::holds_alternative<LinearSubstructure>(set.substructures[0])) {
            ModelSet joined = frame_with_suspensions(std::get<LinearSubstructure>(set.substructures[0]),
                                                     set.substructures[1]);
            joined.names = set.names;
            joined.physical = set.physical;
            return joined;
        }
        std::vector<InterfaceConstraint> constraints;
        if (j.contains("interfaces")) {
            for (const auto& c : j.at("interfaces")) {
                auto end = [](const json& e) {
                    return InterfaceEnd{e.at("substructure").get<Index>(), e.at("dof").get<Index>(),
                                        e.value("sign", 1)};
                };
                constraints.push_back({end(c.at("first")), end(c.at("second"))});
            }
        }
        std::vector<Index> counts;
        for (const auto& s : set.substructures) {
            counts.push_back(std::visit([](const auto& m) { return m.dof_count(); }, s));
        }
        set.topology = CouplingTopology(std::move(constraints), std::move(counts));
        return set;
    } catch (const json::exception& e) {
        throw ModelError(std::string("malformed model description: ") + e.what());
    }
}

json model_to_json(const ModelSet& set) {
    json subs = json::array();
    for (std::size_t s = 0; s < set.substructures.size(); ++s) {
        json entry;
        if (const auto* lin = std::get_if<LinearSubstructure>(&set.substructures[s])) {
            entry = linear_to_json(*lin);
        } else {
            const auto& nl = std::get<NonlinearSubstructure>(set.substructures[s]);
            entry["kind"] = "suspension";
            entry["relative_motion"] = nl.relative_motion();
            entry["elements"] = json::array();
            for (const auto& e : nl.elements()) entry["elements"].push_back(suspension_to_json(e));
        }
        entry["name"] = set.names[s];
        entry["physical"] = static_cast<bool>(set.physical[s]);
        subs.push_back(std::move(entry));
    }
    json interfaces = json::array();
    for (const auto& c : set.topology.constraints()) {
        auto end = [](const InterfaceEnd& e) {
            return json{{"substructure", e.substructure}, {"dof", e.dof}, {"sign", e.sign}};
        };
        interfaces.push_back({{"first", end(c.first)}, {"second", end(c.second)}});
    }
    return {{"substructures", subs}, {"interfaces", interfaces}};
}

json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ModelError("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ModelError(path + ": " + e.what());
    }
}

void write_json(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw ModelError("cannot write " + path);
    out << j.dump(2) << '\n';
}

ModelSet read_model(const std::string& path) { return model_from_json(read_json(path)); }

void write_model(const std::string& path, const ModelSet& set) { write_json(path, model_to_json(set)); }

SolverConfig solver_config_from_json(const json& j) {
    SolverConfig c;
    c.dt = j.value("dt", c.dt);
    c.gamma = j.value("gamma", c.gamma);
    c.subcycles = j.value("subcycles", c.subcycles);
    c.duration = j.value("duration", c.duration);
    c.divergence_bound = j.value("divergence_bound", c.divergence_bound);
    c.threads = j.value("threads", c.threads);
    c.validate();
    return c;
}

json solver_config_to_json(const SolverConfig& c) {
    return {{"dt", c.dt},
            {"gamma", c.gamma},
            {"subcycles", c.subcycles},
            {"duration", c.duration},
            {"divergence_bound", c.divergence_bound},
            {"threads", c.threads}};
}

InputTable read_inputs(const std::string& path) {
    const CsvTable t = read_csv(path);
    if (t.header.empty() || t.header.front() != "time") throw ModelError(path + ": first column must be 'time'");
    if (t.rows.size() < 2) throw ModelError(path + ": at least two samples are required");
    const double period = t.rows[1][0] - t.rows[0][0];
    if (!(period > 0.0)) throw ModelError(path + ": time column must increase");
    for (std::size_t k = 0; k < t.rows.size(); ++k) {
        const double expected = t.rows[0][0] + static_cast<double>(k) * period;
        if (std::abs(t.rows[k][0] - expected) > 1e-6 * period) {
            throw ModelError(path + ": samples are not uniformly spaced at row " + std::to_string(k + 2));
        }
    }
    if (std::abs(t.rows[0][0]) > 1e-12) throw ModelError(path + ": time column must start at 0");
    Matrix samples(static_cast<Index>(t.rows.size()), static_cast<Index>(t.header.size()) - 1);
    for (Index k = 0; k < samples.rows(); ++k) {
        for (Index c = 0; c < samples.cols(); ++c) {
            samples(k, c) = t.rows[static_cast<std::size_t>(k)][static_cast<std::size_t>(c + 1)];
        }
    }
    return InputTable(period, std::move(samples));
}

void write_inputs(const std::string& path, const InputTable& inputs) {
    CsvTable t;
    t.header.push_back("time");
    for (Index c = 0; c < inputs.channel_count(); ++c) t.header.push_back("ch" + std::to_string(c));
    for (Index k = 0; k < inputs.sample_count(); ++k) {
        std::vector<double> row{static_cast<double>(k) * inputs.sample_period()};
        for (Index c = 0; c < inputs.channel_count(); ++c) row.push_back(inputs.samples()(k, c));
        t.rows.push_back(std::move(row));
    }
    write_csv(path, t);
}

std::vector<Probe> boundary_probes(const ModelSet& set) {
    std::vector<Probe> out;
    for (std::size_t s = 0; s < set.substructures.size(); ++s) {
        const auto& p = std::visit([](const auto& m) -> const DofPartition& { return m.partition(); },
                                   set.substructures[s]);
        for (Index d : p.boundary) out.push_back({static_cast<Index>(s), d});
    }
    return out;
}

CsvTable trajectory_table(const Trajectory& traj, const std::vector<std::string>& names,
                          const std::vector<Probe>& probes) {
    CsvTable t;
    t.header.push_back("time");
    for (const auto& p : probes) {
        const std::string& name = names.at(static_cast<std::size_t>(p.substructure));
        const std::string dof = std::to_string(p.label >= 0 ? p.label : p.dof);
        t.header.push_back(name + "_u" + dof);
        t.header.push_back(name + "_v" + dof);
    }
    const Index nc = traj.multipliers.empty() ? 0 : traj.multipliers.front().size();
    for (Index c = 0; c < nc; ++c) t.header.push_back("lambda" + std::to_string(c));
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        std::vector<double> row{traj.times[k]};
        for (const auto& p : probes) {
            const Vector& y = traj.states.at(static_cast<std::size_t>(p.substructure)).at(k);
            const Index n = y.size() / 2;
            row.push_back(y(p.dof));
            row.push_back(y(n + p.dof));
        }
        for (Index c = 0; c < nc; ++c) row.push_back(traj.multipliers[k](c));
        t.rows.push_back(std::move(row));
    }
    return t;
}

json reduction_to_json(const CraigBamptonReduction& red) {
    json j;
    j["mode_count"] = red.mode_count();
    j["boundary_count"] = red.boundary_count();
    j["internal"] = red.physical_partition().internal;
    j["boundary"] = red.physical_partition().boundary;
    std::vector<double> freqs(red.retained_frequencies().data(),
                              red.retained_frequencies().data() + red.retained_frequencies().size());
    j["retained_frequencies"] = freqs;
    if (red.first_discarded_frequency()) j["first_discarded_frequency"] = *red.first_discarded_frequency();
    j["transform"] = matrix_to_json(red.transform());
    j["reduced_mass"] = matrix_to_json(red.reduced_mass());
    j["reduced_stiffness"] = matrix_to_json(red.reduced_stiffness());
    j["reduced_damping"] = matrix_to_json(red.reduced_damping());
    return j;
}

}  // namespace dsub
