#include "qfb/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

#include "qfb/spin_structure.hpp"

namespace qfb {

std::vector<double> Range::values() const {
    if (step <= 0.0) throw ConfigError("range step must be positive");
    if (stop < start) throw ConfigError("range stop must be >= start");
    std::vector<double> out;
    const int n = static_cast<int>(std::floor((stop - start) / step + 1e-9)) + 1;
    out.reserve(n);
    for (int i = 0; i < n; ++i) out.push_back(start + i * step);
    return out;
}

namespace {

std::string fmt_g(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return {};
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

double parse_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing characters");
        return x;
    } catch (const std::exception&) {
        throw ConfigError("invalid real value for key '" + key + "': " + v);
    }
}

long long parse_int(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const long long x = std::stoll(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing characters");
        return x;
    } catch (const std::exception&) {
        throw ConfigError("invalid integer value for key '" + key + "': " + v);
    }
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const unsigned long long x = std::stoull(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing characters");
        return x;
    } catch (const std::exception&) {
        throw ConfigError("invalid unsigned value for key '" + key + "': " + v);
    }
}

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ConfigError("invalid boolean value for key '" + key + "': " + v);
}

std::vector<double> parse_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_double(key, trim(item)));
    if (out.empty()) throw ConfigError("empty list for key '" + key + "'");
    return out;
}

Range parse_range(const std::string& key, const std::string& v) {
    const auto p1 = v.find(':');
    const auto p2 = v.find(':', p1 == std::string::npos ? p1 : p1 + 1);
    if (p1 == std::string::npos || p2 == std::string::npos)
        throw ConfigError("invalid range for key '" + key + "' (expected start:step:stop): " + v);
    Range r;
    r.start = parse_double(key, trim(v.substr(0, p1)));
    r.step = parse_double(key, trim(v.substr(p1 + 1, p2 - p1 - 1)));
    r.stop = parse_double(key, trim(v.substr(p2 + 1)));
    if (r.step <= 0.0) throw ConfigError("range step must be positive for key '" + key + "'");
    if (r.stop < r.start) throw ConfigError("range stop must be >= start for key '" + key + "'");
    return r;
}

const std::set<std::string> kCommands = {"dark-basis", "validate",   "evolve",
                                         "trajectory", "ensemble",   "scan-A",
                                         "scan-A-eps", "concurrence-range"};

const std::set<std::string> kFeedbackKinds = {"identity", "local_drive", "epsilon_pair",
                                              "schematic_one_way", "schematic_two_way"};

const std::set<std::string> kTargets = {"auto", "psi_t", "psi_bb", "singlet", "none"};

}  // namespace

std::string Range::str() const {
    return fmt_g(start) + ":" + fmt_g(step) + ":" + fmt_g(stop);
}

ExperimentSpec parse_config(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key.empty() || val.empty())
            throw ConfigError("line " + std::to_string(lineno) + ": empty key or value");
        if (kv.count(key)) throw ConfigError("duplicate key '" + key + "'");
        kv[key] = val;
    }

    ExperimentSpec spec;
    spec.sim.gamma_spont = {1e-3};

    auto take = [&](const char* key) -> std::optional<std::string> {
        auto it = kv.find(key);
        if (it == kv.end()) return std::nullopt;
        std::string v = it->second;
        kv.erase(it);
        return v;
    };

    if (auto v = take("command")) {
        if (!kCommands.count(*v)) throw ConfigError("unknown command '" + *v + "'");
        spec.command = *v;
    } else {
        throw ConfigError("missing required key 'command'");
    }
    if (auto v = take("N")) {
        const long long n = parse_int("N", *v);
        if (n < 1 || n > 12) throw ConfigError("key 'N' out of supported range 1..12");
        spec.sim.n_qubits = static_cast<int>(n);
    }
    if (auto v = take("Omega")) spec.sim.omega = parse_double("Omega", *v);
    if (auto v = take("Gamma")) spec.sim.gamma_collective = parse_double("Gamma", *v);
    if (auto v = take("gamma")) spec.sim.gamma_spont = parse_list("gamma", *v);
    if (auto v = take("T")) spec.sim.t_final = parse_double("T", *v);
    if (auto v = take("tolerance")) spec.sim.tolerance = parse_double("tolerance", *v);
    if (auto v = take("seed")) spec.sim.seed = parse_u64("seed", *v);
    if (auto v = take("feedback")) {
        if (!kFeedbackKinds.count(*v)) throw ConfigError("unknown feedback kind '" + *v + "'");
        spec.feedback_kind = *v;
    }
    if (auto v = take("A")) spec.feedback_amplitude = parse_double("A", *v);
    if (auto v = take("eps")) spec.feedback_eps = parse_double("eps", *v);
    if (auto v = take("a")) spec.feedback_a = parse_list("a", *v);
    if (auto v = take("target")) {
        if (!kTargets.count(*v)) throw ConfigError("unknown target '" + *v + "'");
        spec.target = *v;
    }
    if (auto v = take("A_grid")) spec.a_grid = parse_range("A_grid", *v);
    if (auto v = take("eps_grid")) spec.eps_grid = parse_range("eps_grid", *v);
    if (auto v = take("n_traj")) {
        const long long n = parse_int("n_traj", *v);
        if (n < 1) throw ConfigError("key 'n_traj' must be >= 1");
        spec.n_trajectories = static_cast<int>(n);
    }
    if (auto v = take("samples")) {
        const long long n = parse_int("samples", *v);
        if (n < 1) throw ConfigError("key 'samples' must be >= 1");
        spec.n_samples = static_cast<int>(n);
    }
    if (auto v = take("n_restarts")) {
        const long long n = parse_int("n_restarts", *v);
        if (n < 1) throw ConfigError("key 'n_restarts' must be >= 1");
        spec.n_restarts = static_cast<int>(n);
    }
    if (auto v = take("write_amplitudes"))
        spec.write_amplitudes = parse_bool("write_amplitudes", *v);
    if (auto v = take("out")) spec.out_path = *v;

    if (!kv.empty()) throw ConfigError("unknown key '" + kv.begin()->first + "'");

    // cross-field validation
    const int n = spec.sim.n_qubits;
    if (spec.sim.t_final <= 0.0) throw ConfigError("key 'T' must be positive");
    spec.sim.resolved_gamma();  // validates list length
    if ((spec.feedback_kind == "epsilon_pair" || spec.feedback_kind.rfind("schematic", 0) == 0) &&
        n != 4)
        throw ConfigError("feedback '" + spec.feedback_kind + "' requires N=4 (got N=" +
                          std::to_string(n) + ")");
    if (spec.feedback_kind == "local_drive" && !spec.feedback_a.empty() &&
        spec.feedback_a.size() != static_cast<std::size_t>(n))
        throw ConfigError("key 'a' must list one amplitude per qubit");
    if ((spec.target == "psi_t" || spec.target == "psi_bb") && n != 4)
        throw ConfigError("target '" + spec.target + "' requires N=4");
    if (spec.target == "singlet" && n != 2) throw ConfigError("target 'singlet' requires N=2");
    if ((spec.command == "scan-A" || spec.command == "scan-A-eps") && n != 4)
        throw ConfigError("command '" + spec.command + "' requires N=4");
    if (spec.command == "concurrence-range" && n != 2 && n != 4 && n != 6 && n != 8)
        throw ConfigError("command 'concurrence-range' requires N in {2, 4, 6, 8}");
    return spec;
}

std::string ExperimentSpec::resolved_text() const {
    std::string s;
    s += "command = " + command + "\n";
    s += "N = " + std::to_string(sim.n_qubits) + "\n";
    s += "Omega = " + fmt_g(sim.omega) + "\n";
    s += "Gamma = " + fmt_g(sim.gamma_collective) + "\n";
    std::string gl;
    const std::vector<double> g = sim.gamma_spont.empty() ? std::vector<double>{0.0} : sim.gamma_spont;
    for (std::size_t i = 0; i < g.size(); ++i) gl += (i ? "," : "") + fmt_g(g[i]);
    s += "gamma = " + gl + "\n";
    s += "T = " + fmt_g(sim.t_final) + "\n";
    s += "tolerance = " + fmt_g(sim.tolerance) + "\n";
    s += "seed = " + std::to_string(sim.seed) + "\n";
    s += "feedback = " + feedback_kind + "\n";
    s += "A = " + fmt_g(feedback_amplitude) + "\n";
    s += "eps = " + fmt_g(feedback_eps) + "\n";
    if (!feedback_a.empty()) {
        std::string al;
        for (std::size_t i = 0; i < feedback_a.size(); ++i) al += (i ? "," : "") + fmt_g(feedback_a[i]);
        s += "a = " + al + "\n";
    }
    s += "target = " + target + "\n";
    s += "A_grid = " + a_grid.str() + "\n";
    s += "eps_grid = " + eps_grid.str() + "\n";
    s += "n_traj = " + std::to_string(n_trajectories) + "\n";
    s += "samples = " + std::to_string(n_samples) + "\n";
    s += "n_restarts = " + std::to_string(n_restarts) + "\n";
    s += std::string("write_amplitudes = ") + (write_amplitudes ? "true" : "false") + "\n";
    if (!out_path.empty()) s += "out = " + out_path + "\n";
    return s;
}

std::optional<StateVector> resolve_target(const ExperimentSpec& spec) {
    const int n = spec.sim.n_qubits;
    std::string t = spec.target;
    if (t == "auto") t = n == 4 ? "psi_t" : (n == 2 ? "singlet" : "none");
    if (t == "none") return std::nullopt;
    if (t == "psi_t") return singlet_state(2.0, -1.0, 0.0, 0.0);
    if (t == "psi_bb") return singlet_state(0.0, 0.5, 0.0, 0.0);
    // two-qubit singlet (|ge> - |eg>)/sqrt(2)
    CVec amps(4);
    amps[0b01] = 1.0 / std::sqrt(2.0);
    amps[0b10] = -1.0 / std::sqrt(2.0);
    return StateVector{std::move(amps), 2};
}

FeedbackScheme build_feedback(const ExperimentSpec& spec) {
    const int n = spec.sim.n_qubits;
    if (spec.feedback_kind == "identity") return identity_feedback(n);
    if (spec.feedback_kind == "local_drive") {
        if (!spec.feedback_a.empty()) return local_drive_feedback(spec.feedback_a);
        if (n == 4) {
            const double a = spec.feedback_amplitude;
            return local_drive_feedback({a, a, -a, -a});
        }
        throw ConfigError("feedback 'local_drive' needs key 'a' (or N=4 with key 'A')");
    }
    if (spec.feedback_kind == "epsilon_pair")
        return epsilon_pair_feedback(spec.feedback_amplitude, spec.feedback_eps);
    // schematic kinds
    const auto target = resolve_target(spec);
    if (!target) throw ConfigError("schematic feedback needs a dark target state");
    const CoupledBasis basis = build_coupled_basis(n);
    return schematic_feedback(spec.feedback_kind == "schematic_one_way" ? SchematicKind::one_way
                                                                        : SchematicKind::two_way,
                              basis, *target);
}

}  // namespace qfb
