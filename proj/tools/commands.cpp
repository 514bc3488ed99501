#include "commands.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <nlohmann/json.hpp>
#include <omp.h>

#include "qfb/measures.hpp"
#include "qfb/rng.hpp"
#include "qfb/scan.hpp"
#include "qfb/version.hpp"

namespace qfb::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string fmt_g(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_file(const std::string& path, const std::string& content) {
    const fs::path p(path);
    std::error_code ec;
    if (p.has_parent_path()) fs::create_directories(p.parent_path(), ec);
    std::ofstream f(p);
    if (!f) throw ConfigError("cannot open output file: " + path);
    f << content;
}

std::string sidecar_path(const std::string& csv_path) {
    fs::path p(csv_path);
    p.replace_extension(".json");
    return p.string();
}

json base_sidecar(const ExperimentSpec& spec) {
    json j;
    j["command"] = spec.command;
    j["version"] = kVersion;
    j["threads"] = omp_get_max_threads();
    j["rng"] = {{"algorithm", Rng::kAlgorithm},
                {"seeding", std::string(Rng::kSeeding) + "(base_seed + trajectory_index)"},
                {"base_seed", spec.sim.seed}};
    j["config_text"] = spec.resolved_text();
    return j;
}

// CSV with one header row, ',' separator, 17 significant digits.
class CsvWriter {
public:
    explicit CsvWriter(std::vector<std::string> header) : header_(std::move(header)) {}

    void row(const std::vector<double>& values) {
        std::string line;
        for (std::size_t i = 0; i < values.size(); ++i) line += (i ? "," : "") + fmt_g(values[i]);
        rows_.push_back(std::move(line));
    }

    std::string str() const {
        std::string s;
        for (std::size_t i = 0; i < header_.size(); ++i) s += (i ? "," : "") + header_[i];
        s += '\n';
        for (const std::string& r : rows_) {
            s += r;
            s += '\n';
        }
        return s;
    }

    std::size_t n_rows() const { return rows_.size(); }

private:
    std::vector<std::string> header_;
    std::vector<std::string> rows_;
};

std::vector<double> linspace(double t0, double t1, int n) {
    std::vector<double> out;
    if (n <= 1) return {t1};
    out.reserve(n);
    for (int i = 0; i < n; ++i) out.push_back(t0 + (t1 - t0) * i / (n - 1));
    return out;
}

CMat dark_projector(int n_qubits) {
    const auto darks = dark_basis(n_qubits);
    CMat p(dim(n_qubits), dim(n_qubits));
    for (const StateVector& d : darks) p += outer(d.amplitudes, d.amplitudes);
    return p;
}

std::string default_out(const ExperimentSpec& spec) {
    const bool is_json = spec.command == "dark-basis" || spec.command == "validate";
    return spec.command + (is_json ? ".json" : ".csv");
}

int cmd_dark_basis(const ExperimentSpec& spec, const std::string& out) {
    const CoupledBasis basis = build_coupled_basis(spec.sim.n_qubits);
    json j = json::parse(coupled_basis_json(basis));
    j["provenance"] = base_sidecar(spec);
    write_file(out, j.dump(2));
    return 0;
}

int cmd_validate(const ExperimentSpec& spec, const std::string& out) {
    const auto target = resolve_target(spec);
    if (!target) throw ConfigError("validate needs a target state");
    const CoupledBasis basis = build_coupled_basis(spec.sim.n_qubits);
    const FeedbackScheme scheme = build_feedback(spec);
    const StrategyReport report = validate_strategy(scheme.unitary, *target, basis);
    json j = json::parse(strategy_report_json(report));
    j["feedback"] = feedback_kind_str(scheme.kind);
    j["provenance"] = base_sidecar(spec);
    write_file(out, j.dump(2));
    return 0;
}

int cmd_evolve(const ExperimentSpec& spec, const std::string& out) {
    SimConfig cfg = spec.sim;
    cfg.feedback = build_feedback(spec);
    const auto target = resolve_target(spec);
    const bool dark = cfg.n_qubits % 2 == 0;
    const CMat pdark = dark ? dark_projector(cfg.n_qubits) : CMat();

    const DensityMatrix rho0 = pure_density(ground_state(cfg.n_qubits));
    const MasterResult res = evolve_master(rho0, cfg.t_final, cfg,
                                           linspace(0.0, cfg.t_final, spec.n_samples));

    std::vector<std::string> header{"t"};
    if (target) header.push_back("overlap");
    if (dark) header.push_back("p_dark");
    header.push_back("purity");
    CsvWriter csv(header);
    for (std::size_t s = 0; s < res.sample_times.size(); ++s) {
        std::vector<double> row{res.sample_times[s]};
        if (target) row.push_back(overlap(res.states[s], *target));
        if (dark) row.push_back(std::real(trace(pdark * res.states[s].entries)));
        row.push_back(purity(res.states[s]));
        csv.row(row);
    }
    write_file(out, csv.str());

    json side = base_sidecar(spec);
    side["csv"] = out;
    side["rows"] = csv.n_rows();
    side["integrator"] = {{"steps", res.stats.n_steps},
                          {"rejected", res.stats.n_rejected},
                          {"max_trace_dev", res.stats.max_trace_dev},
                          {"max_hermiticity_dev", res.stats.max_herm_dev}};
    write_file(sidecar_path(out), side.dump(2));
    return 0;
}

int cmd_trajectory(const ExperimentSpec& spec, const std::string& out) {
    SimConfig cfg = spec.sim;
    cfg.feedback = build_feedback(spec);
    const auto target = resolve_target(spec);
    const bool dark = cfg.n_qubits % 2 == 0;
    const CMat pdark = dark ? dark_projector(cfg.n_qubits) : CMat();

    const TrajectoryRecord rec =
        run_trajectory(ground_state(cfg.n_qubits), cfg.t_final, cfg.seed, cfg,
                       linspace(0.0, cfg.t_final, spec.n_samples));

    std::vector<std::string> header{"t"};
    if (target) header.push_back("overlap");
    if (dark) header.push_back("p_dark");
    header.push_back("n_jumps");
    if (spec.write_amplitudes)
        for (std::size_t i = 0; i < dim(cfg.n_qubits); ++i) {
            header.push_back("re_" + std::to_string(i));
            header.push_back("im_" + std::to_string(i));
        }
    CsvWriter csv(header);
    std::size_t jump_idx = 0;
    for (std::size_t s = 0; s < rec.states.size(); ++s) {
        while (jump_idx < rec.jumps.size() && rec.jumps[jump_idx].time <= rec.sample_times[s])
            ++jump_idx;
        std::vector<double> row{rec.sample_times[s]};
        if (target) row.push_back(overlap(rec.states[s], *target));
        if (dark) {
            double p = 0.0;
            const CVec pv = pdark * rec.states[s].amplitudes;
            p = std::real(inner(rec.states[s].amplitudes, pv));
            row.push_back(p);
        }
        row.push_back(static_cast<double>(jump_idx));
        if (spec.write_amplitudes)
            for (const cplx& a : rec.states[s].amplitudes) {
                row.push_back(a.real());
                row.push_back(a.imag());
            }
        csv.row(row);
    }
    write_file(out, csv.str());

    json side = base_sidecar(spec);
    side["csv"] = out;
    side["rows"] = csv.n_rows();
    auto jumps = json::array();
    for (const JumpEvent& e : rec.jumps)
        jumps.push_back({{"time", e.time},
                         {"channel", e.channel == 0 ? "collective" : "spont_" + std::to_string(e.channel)}});
    side["jumps"] = std::move(jumps);
    write_file(sidecar_path(out), side.dump(2));
    return 0;
}

int cmd_ensemble(const ExperimentSpec& spec, const std::string& out) {
    SimConfig cfg = spec.sim;
    cfg.feedback = build_feedback(spec);
    const auto target = resolve_target(spec);

    std::vector<OperatorMatrix> observables;
    if (target)
        observables.emplace_back(outer(target->amplitudes, target->amplitudes), cfg.n_qubits);

    const EnsembleEstimate est =
        ensemble_average(ground_state(cfg.n_qubits), cfg.t_final, spec.n_trajectories, cfg.seed,
                         cfg, linspace(0.0, cfg.t_final, spec.n_samples), observables);

    std::vector<std::string> header{"t"};
    if (target) {
        header.push_back("overlap");
        header.push_back("overlap_se");
    }
    header.push_back("purity");
    CsvWriter csv(header);
    for (std::size_t s = 0; s < est.sample_times.size(); ++s) {
        std::vector<double> row{est.sample_times[s]};
        if (target) {
            row.push_back(est.observable_mean[0][s]);
            row.push_back(est.observable_stderr[0][s]);
        }
        row.push_back(purity(est.rho_hat[s]));
        csv.row(row);
    }
    write_file(out, csv.str());

    json side = base_sidecar(spec);
    side["csv"] = out;
    side["rows"] = csv.n_rows();
    side["n_trajectories"] = est.n_trajectories;
    write_file(sidecar_path(out), side.dump(2));
    return 0;
}

int cmd_scan_a(const ExperimentSpec& spec, const std::string& out) {
    const std::vector<ScanRowA> rows = run_scan_A(spec);
    CsvWriter csv({"A", "overlap_no_se", "overlap_with_se", "converged_no_se", "converged_with_se"});
    json nonconv = json::array();
    for (const ScanRowA& r : rows) {
        csv.row({r.amplitude, r.overlap_no_se, r.overlap_with_se,
                 r.converged_no_se ? 1.0 : 0.0, r.converged_with_se ? 1.0 : 0.0});
        if (!r.converged_no_se || !r.converged_with_se) nonconv.push_back(r.amplitude);
    }
    write_file(out, csv.str());
    json side = base_sidecar(spec);
    side["csv"] = out;
    side["rows"] = csv.n_rows();
    side["nonconverged_A"] = std::move(nonconv);
    write_file(sidecar_path(out), side.dump(2));
    return 0;
}

int cmd_scan_a_eps(const ExperimentSpec& spec, const std::string& out) {
    const std::vector<ScanRowAEps> rows = run_scan_A_eps(spec);
    CsvWriter csv({"A", "eps", "overlap", "converged"});
    json nonconv = json::array();
    for (const ScanRowAEps& r : rows) {
        csv.row({r.amplitude, r.eps, r.overlap, r.converged ? 1.0 : 0.0});
        if (!r.converged) nonconv.push_back(json::array({r.amplitude, r.eps}));
    }
    write_file(out, csv.str());
    json side = base_sidecar(spec);
    side["csv"] = out;
    side["rows"] = csv.n_rows();
    side["nonconverged"] = std::move(nonconv);
    write_file(sidecar_path(out), side.dump(2));
    return 0;
}

int cmd_concurrence_range(const ExperimentSpec& spec, const std::string& out) {
    const ConcurrenceRange r =
        dark_concurrence_range(spec.sim.n_qubits, spec.n_restarts, spec.sim.seed);
    CsvWriter csv({"N", "min", "max", "n_restarts", "seed"});
    csv.row({static_cast<double>(spec.sim.n_qubits), r.minimum, r.maximum,
             static_cast<double>(r.n_restarts), static_cast<double>(r.seed)});
    write_file(out, csv.str());
    json side = base_sidecar(spec);
    side["csv"] = out;
    side["rows"] = csv.n_rows();
    write_file(sidecar_path(out), side.dump(2));
    return 0;
}

}  // namespace

std::string load_config_text(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot read config file: " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    std::string text = ss.str();
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
        const json j = json::parse(text);
        const json& src = j.contains("provenance") ? j.at("provenance") : j;
        if (!src.contains("config_text"))
            throw ConfigError("JSON config has no config_text field: " + path);
        return src.at("config_text").get<std::string>();
    }
    return text;
}

int run_command(ExperimentSpec spec, const CliOptions& opt) {
    try {
        if (opt.threads > 0) omp_set_num_threads(opt.threads);
        if (opt.seed_override) spec.sim.seed = *opt.seed_override;
        if (!opt.out_override.empty()) spec.out_path = opt.out_override;
        const std::string out = spec.out_path.empty() ? default_out(spec) : spec.out_path;

        int rc = 0;
        if (spec.command == "dark-basis")
            rc = cmd_dark_basis(spec, out);
        else if (spec.command == "validate")
            rc = cmd_validate(spec, out);
        else if (spec.command == "evolve")
            rc = cmd_evolve(spec, out);
        else if (spec.command == "trajectory")
            rc = cmd_trajectory(spec, out);
        else if (spec.command == "ensemble")
            rc = cmd_ensemble(spec, out);
        else if (spec.command == "scan-A")
            rc = cmd_scan_a(spec, out);
        else if (spec.command == "scan-A-eps")
            rc = cmd_scan_a_eps(spec, out);
        else if (spec.command == "concurrence-range")
            rc = cmd_concurrence_range(spec, out);
        else
            throw ConfigError("unknown command '" + spec.command + "'");

        if (!opt.quiet) std::cerr << spec.command << ": wrote " << out << "\n";
        return rc;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    }
}

}  // namespace qfb::cli
