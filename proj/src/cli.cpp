// Copyright 2026 The qembed Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qembed/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "qembed/config.hpp"
#include "qembed/verify.hpp"

namespace qembed {

namespace fs = std::filesystem;

std::string format_number(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

namespace {

struct Options {
    std::string config;
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;
    bool quiet = false;
    std::string emit_normalized;
};

class Csv {
public:
    Csv(const fs::path& path, const std::vector<std::string>& header) : file_(path, std::ios::binary) {
        if (!file_)
            throw Error("cannot write " + path.string());
        row_strings(header);
    }
    void row(const std::vector<double>& values) {
        std::vector<std::string> cells;
        cells.reserve(values.size());
        for (double v : values)
            cells.push_back(format_number(v));
        row_strings(cells);
    }

private:
    void row_strings(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i)
            file_ << (i ? "," : "") << cells[i];
        file_ << '\n';
    }
    std::ofstream file_;
};

double expectation(const CMatrix& op, const CMatrix& rho) { return (op * rho).trace().real(); }

std::vector<std::string> observable_header(const std::vector<Observable>& obs) {
    std::vector<std::string> h{"t"};
    for (const auto& o : obs)
        h.push_back(o.name);
    return h;
}

std::vector<double> observable_row(double t, const std::vector<Observable>& obs, const CMatrix& reduced) {
    std::vector<double> row{t};
    for (const auto& o : obs)
        row.push_back(expectation(o.op, reduced));
    return row;
}

/// Collects PASS/FAIL lines for commands that run checks.
class Report {
public:
    void check(const std::string& name, double value, double bound, bool upper) {
        const bool pass = std::isfinite(value) && (upper ? value <= bound : value >= bound);
        ok_ = ok_ && pass;
        lines_ << (pass ? "PASS " : "FAIL ") << name << ' ' << format_number(value) << (upper ? " <= " : " >= ")
               << format_number(bound) << '\n';
    }
    void note(const std::string& line) { lines_ << line << '\n'; }
    bool ok() const { return ok_; }
    std::string text() const { return lines_.str(); }

private:
    bool ok_ = true;
    std::ostringstream lines_;
};

StateSnapshot initial_snapshot(const ExperimentConfig& cfg) {
    if (cfg.run.representation == Representation::joint)
        return cfg.initial;
    return blocks_from_joint(cfg.initial);
}

int cmd_validate(const ExperimentConfig& cfg, const Options& opt, std::ostream& out) {
    if (!opt.emit_normalized.empty()) {
        const std::string text = emit_normalized(cfg);
        if (opt.emit_normalized == "-") {
            out << text;
            return kExitOk;
        }
        std::ofstream f(opt.emit_normalized, std::ios::binary);
        if (!f)
            throw Error("cannot write " + opt.emit_normalized);
        f << text;
    }
    if (!opt.quiet) {
        const auto& d = cfg.model.dims;
        out << "valid: principal " << d.principal() << ", " << d.num_baths() << " auxiliar"
            << (d.num_baths() == 1 ? "y" : "ies") << ", joint dimension " << d.total() << ", probe "
            << (cfg.model.probe ? "yes" : "no") << '\n';
    }
    return kExitOk;
}

int cmd_qme(const ExperimentConfig& cfg, const Options& opt, std::ostream& out) {
    SimConfig sim = cfg.sim;
    sim.scheme = Scheme::rk4;
    sim.measurement = Measurement::none;
    const auto series = solve_qme(cfg.model, blocks_from_joint(cfg.initial), sim);
    const auto& obs = cfg.run.observables;
    Csv csv(fs::path(opt.out_dir) / "qme.csv", observable_header(obs));
    double drift = 0.0;
    for (const auto& s : series) {
        csv.row(observable_row(s.t, obs, s.reduced));
        drift = std::max(drift, std::abs(s.state.total_trace() - 1.0));
    }
    if (!opt.quiet)
        out << "qme: " << series.size() << " rows, max trace drift " << format_number(drift) << '\n';
    return kExitOk;
}

int cmd_sme(const ExperimentConfig& cfg, const Options& opt, std::ostream& out) {
    const auto rec = simulate_trajectory(cfg.model, initial_snapshot(cfg), cfg.sim, cfg.run.representation);
    {
        Csv csv(fs::path(opt.out_dir) / "sme.csv", {"t", "dY", "dI", "mval"});
        for (std::size_t n = 0; n < rec.dY.size(); ++n)
            csv.row({rec.times[n], rec.dY[n], rec.dI[n], rec.mvals[n]});
    }
    const auto& obs = cfg.run.observables;
    Csv states(fs::path(opt.out_dir) / "sme_states.csv", observable_header(obs));
    for (std::size_t k = 0; k < rec.snapshots.size(); ++k)
        states.row(observable_row(rec.snapshot_times[k], obs, reduced_state(rec.snapshots[k])));
    if (!opt.quiet)
        out << "sme: " << rec.times.size() << " steps, " << rec.snapshots.size() << " snapshots, seed "
            << rec.seed << '\n';
    return kExitOk;
}

int cmd_ensemble(const ExperimentConfig& cfg, const Options& opt, std::ostream& out) {
    EnsembleOptions eo;
    eo.threads = cfg.run.threads;
    eo.representation = cfg.run.representation;
    eo.num_checkpoints = cfg.run.checkpoints;
    const auto& obs = cfg.run.observables;
    const auto s = ensemble_average(cfg.model, initial_snapshot(cfg), cfg.sim, cfg.run.N, obs, eo);

    std::vector<std::string> header{"t"};
    for (const auto& o : obs) {
        header.push_back(o.name);
        header.push_back(o.name + "_stderr");
        header.push_back(o.name + "_qme");
    }
    Csv csv(fs::path(opt.out_dir) / "ensemble.csv", header);
    double worst_z = 0.0;
    for (std::size_t c = 0; c < s.checkpoints.size(); ++c) {
        std::vector<double> row{s.checkpoints[c]};
        for (std::size_t o = 0; o < obs.size(); ++o) {
            row.insert(row.end(), {s.mean_obs[c][o], s.stderr_obs[c][o], s.qme_obs[c][o]});
            const double gap = std::abs(s.mean_obs[c][o] - s.qme_obs[c][o]);
            const double z = gap == 0.0 ? 0.0 : gap / s.stderr_obs[c][o];
            worst_z = std::max(worst_z, z);
        }
        csv.row(row);
    }
    Report report;
    report.note("trajectories " + std::to_string(s.N));
    report.check("max_stderr_multiple", worst_z, 5.0, true);
    report.check("innovation_mean_abs", std::abs(s.innovation_mean), 5.0 * std::sqrt(cfg.sim.t_end / s.N), true);
    report.note("innovation_variance " + format_number(s.innovation_var) + " (expected " +
                format_number(cfg.sim.t_end) + ")");
    std::ofstream(fs::path(opt.out_dir) / "ensemble_summary.txt", std::ios::binary) << report.text();
    if (!opt.quiet)
        out << report.text();
    return report.ok() ? kExitOk : kExitCheckFailed;
}

int cmd_crosscheck(const ExperimentConfig& cfg, const Options& opt, std::ostream& out) {
    SimConfig sim = cfg.sim;
    sim.scheme = Scheme::euler_maruyama;
    const StateSnapshot init = cfg.initial;
    Report report;
    report.check("shared_path_deviation", crosscheck_paths(cfg.model, init, sim), 1e-10, true);
    if (cfg.run.mutation_check) {
        const auto fault =
            cfg.model.baths.empty() ? BlockFault::flip_principal_hamiltonian : BlockFault::flip_aux_hamiltonian;
        report.check("mutation_deviation", crosscheck_paths(cfg.model, init, sim, fault), 1e-3, false);
    }

    double identity_gap = 0.0;
    SimConfig every = sim;
    every.snapshot_stride = 1;
    StateSnapshot path = blocks_from_joint(cfg.initial);
    integrate_path(cfg.model, path, every, Representation::blocks, [&](const StepInfo&, const StateSnapshot& s) {
        const auto& b = std::get<BlockState>(s);
        const JointState j = joint_from_blocks(b);
        identity_gap = std::max(identity_gap, max_abs_diff(b.reduced(), partial_trace(j.rho, j.dims, principal_slot())));
    });
    report.check("reduced_identity", identity_gap, 1e-12, true);

    if (cfg.model.is_closed()) {
        SimConfig rk = cfg.sim;
        rk.scheme = Scheme::rk4;
        rk.measurement = Measurement::none;
        const auto series = solve_qme(cfg.model, blocks_from_joint(cfg.initial), rk);
        std::vector<double> times;
        for (const auto& s : series)
            times.push_back(s.t);
        const auto ref = closed_system_oracle(cfg.model, cfg.initial, times);
        double gap = 0.0;
        for (std::size_t k = 0; k < series.size(); ++k)
            gap = std::max(gap, max_abs_diff(series[k].reduced, ref[k]));
        report.check("closed_system_oracle", gap, 1e-8, true);
    }
    std::ofstream(fs::path(opt.out_dir) / "crosscheck.txt", std::ios::binary) << report.text();
    if (!opt.quiet)
        out << report.text();
    return report.ok() ? kExitOk : kExitCheckFailed;
}

using Command = std::function<int(const ExperimentConfig&, const Options&, std::ostream&)>;

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Markovian embeddings of non-Markovian open quantum systems", "qembed"};
    app.require_subcommand(1);
    Options opt;

    const std::vector<std::tuple<std::string, std::string, Command>> commands{
        {"validate", "Parse and validate a config", cmd_validate},
        {"qme", "Solve the coupled master equation (RK4) and write qme.csv", cmd_qme},
        {"sme", "Simulate one measured trajectory and write sme.csv", cmd_sme},
        {"ensemble", "Average trajectories against the master equation", cmd_ensemble},
        {"crosscheck", "Run the shared-path, identity and oracle checks", cmd_crosscheck},
    };
    for (const auto& [name, help, _] : commands) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("--config", opt.config, "JSON experiment file")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", opt.out_dir, "Directory for output files");
        sub->add_option("--seed", opt.seed, "Override sim.seed");
        sub->add_flag("--quiet", opt.quiet, "Suppress the summary on stdout");
        if (name == "validate")
            sub->add_option("--emit-normalized", opt.emit_normalized, "Write the normalized config ('-' for stdout)");
    }

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "qembed: " << e.what() << '\n';
        return kExitRuntime;
    }

    for (const auto& [name, help, run] : commands) {
        if (!app.got_subcommand(name))
            continue;
        ExperimentConfig cfg;
        try {
            cfg = parse_config(opt.config);
        } catch (const ConfigError& e) {
            err << "qembed " << name << ": " << e.what() << '\n';
            return kExitCheckFailed;
        }
        if (opt.seed)
            cfg.sim.seed = *opt.seed;
        try {
            if (name != "validate")
                fs::create_directories(opt.out_dir);
            return run(cfg, opt, out);
        } catch (const std::exception& e) {
            err << "qembed " << name << ": " << e.what() << '\n';
            return kExitRuntime;
        }
    }
    return kExitRuntime;
}

} // namespace qembed
