// Copyright 2026 The cqedsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cqed/cli.h"

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "cqed/harness.h"

namespace cqed {

namespace {

struct Common {
    std::string config;
    std::string variant;
    std::string out;
    uint64_t seed = 0;
    bool seed_set = false;
    int jobs = 0;
};

RunConfig resolve(const Common &c) {
    RunConfig cfg;
    if (!c.config.empty()) {
        cfg = RunConfig::load(c.config);
    } else {
        cfg = RunConfig::preset(c.variant.empty() ? "ideal" : c.variant);
    }
    if (c.seed_set) {
        cfg.seed = c.seed;
    }
    if (c.jobs > 0) {
        cfg.jobs = c.jobs;
    }
    if (!c.out.empty()) {
        cfg.output_dir = c.out;
    }
    cfg.validate();
    return cfg;
}

void emit(const std::string &text, const std::string &path, std::ostream &out) {
    if (path.empty()) {
        out << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) {
        throw std::runtime_error("cannot write '" + path + "'");
    }
    f << text;
}

std::string spectrum_csv(const Spectrum &s) {
    std::ostringstream out;
    out << "frequency,channel,value\n";
    char buf[64];
    for (size_t c = 0; c < s.channels.size(); c++) {
        for (size_t k = 0; k < s.frequencies.size(); k++) {
            std::snprintf(buf, sizeof buf, "%.17g", s.frequencies[k]);
            out << buf << "," << s.channels[c] << ",";
            std::snprintf(buf, sizeof buf, "%.17g", s.amplitudes[c][k]);
            out << buf << "\n";
        }
    }
    return out.str();
}

// Population series from a persisted steps.csv (or exact.csv).
TimeSeries read_series(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open '" + path + "'");
    }
    std::string line;
    std::getline(in, line);
    int pop_cols = 0;
    {
        std::stringstream ss(line);
        std::string h;
        while (std::getline(ss, h, ',')) {
            if (h.rfind("p_", 0) == 0) {
                pop_cols++;
            }
        }
    }
    TimeSeries ts;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        std::stringstream ss(line);
        std::string cell;
        std::vector<double> v;
        while (std::getline(ss, cell, ',')) {
            v.push_back(std::stod(cell));
        }
        if ((int)v.size() < 1 + pop_cols) {
            throw std::runtime_error("malformed row in '" + path + "'");
        }
        for (int k = 1; k <= pop_cols; k++) {
            if (std::isnan(v[k])) {
                throw std::runtime_error("step at t=" + std::to_string(v[0]) + " in '" + path + "' has no retained shots");
            }
        }
        ts.times.push_back(v[0]);
        PopulationDistribution p;
        p.p_emitters.assign(v.begin() + 1, v.begin() + pop_cols);
        p.p_cav_env = v[pop_cols];
        ts.pops.push_back(p);
    }
    return ts;
}

void add_common(CLI::App *cmd, Common &c, bool with_out_dir) {
    cmd->add_option("--config", c.config, "JSON run configuration");
    cmd->add_option("--variant", c.variant, "named preset (used when --config is absent)");
    cmd->add_option("--seed", c.seed, "override the master seed")->each([&c](const std::string &) { c.seed_set = true; });
    cmd->add_option("--jobs", c.jobs, "worker threads over time steps");
    cmd->add_option("--out", c.out, with_out_dir ? "output directory" : "output file (default stdout)");
}

}  // namespace

int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
    CLI::App app{"cqedsim: open Tavis-Cummings simulation and compilation toolkit"};
    app.name("cqedsim");
    app.require_subcommand(1);

    Common solve_opts, run_opts, spec_opts;
    std::vector<std::string> compare_dirs;
    std::string compare_out, spec_run;

    CLI::App *solve = app.add_subcommand("solve", "exact populations on the configured grid as CSV");
    add_common(solve, solve_opts, false);
    CLI::App *run = app.add_subcommand("run", "full experiment; writes a run directory");
    add_common(run, run_opts, true);
    CLI::App *compare = app.add_subcommand("compare", "summary table over persisted runs");
    compare->add_option("runs", compare_dirs, "run directories")->required();
    compare->add_option("--out", compare_out, "output file (default stdout)");
    CLI::App *spectrum = app.add_subcommand("spectrum", "Fourier spectrum of exact or persisted populations");
    add_common(spectrum, spec_opts, false);
    spectrum->add_option("--run", spec_run, "run directory whose mitigated populations are transformed");

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp &) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError &e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (*solve) {
            RunConfig cfg = resolve(solve_opts);
            emit(exact_csv(cfg.model, cfg.time), solve_opts.out, out);
        } else if (*run) {
            RunConfig cfg = resolve(run_opts);
            if (cfg.output_dir.empty()) {
                cfg.output_dir = "runs/" + cfg.variant;
            }
            RunResult r = run_experiment(cfg);
            persist(r, cfg.output_dir);
            out << format_comparison(compare_variants({r.summary}));
            out << "written " << cfg.output_dir << "\n";
        } else if (*compare) {
            std::vector<RunSummary> runs;
            for (const std::string &d : compare_dirs) {
                if (!verify_provenance(d)) {
                    throw std::runtime_error("config hash mismatch in '" + d + "'");
                }
                runs.push_back(load_summary(d));
            }
            emit(format_comparison(compare_variants(runs)), compare_out, out);
        } else if (*spectrum) {
            TimeSeries ts;
            int channel = 0;
            if (!spec_run.empty()) {
                ts = read_series((std::filesystem::path(spec_run) / "steps.csv").string());
                RunConfig cfg = RunConfig::load((std::filesystem::path(spec_run) / "config.json").string());
                channel = cfg.model.excited_emitter - 1;
            } else {
                RunConfig cfg = resolve(spec_opts);
                ts.times = cfg.time.times();
                for (double t : ts.times) {
                    ts.pops.push_back(populations(evolve_single_excitation(cfg.model, t)));
                }
                channel = cfg.model.excited_emitter - 1;
            }
            Spectrum s = fft_spectrum(ts);
            emit(spectrum_csv(s), spec_opts.out, out);
            err << "peak " << rabi_peak(s, channel) << " cycles/ns (bin " << rabi_peak_bin(s, channel) << ")\n";
        }
    } catch (const std::exception &e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

}  // namespace cqed
