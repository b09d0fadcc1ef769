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

#include "cqed/harness.h"

#include <openssl/evp.h>

#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <numbers>
#include <nlohmann/json.hpp>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace cqed {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string num(double v) {
    if (std::isnan(v)) {
        return "nan";
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string sha256_hex(const std::string &data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("SHA-256 digest failed");
    }
    static const char *hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; i++) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 15];
    }
    return out;
}

std::string read_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open '" + path + "'");
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path &path, const std::string &text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write '" + path.string() + "'");
    }
    out << text;
    if (!out) {
        throw std::runtime_error("write failed for '" + path.string() + "'");
    }
}

GateKind kind_from(const std::string &s) {
    auto k = parse_gate_kind(s);
    if (!k) {
        throw std::invalid_argument("unknown gate kind '" + s + "'");
    }
    return *k;
}

json interval_json(const Interval &i) {
    return json{{"lo", i.lo}, {"hi", i.hi}, {"point", i.point}};
}

Interval interval_from(const json &j) {
    Interval i;
    i.lo = j.at("lo").get<double>();
    i.hi = j.at("hi").get<double>();
    i.point = j.at("point").get<double>();
    return i;
}

json noise_json(const NoiseModel &n) {
    json pairs = json::array();
    for (const auto &[pair, p] : n.depol_2q_pair) {
        pairs.push_back({{"pair", {pair.first, pair.second}}, {"p", p}});
    }
    json over = json::object();
    for (const auto &[kind, eps] : n.overrotation) {
        over[std::string(gate_name(kind))] = eps;
    }
    return json{{"depol_1q", n.depol_1q},
                {"depol_2q", n.depol_2q},
                {"depol_2q_pair", pairs},
                {"overrotation", over},
                {"amplitude_noise", n.amplitude_noise},
                {"jitter_batches", n.jitter_batches},
                {"spam_flip", n.spam_flip},
                {"seed", n.seed}};
}

NoiseModel noise_from_json(const json &j) {
    NoiseModel n;
    n.depol_1q = j.value("depol_1q", 0.0);
    n.depol_2q = j.value("depol_2q", 0.0);
    if (j.contains("depol_2q_pair")) {
        for (const json &e : j.at("depol_2q_pair")) {
            int a = e.at("pair").at(0).get<int>(), b = e.at("pair").at(1).get<int>();
            n.depol_2q_pair[{std::min(a, b), std::max(a, b)}] = e.at("p").get<double>();
        }
    }
    if (j.contains("overrotation")) {
        for (const auto &[k, v] : j.at("overrotation").items()) {
            n.overrotation[kind_from(k)] = v.get<double>();
        }
    }
    n.amplitude_noise = j.value("amplitude_noise", 0.0);
    n.jitter_batches = j.value("jitter_batches", 10);
    n.spam_flip = j.value("spam_flip", 0.0);
    n.seed = j.value("seed", uint64_t{0});
    return n;
}

json config_json(const RunConfig &c) {
    const TCParams &m = c.model;
    json singles = json::array();
    for (GateKind k : c.backend.spec.native_single_qubit) {
        singles.push_back(std::string(gate_name(k)));
    }
    json mit = {{"postselect", c.mitigation.postselect},
                {"average_identical", std::vector<int>(c.mitigation.average_identical.begin(),
                                                       c.mitigation.average_identical.end())},
                {"rc_randomizations", c.mitigation.rc_randomizations},
                {"nox_factors", c.mitigation.nox_factors},
                {"seed", c.mitigation.seed}};
    return json{
        {"schema_version", c.schema_version},
        {"variant", c.variant},
        {"model",
         {{"n_emitters", m.n_emitters},
          {"couplings", m.couplings},
          {"kappa", m.kappa},
          {"cavity_freq", m.cavity_freq},
          {"emitter_freqs", m.emitter_freqs},
          {"excited_emitter", m.excited_emitter}}},
        {"time", {{"t_start", c.time.t_start}, {"t_max", c.time.t_max}, {"n_steps", c.time.n_steps}}},
        {"shots", c.shots},
        {"backend",
         {{"native_two_qubit", std::string(gate_name(c.backend.spec.native_two_qubit))},
          {"native_single_qubit", singles},
          {"connectivity", std::string(connectivity_name(c.backend.spec.connectivity))},
          {"chain", c.backend.spec.chain},
          {"transpile",
           {{"use_zz", c.backend.transpile.use_zz},
            {"mirror", c.backend.transpile.mirror},
            {"route", c.backend.transpile.route},
            {"lower", c.backend.transpile.lower}}},
          {"noise", noise_json(c.backend.noise)},
          {"fidelity_table", c.backend.fidelity_table}}},
        {"mitigation", mit},
        {"analysis",
         {{"bootstrap_replicates", c.analysis.bootstrap_replicates}, {"ci_level", c.analysis.ci_level}}},
        {"seed", c.seed},
    };
}

std::vector<Role> standard_roles(int n) {
    std::vector<Role> roles{Role::cavity_env()};
    for (int i = 1; i <= n; i++) {
        roles.push_back(Role::emitter_qubit(i));
    }
    return roles;
}

// Population estimate of one step from its counts per amplification factor.
struct Estimate {
    std::optional<PopulationDistribution> pops;
    bool clipped = false;
    double discard = 0;
    uint64_t kept = 0;
};

Estimate estimate_step(const std::vector<int> &lambdas, const std::vector<const Counts *> &counts,
                       const std::vector<Role> &roles, const MitigationConfig &mit, int excited) {
    std::map<int, PopulationDistribution> per;
    Estimate out;
    for (size_t i = 0; i < lambdas.size(); i++) {
        const Counts &c = *counts[i];
        std::optional<PopulationDistribution> p;
        if (mit.postselect) {
            PostselectResult ps = postselect(c);
            if (i == 0) {
                out.discard = ps.discard_fraction;
                out.kept = ps.kept.total;
            }
            p = populations_from_counts(ps.kept, roles);
        } else {
            if (i == 0) {
                out.kept = c.total;
            }
            p = marginal_populations(c, roles);
        }
        if (p) {
            per[lambdas[i]] = average_identical_emitters(*p, mit.average_identical, excited);
        }
    }
    if (lambdas.size() < 2) {
        if (!per.empty()) {
            out.pops = per.begin()->second;
        }
        return out;
    }
    if (per.size() >= 2) {
        NoxEstimate e = nox_extrapolate_step(per);
        out.pops = e.pops;
        out.clipped = e.clipped;
    } else if (per.count(lambdas[0])) {
        out.pops = per.at(lambdas[0]);
        out.clipped = true;
    }
    return out;
}

struct StepJob {
    const RunConfig *cfg;
    const NoiseModel *noise;
    std::vector<int> lambdas;
};

StepResult run_step(const StepJob &job, size_t step, double t) {
    const RunConfig &cfg = *job.cfg;
    StepResult r;
    r.t = t;
    r.exact = populations(evolve_single_excitation(cfg.model, t));
    QmarinaCircuit q = synthesize_qmarina(r.exact, cfg.model.excited_emitter);
    Circuit compiled = transpile(q.circuit, cfg.backend.spec, cfg.backend.transpile, &r.report);
    const int rc = cfg.mitigation.rc_randomizations;
    for (int lambda : job.lambdas) {
        Circuit amplified = nox_amplify(compiled, lambda);
        std::vector<Circuit> circuits;
        if (rc > 0) {
            circuits = randomize_compile(amplified, rc,
                                         derive_seed(cfg.seed, {step, (uint64_t)lambda, cfg.mitigation.seed, 7}),
                                         cfg.backend.spec);
        } else {
            circuits.push_back(std::move(amplified));
        }
        Counts merged;
        merged.width = compiled.width;
        const uint64_t nc = circuits.size();
        for (uint64_t k = 0; k < nc; k++) {
            uint64_t shots = cfg.shots / nc + (k < cfg.shots % nc ? 1 : 0);
            if (shots == 0) {
                continue;
            }
            merged.merge(apply_noisy(circuits[k], *job.noise, shots, derive_seed(cfg.seed, {step, (uint64_t)lambda, k})));
        }
        r.by_lambda[lambda] = std::move(merged);
    }
    r.raw = r.by_lambda.at(job.lambdas[0]);
    const std::vector<Role> roles = q.circuit.roles;
    std::vector<const Counts *> ptrs;
    for (int l : job.lambdas) {
        ptrs.push_back(&r.by_lambda.at(l));
    }
    Estimate e = estimate_step(job.lambdas, ptrs, roles, cfg.mitigation, cfg.model.excited_emitter);
    r.mitigated = e.pops;
    r.nox_clipped = e.clipped;
    r.discard_fraction = e.discard;
    r.shots_kept = e.kept;
    r.empty = !e.pops.has_value();
    r.raw_hellinger = hellinger(empirical_distribution(r.raw), embed_populations(r.exact, roles));
    if (r.mitigated) {
        r.mitigated_hellinger = hellinger(*r.mitigated, r.exact);
    }
    return r;
}

}  // namespace

std::vector<double> TimeGrid::times() const {
    std::vector<double> out(n_steps);
    for (int i = 0; i < n_steps; i++) {
        out[i] = t_start + (t_max - t_start) * i / (double)(n_steps - 1);
    }
    return out;
}

void RunConfig::validate() const {
    if (schema_version != kSchemaVersion) {
        throw std::invalid_argument("unsupported schema_version " + std::to_string(schema_version));
    }
    model.validate();
    if (time.n_steps < 2) {
        throw std::invalid_argument("time grid needs n_steps >= 2");
    }
    if (!(time.t_max > time.t_start) || time.t_start < 0) {
        throw std::invalid_argument("time grid needs 0 <= t_start < t_max");
    }
    if (shots < 1) {
        throw std::invalid_argument("shots must be >= 1");
    }
    if (jobs < 1) {
        throw std::invalid_argument("jobs must be >= 1");
    }
    backend.spec.validate(model.n_emitters + 1);
    effective_noise().validate();
    if (!effective_noise().is_noiseless() && model.n_emitters + 1 > 10) {
        throw std::invalid_argument("noisy runs support at most 9 emitters");
    }
    mitigation.validate();
    if (mitigation.average_identical.count(model.excited_emitter)) {
        throw std::invalid_argument("identical-emitter set must not contain the excited emitter");
    }
    for (int e : mitigation.average_identical) {
        if (e > model.n_emitters) {
            throw std::invalid_argument("identical emitter index out of range");
        }
    }
    const TranspileOptions &o = backend.transpile;
    if (o.mirror && !o.use_zz) {
        throw std::invalid_argument("mirroring requires ZZ/MS block compilation (use_zz)");
    }
    if (o.use_zz && backend.spec.native_two_qubit == GateKind::CZ) {
        throw std::invalid_argument("block compilation requires an MS_XX or ZZ native gate");
    }
    if (o.route != (backend.spec.connectivity == Connectivity::LinearChain) && o.lower) {
        throw std::invalid_argument("routing must be enabled exactly when connectivity is linear");
    }
    if (o.mirror && o.route) {
        throw std::invalid_argument("mirroring is not supported together with routing");
    }
    if (analysis.bootstrap_replicates < 1 || !(analysis.ci_level > 0 && analysis.ci_level < 1)) {
        throw std::invalid_argument("invalid bootstrap settings");
    }
}

NoiseModel RunConfig::effective_noise() const {
    NoiseModel n = backend.noise;
    if (backend.fidelity_table.empty()) {
        return n;
    }
    FidelityTable table;
    const std::string &name = backend.fidelity_table;
    if (name.rfind("qscout-run", 0) == 0 && name.size() == 11) {
        table = FidelityTable::qscout_run(name.back() - '0');
    } else {
        table = FidelityTable::load(name);
    }
    NoiseModel from = noise_from_fidelity(table);
    n.depol_1q = from.depol_1q;
    n.depol_2q = from.depol_2q;
    n.depol_2q_pair = from.depol_2q_pair;
    return n;
}

std::string RunConfig::to_json(bool pretty) const {
    return config_json(*this).dump(pretty ? 2 : -1);
}

RunConfig RunConfig::from_json(const std::string &text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error &e) {
        throw std::invalid_argument(std::string("config is not valid JSON: ") + e.what());
    }
    RunConfig c;
    try {
        c.schema_version = j.value("schema_version", kSchemaVersion);
        if (c.schema_version != kSchemaVersion) {
            throw std::invalid_argument("unsupported schema_version " + std::to_string(c.schema_version));
        }
        if (j.contains("base_preset")) {
            c = RunConfig::preset(j.at("base_preset").get<std::string>());
        }
        c.variant = j.value("variant", c.variant);
        if (j.contains("model")) {
            const json &m = j.at("model");
            c.model.n_emitters = m.at("n_emitters").get<int>();
            c.model.couplings = m.at("couplings").get<std::vector<double>>();
            c.model.kappa = m.at("kappa").get<double>();
            c.model.cavity_freq = m.value("cavity_freq", 0.0);
            c.model.emitter_freqs =
                m.value("emitter_freqs", std::vector<double>(c.model.n_emitters, c.model.cavity_freq));
            c.model.excited_emitter = m.value("excited_emitter", 1);
        }
        if (j.contains("time")) {
            const json &t = j.at("time");
            c.time.t_start = t.value("t_start", c.time.t_start);
            c.time.t_max = t.value("t_max", c.time.t_max);
            c.time.n_steps = t.value("n_steps", c.time.n_steps);
        }
        c.shots = j.value("shots", c.shots);
        if (j.contains("backend")) {
            const json &b = j.at("backend");
            if (b.contains("native_two_qubit")) {
                c.backend.spec.native_two_qubit = kind_from(b.at("native_two_qubit").get<std::string>());
            }
            if (b.contains("native_single_qubit")) {
                c.backend.spec.native_single_qubit.clear();
                for (const json &k : b.at("native_single_qubit")) {
                    c.backend.spec.native_single_qubit.push_back(kind_from(k.get<std::string>()));
                }
            }
            if (b.contains("connectivity")) {
                c.backend.spec.connectivity = parse_connectivity(b.at("connectivity").get<std::string>());
            }
            c.backend.spec.chain = b.value("chain", c.backend.spec.chain);
            if (b.contains("transpile")) {
                const json &o = b.at("transpile");
                c.backend.transpile.use_zz = o.value("use_zz", c.backend.transpile.use_zz);
                c.backend.transpile.mirror = o.value("mirror", c.backend.transpile.mirror);
                c.backend.transpile.route = o.value("route", c.backend.transpile.route);
                c.backend.transpile.lower = o.value("lower", c.backend.transpile.lower);
            }
            if (b.contains("noise")) {
                c.backend.noise = noise_from_json(b.at("noise"));
            }
            c.backend.fidelity_table = b.value("fidelity_table", c.backend.fidelity_table);
        }
        if (j.contains("mitigation")) {
            const json &m = j.at("mitigation");
            c.mitigation.postselect = m.value("postselect", c.mitigation.postselect);
            if (m.contains("average_identical")) {
                auto ident = m.at("average_identical").get<std::vector<int>>();
                c.mitigation.average_identical = std::set<int>(ident.begin(), ident.end());
            }
            c.mitigation.rc_randomizations = m.value("rc_randomizations", c.mitigation.rc_randomizations);
            c.mitigation.nox_factors = m.value("nox_factors", c.mitigation.nox_factors);
            c.mitigation.seed = m.value("seed", c.mitigation.seed);
        }
        if (j.contains("analysis")) {
            const json &a = j.at("analysis");
            c.analysis.bootstrap_replicates = a.value("bootstrap_replicates", c.analysis.bootstrap_replicates);
            c.analysis.ci_level = a.value("ci_level", c.analysis.ci_level);
        }
        c.seed = j.value("seed", c.seed);
        c.output_dir = j.value("output_dir", c.output_dir);
        c.jobs = j.value("jobs", c.jobs);
    } catch (const json::exception &e) {
        throw std::invalid_argument(std::string("malformed config: ") + e.what());
    }
    c.validate();
    return c;
}

RunConfig RunConfig::load(const std::string &path) {
    return from_json(read_file(path));
}

std::string RunConfig::hash() const {
    return sha256_hex(to_json(false));
}

std::vector<std::string> RunConfig::preset_names() {
    return {"ideal",   "qscout-manual-ms", "qscout-zz", "qscout-zz-mirror", "qscout-zz-rc",
            "aqt-raw", "aqt-rc40",         "aqt-rc80",  "aqt-rc40-nox"};
}

RunConfig RunConfig::preset(const std::string &variant) {
    RunConfig c;
    c.variant = variant;
    c.model = TCParams::identical(3, 4, 2, 1);
    c.mitigation.average_identical = {2, 3};
    c.seed = 1;
    if (variant == "ideal") {
        c.backend.spec = GateSetSpec::ion();
        return c;
    }
    if (variant.rfind("qscout-", 0) == 0) {
        c.shots = 2000;
        c.backend.noise = NoiseModel::ion(0);
        c.backend.fidelity_table = "qscout-run0";
        if (variant == "qscout-manual-ms") {
            c.backend.spec = GateSetSpec::ion();
            return c;
        }
        c.backend.spec = GateSetSpec::ion_zz();
        c.backend.transpile.use_zz = true;
        if (variant == "qscout-zz") {
            return c;
        }
        if (variant == "qscout-zz-mirror") {
            c.backend.transpile.mirror = true;
            return c;
        }
        if (variant == "qscout-zz-rc") {
            c.mitigation.rc_randomizations = 10;
            return c;
        }
    }
    if (variant.rfind("aqt-", 0) == 0) {
        c.shots = 20000;
        c.backend.spec = GateSetSpec::superconducting();
        c.backend.transpile.route = true;
        c.backend.noise = NoiseModel::superconducting();
        if (variant == "aqt-raw") {
            return c;
        }
        if (variant == "aqt-rc40") {
            c.mitigation.rc_randomizations = 40;
            return c;
        }
        if (variant == "aqt-rc80") {
            c.mitigation.rc_randomizations = 80;
            return c;
        }
        if (variant == "aqt-rc40-nox") {
            c.mitigation.rc_randomizations = 40;
            c.mitigation.nox_factors = {1, 3, 5, 7, 9};
            return c;
        }
    }
    throw std::invalid_argument("unknown variant '" + variant + "'");
}

std::string RunSummary::to_json() const {
    json j = {{"variant", variant},
              {"config_hash", config_hash},
              {"seed", seed},
              {"version", version},
              {"n_emitters", n_emitters},
              {"n_steps", n_steps},
              {"t_start", t_start},
              {"t_max", t_max},
              {"shots", shots},
              {"mhd_raw", mhd_raw},
              {"ci_raw", interval_json(ci_raw)},
              {"mhd_mitigated", mhd_mitigated},
              {"ci_mitigated", interval_json(ci_mitigated)},
              {"excluded_steps", excluded_steps},
              {"mean_discard_fraction", mean_discard_fraction},
              {"total_entangling_angle", total_entangling_angle},
              {"unmirrored_angle", unmirrored_angle},
              {"mirror_reduction_percent", mirror_reduction_percent()},
              {"mirrored_blocks", mirrored_blocks},
              {"improved_before", improved_before},
              {"improved_after", improved_after},
              {"swaps_inserted", swaps_inserted},
              {"two_qubit_gates", two_qubit_gates},
              {"nox_clipped_steps", nox_clipped_steps},
              {"exact_peak", exact_peak},
              {"mitigated_peak", mitigated_peak},
              {"exact_peak_bin", exact_peak_bin},
              {"mitigated_peak_bin", mitigated_peak_bin},
              {"bin_width", bin_width},
              {"rabi_frequency", rabi_frequency},
              {"units",
               {{"rates", "rad/ns"},
                {"frequencies", "cycles/ns"},
                {"fidelity_conversion", "depolarizing p = (1 - F) d / (d - 1), average gate fidelity"}}}};
    return j.dump(2);
}

RunSummary RunSummary::from_json(const std::string &text) {
    json j = json::parse(text);
    RunSummary s;
    s.variant = j.at("variant").get<std::string>();
    s.config_hash = j.at("config_hash").get<std::string>();
    s.seed = j.at("seed").get<uint64_t>();
    s.version = j.at("version").get<std::string>();
    s.n_emitters = j.at("n_emitters").get<int>();
    s.n_steps = j.at("n_steps").get<int>();
    s.t_start = j.at("t_start").get<double>();
    s.t_max = j.at("t_max").get<double>();
    s.shots = j.at("shots").get<uint64_t>();
    s.mhd_raw = j.at("mhd_raw").get<double>();
    s.ci_raw = interval_from(j.at("ci_raw"));
    s.mhd_mitigated = j.at("mhd_mitigated").get<double>();
    s.ci_mitigated = interval_from(j.at("ci_mitigated"));
    s.excluded_steps = j.at("excluded_steps").get<int>();
    s.mean_discard_fraction = j.at("mean_discard_fraction").get<double>();
    s.total_entangling_angle = j.at("total_entangling_angle").get<double>();
    s.unmirrored_angle = j.at("unmirrored_angle").get<double>();
    s.mirrored_blocks = j.at("mirrored_blocks").get<int>();
    s.improved_before = j.at("improved_before").get<double>();
    s.improved_after = j.at("improved_after").get<double>();
    s.swaps_inserted = j.at("swaps_inserted").get<int>();
    s.two_qubit_gates = j.at("two_qubit_gates").get<int>();
    s.nox_clipped_steps = j.at("nox_clipped_steps").get<int>();
    s.exact_peak = j.at("exact_peak").get<double>();
    s.mitigated_peak = j.at("mitigated_peak").get<double>();
    s.exact_peak_bin = j.at("exact_peak_bin").get<int>();
    s.mitigated_peak_bin = j.at("mitigated_peak_bin").get<int>();
    s.bin_width = j.at("bin_width").get<double>();
    s.rabi_frequency = j.at("rabi_frequency").get<double>();
    return s;
}

double RunSummary::mirror_reduction_percent() const {
    if (unmirrored_angle <= 0) {
        return 0;
    }
    return 100 * (1 - total_entangling_angle / unmirrored_angle);
}

RunResult run_experiment(const RunConfig &config) {
    config.validate();
    const auto start = std::chrono::steady_clock::now();
    const NoiseModel noise = config.effective_noise();
    StepJob job{&config, &noise, {}};
    job.lambdas = config.mitigation.uses_nox() ? config.mitigation.nox_factors : std::vector<int>{1};

    const std::vector<double> times = config.time.times();
    RunResult result;
    result.config = config;
    result.steps.resize(times.size());
    std::atomic<size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (size_t i = next++; i < times.size(); i = next++) {
            try {
                result.steps[i] = run_step(job, i, times[i]);
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) {
                    failure = std::current_exception();
                }
                next = times.size();
            }
        }
    };
    const int threads = std::min<int>(config.jobs, (int)times.size());
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int k = 0; k < threads; k++) {
            pool.emplace_back(worker);
        }
        for (std::thread &t : pool) {
            t.join();
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }

    RunSummary &s = result.summary;
    s.variant = config.variant;
    s.config_hash = config.hash();
    s.seed = config.seed;
    s.n_emitters = config.model.n_emitters;
    s.n_steps = config.time.n_steps;
    s.t_start = config.time.t_start;
    s.t_max = config.time.t_max;
    s.shots = config.shots;

    const std::vector<Role> roles = standard_roles(config.model.n_emitters);
    const size_t S = result.steps.size();
    double raw_sum = 0, mit_sum = 0, discard_sum = 0;
    int kept_steps = 0;
    for (const StepResult &r : result.steps) {
        raw_sum += r.raw_hellinger;
        discard_sum += r.discard_fraction;
        if (r.mitigated_hellinger) {
            mit_sum += *r.mitigated_hellinger;
            kept_steps++;
        } else {
            s.excluded_steps++;
        }
        if (r.nox_clipped) {
            s.nox_clipped_steps++;
        }
        s.total_entangling_angle += r.report.total_entangling_angle;
        s.unmirrored_angle += r.report.unmirrored_angle;
        s.mirrored_blocks += r.report.mirrored_blocks;
        s.improved_before += r.report.improved_before;
        s.improved_after += r.report.improved_after;
        s.swaps_inserted += r.report.swaps_inserted;
        s.two_qubit_gates += r.report.two_qubit_gates;
    }
    s.mhd_raw = raw_sum / (double)S;
    s.mhd_mitigated = kept_steps ? mit_sum / kept_steps : std::numeric_limits<double>::quiet_NaN();
    s.mean_discard_fraction = discard_sum / (double)S;

    // Bootstrap intervals, resampling shots within each step.
    std::vector<PopulationDistribution> exact;
    std::vector<std::vector<double>> exact_embedded;
    std::vector<Counts> raw_counts;
    for (const StepResult &r : result.steps) {
        exact.push_back(r.exact);
        exact_embedded.push_back(embed_populations(r.exact, roles));
        raw_counts.push_back(r.raw);
    }
    CountsStatistic raw_stat = [&](std::span<const Counts> d) {
        double total = 0;
        for (size_t i = 0; i < d.size(); i++) {
            total += hellinger(empirical_distribution(d[i]), exact_embedded[i]);
        }
        return total / (double)d.size();
    };
    s.ci_raw = bootstrap_ci(raw_counts, raw_stat, config.analysis.bootstrap_replicates, config.analysis.ci_level,
                            derive_seed(config.seed, {0xB0, 0}));

    const std::vector<int> &lambdas = job.lambdas;
    std::vector<Counts> all_counts;  // index = lambda_index * S + step
    for (int l : lambdas) {
        for (const StepResult &r : result.steps) {
            all_counts.push_back(r.by_lambda.at(l));
        }
    }
    CountsStatistic mit_stat = [&](std::span<const Counts> d) {
        double total = 0;
        int used = 0;
        for (size_t i = 0; i < S; i++) {
            std::vector<const Counts *> ptrs;
            for (size_t k = 0; k < lambdas.size(); k++) {
                ptrs.push_back(&d[k * S + i]);
            }
            Estimate e = estimate_step(lambdas, ptrs, roles, config.mitigation, config.model.excited_emitter);
            if (e.pops) {
                total += hellinger(*e.pops, exact[i]);
                used++;
            }
        }
        return used ? total / used : std::numeric_limits<double>::quiet_NaN();
    };
    if (kept_steps) {
        s.ci_mitigated = bootstrap_ci(all_counts, mit_stat, config.analysis.bootstrap_replicates,
                                      config.analysis.ci_level, derive_seed(config.seed, {0xB0, 1}));
    } else {
        double nan = std::numeric_limits<double>::quiet_NaN();
        s.ci_mitigated = {nan, nan, nan};
    }

    // Spectra of the exact and mitigated series.
    TimeSeries exact_series{times, exact};
    TimeSeries mit_series;
    mit_series.times = times;
    for (const StepResult &r : result.steps) {
        if (r.mitigated) {
            mit_series.pops.push_back(*r.mitigated);
        } else {
            mit_series.pops.push_back(marginal_populations(r.raw, roles).value_or(r.exact));
        }
    }
    result.exact_spectrum = fft_spectrum(exact_series);
    result.mitigated_spectrum = fft_spectrum(mit_series);
    const size_t channel = config.model.excited_emitter - 1;
    s.bin_width = result.exact_spectrum.bin_width();
    try {
        s.exact_peak_bin = (int)rabi_peak_bin(result.exact_spectrum, channel);
        s.exact_peak = result.exact_spectrum.frequencies[s.exact_peak_bin];
    } catch (const std::invalid_argument &) {
        s.exact_peak_bin = -1;
    }
    try {
        s.mitigated_peak_bin = (int)rabi_peak_bin(result.mitigated_spectrum, channel);
        s.mitigated_peak = result.mitigated_spectrum.frequencies[s.mitigated_peak_bin];
    } catch (const std::invalid_argument &) {
        s.mitigated_peak_bin = -1;
    }
    try {
        s.rabi_frequency = rabi_frequency(config.model) / (2 * std::numbers::pi);
    } catch (const std::domain_error &) {
        s.rabi_frequency = std::numeric_limits<double>::quiet_NaN();
    }
    result.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

std::string exact_csv(const TCParams &params, const TimeGrid &grid) {
    std::ostringstream out;
    out << "t";
    for (int i = 1; i <= params.n_emitters; i++) {
        out << ",p_e" << i;
    }
    out << ",p_cav_env\n";
    for (double t : grid.times()) {
        PopulationDistribution p = populations(evolve_single_excitation(params, t));
        out << num(t);
        for (double v : p.p_emitters) {
            out << "," << num(v);
        }
        out << "," << num(p.p_cav_env) << "\n";
    }
    return out.str();
}

void persist(const RunResult &result, const std::string &dir) {
    const RunConfig &cfg = result.config;
    const int n = cfg.model.n_emitters;
    fs::path target(dir);
    fs::path tmp = target;
    tmp += ".tmp";
    std::error_code ec;
    fs::remove_all(tmp, ec);
    fs::create_directories(tmp);

    write_file(tmp / "config.json", cfg.to_json(true) + "\n");

    std::ostringstream steps;
    steps << "t";
    for (int i = 1; i <= n; i++) {
        steps << ",p_e" << i;
    }
    steps << ",p_cav_env,discard_fraction,shots_kept\n";
    for (const StepResult &r : result.steps) {
        steps << num(r.t);
        if (r.mitigated) {
            for (double v : r.mitigated->p_emitters) {
                steps << "," << num(v);
            }
            steps << "," << num(r.mitigated->p_cav_env);
        } else {
            for (int i = 0; i <= n; i++) {
                steps << ",nan";
            }
        }
        steps << "," << num(r.discard_fraction) << "," << r.shots_kept << "\n";
    }
    write_file(tmp / "steps.csv", steps.str());
    write_file(tmp / "exact.csv", exact_csv(cfg.model, cfg.time));

    std::ostringstream counts;
    counts << "step,t,lambda,bitstring,count\n";
    for (size_t i = 0; i < result.steps.size(); i++) {
        const StepResult &r = result.steps[i];
        for (const auto &[lambda, c] : r.by_lambda) {
            for (const auto &[k, v] : c.histogram) {
                counts << i << "," << num(r.t) << "," << lambda << "," << bitstring(k, c.width) << "," << v << "\n";
            }
        }
    }
    write_file(tmp / "counts.csv", counts.str());

    std::ostringstream comp;
    comp << "step,t,two_qubit_gates,total_entangling_angle,unmirrored_angle,mirrored_blocks,swaps_inserted,census\n";
    for (size_t i = 0; i < result.steps.size(); i++) {
        const StepResult &r = result.steps[i];
        comp << i << "," << num(r.t) << "," << r.report.two_qubit_gates << "," << num(r.report.total_entangling_angle)
             << "," << num(r.report.unmirrored_angle) << "," << r.report.mirrored_blocks << ","
             << r.report.swaps_inserted << ",";
        bool first = true;
        for (const auto &[k, v] : r.report.census) {
            comp << (first ? "" : " ") << k << ":" << v;
            first = false;
        }
        comp << "\n";
    }
    write_file(tmp / "compilation.csv", comp.str());

    std::ostringstream spec;
    spec << "frequency,channel,value\n";
    auto dump = [&](const Spectrum &sp, const std::string &prefix) {
        for (size_t c = 0; c < sp.channels.size(); c++) {
            for (size_t k = 0; k < sp.frequencies.size(); k++) {
                spec << num(sp.frequencies[k]) << "," << prefix << sp.channels[c] << "," << num(sp.amplitudes[c][k])
                     << "\n";
            }
        }
    };
    dump(result.exact_spectrum, "exact_");
    dump(result.mitigated_spectrum, "mitigated_");
    write_file(tmp / "spectrum.csv", spec.str());

    write_file(tmp / "summary.json", result.summary.to_json() + "\n");

    std::ostringstream log;
    log << "variant " << cfg.variant << "\nseed " << cfg.seed << "\njobs " << cfg.jobs << "\nwall_seconds "
        << result.wall_seconds << "\n";
    write_file(tmp / "run.log", log.str());

    if (fs::exists(target)) {
        fs::remove_all(target);
    }
    if (target.has_parent_path()) {
        fs::create_directories(target.parent_path());
    }
    fs::rename(tmp, target);
}

RunSummary load_summary(const std::string &dir) {
    return RunSummary::from_json(read_file((fs::path(dir) / "summary.json").string()));
}

bool verify_provenance(const std::string &dir) {
    RunSummary s = load_summary(dir);
    RunConfig c = RunConfig::load((fs::path(dir) / "config.json").string());
    return c.hash() == s.config_hash;
}

std::vector<ComparisonRow> compare_variants(const std::vector<RunSummary> &runs) {
    std::vector<ComparisonRow> rows;
    for (const RunSummary &s : runs) {
        const RunSummary &f = runs.front();
        if (s.n_emitters != f.n_emitters || s.n_steps != f.n_steps || std::abs(s.t_start - f.t_start) > 1e-12 ||
            std::abs(s.t_max - f.t_max) > 1e-12) {
            throw std::invalid_argument("compare_variants: runs use different models or time grids");
        }
        rows.push_back({s.variant, s.mhd_raw, s.mhd_mitigated, s.ci_mitigated, s.mean_discard_fraction,
                        s.total_entangling_angle});
    }
    return rows;
}

std::string format_comparison(const std::vector<ComparisonRow> &rows) {
    std::ostringstream out;
    char buf[256];
    std::snprintf(buf, sizeof buf, "%-20s %10s %10s %23s %9s %12s\n", "variant", "mhd_raw", "mhd_post", "ci_post",
                  "discard", "total_angle");
    out << buf;
    for (const ComparisonRow &r : rows) {
        std::snprintf(buf, sizeof buf, "%-20s %10.5f %10.5f [%10.5f, %10.5f] %9.4f %12.4f\n", r.variant.c_str(),
                      r.mhd_raw, r.mhd_mitigated, r.ci_mitigated.lo, r.ci_mitigated.hi, r.mean_discard_fraction,
                      r.total_entangling_angle);
        out << buf;
    }
    return out.str();
}

}  // namespace cqed
