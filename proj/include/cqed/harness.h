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

#ifndef CQED_HARNESS_H
#define CQED_HARNESS_H

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cqed/analysis.h"
#include "cqed/circuit.h"
#include "cqed/mitigation.h"
#include "cqed/model.h"
#include "cqed/noise.h"
#include "cqed/transpiler.h"

namespace cqed {

inline constexpr int kSchemaVersion = 1;
inline constexpr const char *kSoftwareVersion = "0.1.0";

/// Inclusive uniform grid: n_steps points from t_start to t_max.
struct TimeGrid {
    double t_start = 0;
    double t_max = 3;
    int n_steps = 51;

    std::vector<double> times() const;
};

struct BackendConfig {
    GateSetSpec spec;
    TranspileOptions transpile;
    NoiseModel noise;
    /// Optional fidelity table: "qscout-run0".."qscout-run3" or a file path.
    /// When set, its depolarizing rates replace those in `noise`.
    std::string fidelity_table;
};

struct AnalysisConfig {
    int bootstrap_replicates = 1000;
    double ci_level = 0.95;
};

/// Complete description of one time-sweep experiment.
///
/// `output_dir` and `jobs` control where and how the run executes; they are not
/// part of the stored config or its hash, so they never change numeric outputs.
struct RunConfig {
    int schema_version = kSchemaVersion;
    std::string variant = "custom";
    TCParams model = TCParams::identical(3, 4, 2, 1);
    TimeGrid time;
    uint64_t shots = 2000;
    BackendConfig backend;
    MitigationConfig mitigation;
    AnalysisConfig analysis;
    uint64_t seed = 0;
    std::string output_dir;
    int jobs = 1;

    void validate() const;
    /// Noise model with the fidelity table (if any) applied.
    NoiseModel effective_noise() const;

    /// JSON text of the experiment-defining fields.
    std::string to_json(bool pretty = true) const;
    static RunConfig from_json(const std::string &text);
    static RunConfig load(const std::string &path);
    /// SHA-256 (hex) of the compact JSON form.
    std::string hash() const;

    /// Named profiles: ideal, qscout-manual-ms, qscout-zz, qscout-zz-mirror,
    /// qscout-zz-rc, aqt-raw, aqt-rc40, aqt-rc80, aqt-rc40-nox.
    static RunConfig preset(const std::string &variant);
    static std::vector<std::string> preset_names();
};

struct StepResult {
    double t = 0;
    PopulationDistribution exact;
    /// Counts at the smallest amplification factor, merged over randomizations.
    Counts raw;
    /// Counts per amplification factor (a single entry without NOX).
    std::map<int, Counts> by_lambda;
    /// Final mitigated estimate; empty when every shot was discarded.
    std::optional<PopulationDistribution> mitigated;
    double discard_fraction = 0;
    uint64_t shots_kept = 0;
    bool empty = false;
    bool nox_clipped = false;
    CompilationReport report;
    double raw_hellinger = 0;
    std::optional<double> mitigated_hellinger;
};

/// Scalar record of a run; what `summary.json` holds.
struct RunSummary {
    std::string variant;
    std::string config_hash;
    uint64_t seed = 0;
    std::string version = kSoftwareVersion;
    int n_emitters = 0;
    int n_steps = 0;
    double t_start = 0, t_max = 0;
    uint64_t shots = 0;

    double mhd_raw = 0;
    Interval ci_raw;
    double mhd_mitigated = 0;
    Interval ci_mitigated;
    int excluded_steps = 0;
    double mean_discard_fraction = 0;

    double total_entangling_angle = 0;
    double unmirrored_angle = 0;
    int mirrored_blocks = 0;
    double improved_before = 0;
    double improved_after = 0;
    int swaps_inserted = 0;
    int two_qubit_gates = 0;
    int nox_clipped_steps = 0;

    double exact_peak = 0;
    double mitigated_peak = 0;
    int exact_peak_bin = 0;
    int mitigated_peak_bin = 0;
    double bin_width = 0;
    double rabi_frequency = 0;

    std::string to_json() const;
    static RunSummary from_json(const std::string &text);
    /// Percentage reduction of total entangling angle due to mirroring.
    double mirror_reduction_percent() const;
};

struct RunResult {
    RunConfig config;
    RunSummary summary;
    std::vector<StepResult> steps;
    Spectrum exact_spectrum;
    Spectrum mitigated_spectrum;
    double wall_seconds = 0;
};

/// Solve, synthesize, transpile, execute, mitigate and analyze every step.
RunResult run_experiment(const RunConfig &config);

/// Writes the run directory atomically (temp dir + rename).
void persist(const RunResult &result, const std::string &dir);

/// Reads summary.json and checks its config hash against config.json.
RunSummary load_summary(const std::string &dir);
bool verify_provenance(const std::string &dir);

/// Exact populations on the config's grid as CSV.
std::string exact_csv(const TCParams &params, const TimeGrid &grid);

struct ComparisonRow {
    std::string variant;
    double mhd_raw = 0;
    double mhd_mitigated = 0;
    Interval ci_mitigated;
    double mean_discard_fraction = 0;
    double total_entangling_angle = 0;
};

/// One row per run; all runs must share the model and time grid.
std::vector<ComparisonRow> compare_variants(const std::vector<RunSummary> &runs);
std::string format_comparison(const std::vector<ComparisonRow> &rows);

}  // namespace cqed

#endif
