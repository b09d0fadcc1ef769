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

#ifndef CQED_NOISE_H
#define CQED_NOISE_H

#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "cqed/circuit.h"
#include "cqed/rng.h"

namespace cqed {

/// One row of a measured two-qubit gate fidelity table.
struct FidelityEntry {
    int a = 0, b = 0;
    std::string connectivity;
    double fidelity = 1;
    double plus = 0;
    double minus = 0;
};

struct FidelityTable {
    std::string name;
    double single_qubit_fidelity = 1;
    std::vector<FidelityEntry> pairs;

    void validate() const;

    /// Bare MS gate fidelities recorded on the trapped-ion device, runs 0..3.
    static FidelityTable qscout_run(int run);

    /// Text format, one pair per line:
    ///   # single_qubit_fidelity: 0.993
    ///   0-1 | nearest neighbor | 0.984 | 0.008 | 0.009
    /// Columns: pair, connectivity label, fidelity, +uncertainty, -uncertainty.
    static FidelityTable parse(std::istream &in);
    static FidelityTable load(const std::string &path);
    std::string to_text() const;
};

/// Gate-located error channels.
struct NoiseModel {
    /// Depolarizing probability after each single-qubit gate.
    double depol_1q = 0;
    /// Depolarizing probability after each two-qubit gate without a pair entry.
    double depol_2q = 0;
    /// Per-pair overrides keyed by (min wire, max wire).
    std::map<std::pair<int, int>, double> depol_2q_pair;
    /// Fractional over-rotation per gate kind: angle -> angle * (1 + eps); gates
    /// without an angle are raised to the power 1 + eps.
    std::map<GateKind, double> overrotation;
    /// Std. dev. of the angle jitter on MS_XX/ZZ gates per unit |angle|.
    double amplitude_noise = 0;
    /// Shot batches that each draw an independent jitter realization.
    int jitter_batches = 10;
    /// Readout bit-flip probability per qubit.
    double spam_flip = 0;
    uint64_t seed = 0;

    void validate() const;
    double depol_for_pair(int a, int b) const;
    void set_two_qubit_overrotation(double eps);
    bool is_noiseless() const;

    /// Trapped-ion profile calibrated from a fidelity table.
    static NoiseModel ion(int run = 0);
    /// Superconducting profile: coherent CZ over-rotation plus weak stochastic noise.
    static NoiseModel superconducting();
};

/// p = (1 - F) d / (d - 1), the depolarizing probability with average gate fidelity F.
double depolarizing_from_fidelity(double fidelity, int dim);

/// Converts a fidelity table into per-pair depolarizing probabilities. Pairs
/// absent from the table use the mean of the listed pairs.
NoiseModel noise_from_fidelity(const FidelityTable &table);

/// Density matrix over physical wires after running the circuit from |0...0>,
/// with one jitter realization drawn from `jitter` (may be null for none).
Eigen::MatrixXcd noisy_density_matrix(const Circuit &circuit, const NoiseModel &noise, Rng *jitter = nullptr);

/// Output distribution over logical basis states including readout flips.
std::vector<double> noisy_distribution(const Circuit &circuit, const NoiseModel &noise, Rng *jitter = nullptr);

/// Samples `shots` noisy outcomes. Deterministic in (circuit, noise, shots, seed);
/// a noiseless model follows the same seed path as sample_counts.
Counts apply_noisy(const Circuit &circuit, const NoiseModel &noise, uint64_t shots, uint64_t seed);

}  // namespace cqed

#endif
