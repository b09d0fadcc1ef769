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

#ifndef CQED_MITIGATION_H
#define CQED_MITIGATION_H

#include <map>
#include <optional>
#include <set>
#include <vector>

#include "cqed/circuit.h"
#include "cqed/transpiler.h"

namespace cqed {

struct MitigationConfig {
    bool postselect = true;
    /// Emitter indices (1-based) averaged together; must exclude the excited emitter.
    std::set<int> average_identical;
    /// 0 disables randomized compiling; otherwise in [2, 10000].
    int rc_randomizations = 0;
    /// Odd amplification factors; empty or {1} disables extrapolation.
    std::vector<int> nox_factors;
    uint64_t seed = 0;

    void validate() const;
    bool uses_nox() const {
        return nox_factors.size() >= 2;
    }
};

struct PostselectResult {
    Counts kept;
    uint64_t discarded = 0;
    double discard_fraction = 0;
    /// True when every shot was discarded; populations are then undefined.
    bool empty = false;
};

/// Keeps only Hamming-weight-1 outcomes.
PostselectResult postselect(const Counts &counts);

/// Populations from Hamming-weight-1 outcomes, renormalized over the retained
/// shots. `roles[l]` assigns logical qubit l to the cavity or an emitter.
/// Returns nullopt when no Hamming-weight-1 shots exist.
std::optional<PopulationDistribution> populations_from_counts(const Counts &counts, const std::vector<Role> &roles);

/// Per-qubit excitation marginals over all shots, normalized to sum to one.
/// Used as the population estimate when postselection is off.
std::optional<PopulationDistribution> marginal_populations(const Counts &counts, const std::vector<Role> &roles);

/// Replaces the listed emitters' populations by their mean.
PopulationDistribution average_identical_emitters(const PopulationDistribution &pops, const std::set<int> &identical,
                                                  int excited);

/// n logically equivalent circuits with a random Pauli frame around each
/// two-qubit gate. The frame after each gate is its conjugate through the gate,
/// so only Paulis mapped to Paulis by the gate are drawn. Frames are merged
/// into neighbouring single-qubit gates in the given gate set.
std::vector<Circuit> randomize_compile(const Circuit &circuit, int n, uint64_t seed,
                                       const GateSetSpec &spec = GateSetSpec::ion());

/// Replaces every two-qubit gate G by G (G^-1 G)^((lambda - 1) / 2).
Circuit nox_amplify(const Circuit &circuit, int lambda);

struct NoxEstimate {
    PopulationDistribution pops;
    bool clipped = false;
};

/// Least-squares line in lambda per population, evaluated at lambda = 0, then
/// clipped to [0, 1] and renormalized.
NoxEstimate nox_extrapolate_step(const std::map<int, PopulationDistribution> &by_lambda);

struct NoxResult {
    std::vector<PopulationDistribution> pops;
    std::vector<bool> clipped;
};

/// Per-step extrapolation over time series indexed by lambda.
NoxResult nox_extrapolate(const std::map<int, std::vector<PopulationDistribution>> &results);

}  // namespace cqed

#endif
