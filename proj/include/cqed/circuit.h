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

#ifndef CQED_CIRCUIT_H
#define CQED_CIRCUIT_H

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "cqed/gates.h"
#include "cqed/model.h"

namespace cqed {

/// What a logical qubit represents in the simulated system.
struct Role {
    enum class Kind { CavityEnv, Emitter };
    Kind kind = Kind::CavityEnv;
    /// 1-based emitter index; unused for the cavity/environment qubit.
    int emitter = 0;

    static Role cavity_env() {
        return {Kind::CavityEnv, 0};
    }
    static Role emitter_qubit(int i) {
        return {Kind::Emitter, i};
    }
    std::string str() const;
    static Role parse(const std::string &s);
    bool operator==(const Role &) const = default;
};

/// Ordered gate list over `width` wires.
///
/// Wires are physical; logical qubits are what the output distribution is
/// indexed by. `initial_layout[w]` is the logical qubit held by wire w before the
/// first gate and `readout[w]` the logical qubit held by wire w after the last
/// gate (SWAP routing and mirroring move logical qubits between wires). Both are
/// the identity for freshly synthesized circuits. `roles[l]` is the role of
/// logical qubit l and may be empty for circuits that don't model a system.
///
/// Bit ordering: logical qubit 0 is the least significant bit of every basis
/// index and the rightmost character of every bitstring.
struct Circuit {
    int width = 0;
    std::vector<Gate> gates;
    std::vector<Role> roles;
    std::vector<int> initial_layout;
    std::vector<int> readout;

    Circuit() = default;
    explicit Circuit(int width);

    void append(const Gate &g);
    void validate() const;
    int two_qubit_gate_count() const;
    int count(GateKind kind) const;
    /// Role of the logical qubit sitting on each wire at the end of the circuit.
    std::vector<Role> final_wire_roles() const;
    /// Logical qubit index with the given role, or -1.
    int logical_with_role(const Role &r) const;
    bool operator==(const Circuit &) const = default;
};

/// Shot histogram keyed by logical basis index.
struct Counts {
    int width = 0;
    std::map<uint64_t, uint64_t> histogram;
    uint64_t total = 0;

    void add(uint64_t outcome, uint64_t n);
    void merge(const Counts &other);
    uint64_t get(uint64_t outcome) const;
    /// Counts keyed by bitstring (qubit width-1 leftmost).
    std::map<std::string, uint64_t> by_bitstring() const;
    static Counts from_bitstrings(const std::map<std::string, uint64_t> &m);
    bool operator==(const Counts &) const = default;
};

std::string bitstring(uint64_t index, int width);
uint64_t parse_bitstring(const std::string &s);

struct QmarinaCircuit {
    Circuit circuit;
    /// Rotation angles in interaction order: the excited emitter first, then the
    /// remaining emitters in increasing index.
    std::vector<double> angles;
    /// Emitter index of each interaction, same order as `angles`.
    std::vector<int> interaction_order;
};

/// Builds the 2N+1 gate circuit whose ideal output reproduces `target` on the
/// Hamming-weight-1 subspace. Logical qubit 0 is the cavity/environment, qubit i
/// is emitter i.
QmarinaCircuit synthesize_qmarina(const PopulationDistribution &target, int excited);

/// Amplitudes over physical wire basis states starting from |0...0>.
Eigen::VectorXcd statevector(const Circuit &circuit);

/// Exact output probabilities indexed by logical basis index.
std::vector<double> simulate_statevector(const Circuit &circuit);

/// Reorders a distribution over physical wire states into logical indices.
std::vector<double> physical_to_logical(std::span<const double> probs, const std::vector<int> &readout);

Counts sample_counts(const Circuit &circuit, uint64_t shots, uint64_t seed);
Counts sample_distribution(std::span<const double> probs, int width, uint64_t shots, uint64_t seed);

/// Product of the gate matrices on physical wires. Width must be <= 10.
Eigen::MatrixXcd unitary_of(const Circuit &circuit);

/// Unitary expressed on logical qubits: readout permutation * U * inverse initial layout.
Eigen::MatrixXcd logical_unitary(const Circuit &circuit);

/// Applies a gate's matrix in place to a statevector over `width` wires.
void apply_gate(Eigen::VectorXcd &state, const Gate &g, const Eigen::MatrixXcd &m);

/// Text form:
///   cqedsim-circuit 1
///   width 4
///   roles cav e1 e2 e3
///   layout 0 1 2 3
///   readout 0 1 2 3
///   X 1
///   CRY 1,0,2.0943951023931957
/// One gate per line as `KIND q0[,q1][,angle...]`, angles in radians printed
/// with 17 significant digits.
void write_circuit(std::ostream &out, const Circuit &circuit);
std::string circuit_to_string(const Circuit &circuit);
Circuit read_circuit(std::istream &in);
Circuit circuit_from_string(const std::string &text);

}  // namespace cqed

#endif
