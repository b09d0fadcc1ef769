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

#ifndef CQED_TRANSPILER_H
#define CQED_TRANSPILER_H

#include <map>
#include <string>
#include <vector>

#include "cqed/circuit.h"
#include "cqed/kak.h"

namespace cqed {

enum class Connectivity { AllToAll, LinearChain };

/// Native gates and coupling map of a target device.
struct GateSetSpec {
    GateKind native_two_qubit = GateKind::MS_XX;  // MS_XX, ZZ or CZ
    std::vector<GateKind> native_single_qubit{GateKind::U1q, GateKind::RX, GateKind::RY, GateKind::RZ};
    Connectivity connectivity = Connectivity::AllToAll;
    /// For LinearChain: chain[k] is the wire at position k. Empty means 0..width-1.
    std::vector<int> chain;

    bool allows(GateKind kind) const;
    /// Chain order for a circuit of the given width.
    std::vector<int> chain_for(int width) const;
    void validate(int width) const;

    /// Trapped-ion profile: arbitrary-angle MS_XX, all-to-all.
    static GateSetSpec ion();
    /// Trapped-ion profile with arbitrary-angle ZZ as the entangler.
    static GateSetSpec ion_zz();
    /// Superconducting profile: CZ on a linear chain.
    static GateSetSpec superconducting();
};

std::string_view connectivity_name(Connectivity c);
Connectivity parse_connectivity(std::string_view s);

struct TranspileOptions {
    /// Compile two-qubit blocks through the canonical decomposition instead of
    /// the fixed CRY/CNOT rules. Requires an arbitrary-angle native (MS_XX or ZZ).
    bool use_zz = false;
    /// Choose per block between U and SWAP*U (requires use_zz).
    bool mirror = false;
    /// Route onto the linear chain (requires LinearChain connectivity).
    bool route = false;
    /// Lower to native gates and merge single-qubit runs.
    bool lower = true;
};

/// Structured per-circuit compilation record.
struct CompilationReport {
    std::map<std::string, int> census;
    int two_qubit_gates = 0;
    /// Sum over two-qubit gates of the entangling angle: |theta| for ZZ/MS,
    /// otherwise 2 (tx + ty + |tz|) of the gate's canonical class.
    double total_entangling_angle = 0;
    int swaps_inserted = 0;
    int blocks = 0;
    int mirrored_blocks = 0;
    /// Total entangling angle the block compilation would have had without mirroring.
    double unmirrored_angle = 0;
    /// Summed entangling angle of the mirrored blocks, before and after mirroring.
    double improved_before = 0;
    double improved_after = 0;
};

/// Entangling angle of a single two-qubit gate.
double entangling_angle(const Gate &g);
/// Total entangling angle of all two-qubit gates in a circuit.
double total_entangling_angle(const Circuit &c);

/// RY_t(theta/2), CNOT, RY_t(-theta/2), CNOT.
std::vector<Gate> decompose_cry(const Gate &g);
/// Exactly one MS_XX(pi/2) plus single-qubit rotations.
std::vector<Gate> cnot_to_msxx(const Gate &g);
/// H on the target around a CZ.
std::vector<Gate> cnot_to_cz(const Gate &g);
/// Three CNOTs, each lowered to CZ.
std::vector<Gate> swap_to_cz(const Gate &g);

/// Compiles a two-qubit unitary on wires (a, b) into at most three native
/// entanglers (ZZ or MS_XX), one per nonzero canonical coordinate, wrapped in
/// single-qubit gates. `u` is indexed by 2 * bit(a) + bit(b).
std::vector<Gate> block_to_native(const Mat4 &u, int a, int b, GateKind native = GateKind::ZZ);
inline std::vector<Gate> block_to_zz(const Mat4 &u, int a, int b) {
    return block_to_native(u, a, b, GateKind::ZZ);
}

struct MirrorChoice {
    std::vector<Gate> gates;
    bool mirrored = false;
    double angle = 0;
    double unmirrored_angle = 0;
};

/// Compiles either u or SWAP*u, whichever has the smaller total entangling
/// angle. When mirrored, the logical qubits on a and b are exchanged afterwards.
MirrorChoice mirror_swap_choice(const Mat4 &u, int a, int b, GateKind native = GateKind::ZZ);

/// Places the cavity/environment hub at chain position 1 and its first partner
/// at position 0, then shuttles the hub along the chain with SWAPs. The input
/// must have identity layout and only two-qubit gates that touch the hub.
Circuit route_star_to_line(const Circuit &circuit, const GateSetSpec &spec, int *swaps_inserted = nullptr);

/// Fuses consecutive single-qubit gates per wire and re-expresses them in the
/// spec's single-qubit basis, dropping identities.
Circuit merge_single_qubit(const Circuit &circuit, const GateSetSpec &spec);

/// Full pass pipeline: route, lower two-qubit gates, merge single-qubit runs.
Circuit transpile(const Circuit &circuit, const GateSetSpec &spec, const TranspileOptions &options,
                  CompilationReport *report = nullptr);

/// Census and angle totals of an already-compiled circuit.
CompilationReport describe(const Circuit &circuit);

}  // namespace cqed

#endif
