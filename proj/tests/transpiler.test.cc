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

#include "cqed/transpiler.h"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace cqed;

namespace {

constexpr double kPi = std::numbers::pi;

Eigen::MatrixXcd unitary_of_gates(const std::vector<Gate> &gates, int width = 2) {
    Circuit c(width);
    for (const Gate &g : gates) {
        c.append(g);
    }
    return unitary_of(c);
}

Eigen::MatrixXcd unitary_of_gate(const Gate &g, int width = 2) {
    return unitary_of_gates({g}, width);
}

double max_diff(const std::vector<double> &a, const std::vector<double> &b) {
    double m = 0;
    for (size_t i = 0; i < a.size(); i++) {
        m = std::max(m, std::abs(a[i] - b[i]));
    }
    return m;
}

PopulationDistribution random_target(std::mt19937_64 &rng, int n) {
    std::gamma_distribution<double> g(1.0, 1.0);
    std::vector<double> v(n + 1);
    double s = 0;
    for (double &x : v) {
        x = g(rng);
        s += x;
    }
    for (double &x : v) {
        x /= s;
    }
    return PopulationDistribution::from_vector(v);
}

bool native_only(const Circuit &c, const GateSetSpec &spec) {
    for (const Gate &g : c.gates) {
        if (!spec.allows(g.kind)) {
            return false;
        }
    }
    return true;
}

QmarinaCircuit default_circuit(double t) {
    TCParams p = TCParams::identical(3, 4, 2, 1);
    return synthesize_qmarina(populations(evolve_single_excitation(p, t)), 1);
}

const TranspileOptions kManual{};
const TranspileOptions kZz{true, false, false, true};
const TranspileOptions kZzMirror{true, true, false, true};
const TranspileOptions kRouted{false, false, true, true};

}  // namespace

TEST(DecomposeCry, Identities) {
    for (double th : {0.0, kPi, 0.37, -2.1}) {
        Gate g = Gate::cry(0, 1, th);
        std::vector<Gate> seq = decompose_cry(g);
        EXPECT_EQ(seq.size(), 4u);
        int cnots = 0, rys = 0;
        for (const Gate &h : seq) {
            cnots += h.kind == GateKind::CNOT;
            rys += h.kind == GateKind::RY;
        }
        EXPECT_EQ(cnots, 2);
        EXPECT_EQ(rys, 2);
        EXPECT_LT(phase_insensitive_distance(unitary_of_gates(seq), unitary_of_gate(g)), 1e-10);
    }
    EXPECT_LT(phase_insensitive_distance(unitary_of_gates(decompose_cry(Gate::cry(1, 0, 0))),
                                         Eigen::MatrixXcd::Identity(4, 4)),
              1e-12);
    EXPECT_THROW(decompose_cry(Gate::cnot(0, 1)), std::invalid_argument);
}

TEST(DecomposeCry, ControlledY) {
    // CRY(pi) equals controlled-Y up to a phase on the control.
    Mat4 cy = Mat4::Identity();
    cy.block<2, 2>(2, 2) = pauli_matrix(2);
    Eigen::MatrixXcd u = unitary_of_gates(decompose_cry(Gate::cry(0, 1, kPi)));
    Mat4 s;
    s << 1, 0, 0, 0, 0, 0, 1, 0, 0, 1, 0, 0, 0, 0, 0, 1;
    // Reorder from (q0 MSB) to (q0 LSB) and compare up to the control phase diag(1, -i).
    Mat4 expected = s * cy * s;
    Mat4 phase = Mat4::Identity();
    phase(1, 1) = cdouble(0, -1);
    phase(3, 3) = cdouble(0, -1);
    EXPECT_LT(phase_insensitive_distance(u, expected * phase), 1e-10);
}

TEST(CnotToMs, SingleMsAndEquivalence) {
    for (auto [c, t] : {std::pair{0, 1}, std::pair{1, 0}}) {
        std::vector<Gate> seq = cnot_to_msxx(Gate::cnot(c, t));
        int ms = 0;
        for (const Gate &g : seq) {
            if (g.kind == GateKind::MS_XX) {
                ms++;
                EXPECT_DOUBLE_EQ(g.params[0], kPi / 2);
            } else {
                EXPECT_TRUE(g.kind == GateKind::RX || g.kind == GateKind::RY || g.kind == GateKind::RZ);
            }
        }
        EXPECT_EQ(ms, 1);
        EXPECT_LT(phase_insensitive_distance(unitary_of_gates(seq), unitary_of_gate(Gate::cnot(c, t))), 1e-10);
    }
    EXPECT_LT(phase_insensitive_distance(unitary_of_gates({Gate::ms_xx(0, 1, kPi / 2), Gate::ms_xx(0, 1, -kPi / 2)}),
                                         Eigen::MatrixXcd::Identity(4, 4)),
              1e-15);
    EXPECT_THROW(cnot_to_msxx(Gate::cz(0, 1)), std::invalid_argument);
}

TEST(CzRules, Equivalence) {
    EXPECT_LT(phase_insensitive_distance(unitary_of_gates(cnot_to_cz(Gate::cnot(1, 0))),
                                         unitary_of_gate(Gate::cnot(1, 0))),
              1e-10);
    std::vector<Gate> sw = swap_to_cz(Gate::swap(0, 1));
    int cz = 0;
    for (const Gate &g : sw) {
        cz += g.kind == GateKind::CZ;
    }
    EXPECT_EQ(cz, 3);
    EXPECT_LT(phase_insensitive_distance(unitary_of_gates(sw), unitary_of_gate(Gate::swap(0, 1))), 1e-10);
}

TEST(BlockToZz, Counts) {
    auto zz_count = [](const std::vector<Gate> &s) {
        int n = 0;
        for (const Gate &g : s) {
            n += g.kind == GateKind::ZZ;
        }
        return n;
    };
    Mat4 cnot = Gate::cnot(0, 1).matrix();
    EXPECT_EQ(zz_count(block_to_zz(cnot, 0, 1)), 1);
    EXPECT_EQ(zz_count(block_to_zz(Mat4::Identity(), 0, 1)), 0);
    EXPECT_EQ(zz_count(block_to_zz(Gate::swap(0, 1).matrix(), 0, 1)), 3);

    // CRY(theta) followed by CNOT with the roles of the interaction block.
    for (double th : {0.4, 1.3, 2.7}) {
        Mat4 cry = Gate::cry(0, 1, th).matrix();
        Mat4 cx = Gate::cnot(1, 0).matrix();
        Mat4 s;
        s << 1, 0, 0, 0, 0, 0, 1, 0, 0, 1, 0, 0, 0, 0, 0, 1;
        Mat4 block = s * cx * s * cry;
        std::vector<Gate> seq = block_to_zz(block, 0, 1);
        EXPECT_EQ(zz_count(seq), 2);
        CanonicalCoords c = kak_decompose(block);
        std::vector<double> angles, expected{2 * c.tx, 2 * c.ty, 2 * std::abs(c.tz)};
        for (const Gate &g : seq) {
            if (g.kind == GateKind::ZZ) {
                angles.push_back(std::abs(g.params[0]));
            }
        }
        EXPECT_NEAR(angles[0], expected[0], 1e-12);
        EXPECT_NEAR(angles[1], expected[1], 1e-12);
        Circuit out(2);
        for (const Gate &g : seq) {
            out.append(g);
        }
        Circuit in(2);
        in.append(Gate::cry(0, 1, th));
        in.append(Gate::cnot(1, 0));
        EXPECT_LT(phase_insensitive_distance(unitary_of(out), unitary_of(in)), 1e-9);
    }
}

TEST(BlockToNative, RandomEquivalence) {
    std::mt19937_64 rng(6);
    std::normal_distribution<double> n;
    for (int k = 0; k < 50; k++) {
        Mat4 z;
        for (int i = 0; i < 4; i++) {
            for (int j = 0; j < 4; j++) {
                z(i, j) = cdouble(n(rng), n(rng));
            }
        }
        Mat4 u = Eigen::HouseholderQR<Mat4>(z).householderQ();
        for (GateKind native : {GateKind::ZZ, GateKind::MS_XX}) {
            std::vector<Gate> seq = block_to_native(u, 1, 0, native);
            Circuit c(2);
            int entanglers = 0;
            for (const Gate &g : seq) {
                c.append(g);
                entanglers += g.is_two_qubit();
            }
            EXPECT_LE(entanglers, 3);
            // u is indexed with wire 1 as the high bit; unitary_of uses wire 0 as the low bit.
            EXPECT_LT(phase_insensitive_distance(unitary_of(c), u), 1e-9);
        }
    }
}

TEST(Mirror, SwapAndCnot) {
    MirrorChoice sw = mirror_swap_choice(Gate::swap(0, 1).matrix(), 0, 1);
    EXPECT_TRUE(sw.mirrored);
    int two = 0;
    for (const Gate &g : sw.gates) {
        two += g.is_two_qubit();
    }
    EXPECT_EQ(two, 0);
    MirrorChoice cx = mirror_swap_choice(Gate::cnot(0, 1).matrix(), 0, 1);
    EXPECT_FALSE(cx.mirrored);
    EXPECT_NEAR(cx.angle, kPi / 2, 1e-12);
    // SWAP * CNOT has canonical class (pi/4, pi/4, 0).
    Mat4 s = Gate::swap(0, 1).matrix();
    CanonicalCoords c = kak_decompose(s * Gate::cnot(0, 1).matrix());
    EXPECT_NEAR(c.tx + c.ty + std::abs(c.tz), kPi / 2, 1e-9);
}

TEST(Mirror, NeverIncreasesAngle) {
    std::mt19937_64 rng(12);
    std::normal_distribution<double> n;
    for (int k = 0; k < 200; k++) {
        Mat4 z;
        for (int i = 0; i < 4; i++) {
            for (int j = 0; j < 4; j++) {
                z(i, j) = cdouble(n(rng), n(rng));
            }
        }
        Mat4 u = Eigen::HouseholderQR<Mat4>(z).householderQ();
        MirrorChoice m = mirror_swap_choice(u, 0, 1);
        EXPECT_LE(m.angle, m.unmirrored_angle + 1e-12);
    }
}

TEST(Route, SwapCounts) {
    std::mt19937_64 rng(3);
    for (auto [n, expected] : {std::pair{2, 0}, std::pair{3, 1}, std::pair{5, 3}, std::pair{1, 0}}) {
        QmarinaCircuit q = synthesize_qmarina(random_target(rng, n), 1);
        int swaps = -1;
        GateSetSpec spec = GateSetSpec::superconducting();
        Circuit routed = route_star_to_line(q.circuit, spec, &swaps);
        EXPECT_EQ(swaps, expected);
        EXPECT_LE(swaps, std::max(0, n - 2));
        for (const Gate &g : routed.gates) {
            if (g.is_two_qubit()) {
                EXPECT_EQ(std::abs(g.qubits[0] - g.qubits[1]), 1);
            }
        }
        EXPECT_LT(max_diff(simulate_statevector(routed), simulate_statevector(q.circuit)), 1e-10);
        EXPECT_EQ(routed.initial_layout[1], 0);  // hub at chain position 1
    }
}

TEST(Route, CustomChainOrder) {
    QmarinaCircuit q = default_circuit(1.1);
    GateSetSpec spec = GateSetSpec::superconducting();
    spec.chain = {3, 1, 0, 2};
    Circuit routed = route_star_to_line(q.circuit, spec);
    std::vector<int> pos(4);
    for (int k = 0; k < 4; k++) {
        pos[spec.chain[k]] = k;
    }
    for (const Gate &g : routed.gates) {
        if (g.is_two_qubit()) {
            EXPECT_EQ(std::abs(pos[g.qubits[0]] - pos[g.qubits[1]]), 1);
        }
    }
    EXPECT_LT(max_diff(simulate_statevector(routed), simulate_statevector(q.circuit)), 1e-10);
}

TEST(Route, RejectsNonStar) {
    Circuit c(3);
    c.append(Gate::cnot(1, 2));
    EXPECT_THROW(route_star_to_line(c, GateSetSpec::superconducting()), std::invalid_argument);
}

TEST(Transpile, IdentityOptionsLeaveCircuitUnchanged) {
    QmarinaCircuit q = default_circuit(0.9);
    TranspileOptions none{false, false, false, false};
    EXPECT_EQ(transpile(q.circuit, GateSetSpec::ion(), none), q.circuit);
}

TEST(Transpile, GateCountClaims) {
    for (int n : {1, 2, 3, 4}) {
        TCParams p = TCParams::identical(n, 4, 2, 1);
        QmarinaCircuit q = synthesize_qmarina(populations(evolve_single_excitation(p, 0.9)), 1);
        CompilationReport manual, zz;
        transpile(q.circuit, GateSetSpec::ion(), kManual, &manual);
        transpile(q.circuit, GateSetSpec::ion_zz(), kZz, &zz);
        EXPECT_EQ(manual.two_qubit_gates, 3 * n);
        EXPECT_EQ(manual.census["MS_XX"], 3 * n);
        EXPECT_EQ(zz.two_qubit_gates, 2 * n);
        EXPECT_EQ(zz.census["ZZ"], 2 * n);
    }
}

TEST(Transpile, ZzCountAtInitialTime) {
    // At t = 0 every CRY angle vanishes and each block is a bare CNOT.
    CompilationReport r;
    transpile(default_circuit(0).circuit, GateSetSpec::ion_zz(), kZz, &r);
    EXPECT_EQ(r.two_qubit_gates, 3);
}

TEST(Transpile, SuperconductingCensus) {
    CompilationReport r;
    Circuit out = transpile(default_circuit(1.5).circuit, GateSetSpec::superconducting(), kRouted, &r);
    EXPECT_EQ(r.swaps_inserted, 1);
    EXPECT_EQ(r.census["CZ"], 3 * 3 + 3);
    EXPECT_TRUE(native_only(out, GateSetSpec::superconducting()));
}

TEST(Transpile, Errors) {
    Circuit c = default_circuit(0.5).circuit;
    EXPECT_THROW(transpile(c, GateSetSpec::ion(), {false, true, false, true}), std::invalid_argument);
    EXPECT_THROW(transpile(c, GateSetSpec::superconducting(), {true, false, true, true}), std::invalid_argument);
    EXPECT_THROW(transpile(c, GateSetSpec::ion(), kRouted), std::invalid_argument);
    GateSetSpec sc_zz = GateSetSpec::superconducting();
    sc_zz.native_two_qubit = GateKind::ZZ;
    EXPECT_THROW(transpile(c, sc_zz, {true, true, true, true}), std::invalid_argument);
    EXPECT_THROW(transpile(c, GateSetSpec::superconducting(), kManual), std::invalid_argument);
}

TEST(Transpile, EquivalenceOnRandomInstances) {
    std::mt19937_64 rng(77);
    struct Variant {
        GateSetSpec spec;
        TranspileOptions opts;
    };
    GateSetSpec euler = GateSetSpec::ion();
    euler.native_single_qubit = {GateKind::RZ, GateKind::RX};
    const Variant variants[] = {{GateSetSpec::ion(), kManual},
                                {GateSetSpec::ion_zz(), kZz},
                                {GateSetSpec::ion_zz(), kZzMirror},
                                {GateSetSpec::ion(), kZzMirror},
                                {euler, kManual},
                                {GateSetSpec::superconducting(), kRouted}};
    for (int k = 0; k < 200; k++) {
        int n = 1 + k % 5;
        QmarinaCircuit q = synthesize_qmarina(random_target(rng, n), 1 + (int)(rng() % n));
        std::vector<double> ideal = simulate_statevector(q.circuit);
        for (const Variant &v : variants) {
            CompilationReport r;
            Circuit out = transpile(q.circuit, v.spec, v.opts, &r);
            ASSERT_LT(max_diff(simulate_statevector(out), ideal), 1e-9);
            ASSERT_TRUE(native_only(out, v.spec));
            ASSERT_LE(r.total_entangling_angle, r.unmirrored_angle + 1e-9);
        }
    }
}

TEST(Transpile, LogicalUnitaryPreservedWithMirroring) {
    QmarinaCircuit q = default_circuit(2.2);
    Circuit out = transpile(q.circuit, GateSetSpec::ion_zz(), kZzMirror);
    EXPECT_LT(phase_insensitive_distance(logical_unitary(out), logical_unitary(q.circuit)), 1e-9);
}

TEST(Transpile, MirroringSweepReducesAngle) {
    double mirrored = 0, plain = 0;
    int mirrored_blocks = 0;
    for (int k = 0; k < 51; k++) {
        CompilationReport r;
        transpile(default_circuit(0.06 * k).circuit, GateSetSpec::ion_zz(), kZzMirror, &r);
        EXPECT_LE(r.total_entangling_angle, r.unmirrored_angle + 1e-12);
        mirrored += r.total_entangling_angle;
        plain += r.unmirrored_angle;
        mirrored_blocks += r.mirrored_blocks;
    }
    EXPECT_LT(mirrored, plain);
    EXPECT_GT(mirrored_blocks, 0);
}

TEST(MergeSingleQubit, DropsIdentityAndFuses) {
    Circuit c(2);
    c.append(Gate::x(0));
    c.append(Gate::x(0));
    c.append(Gate::rz(1, 0.3));
    c.append(Gate::ry(1, 0.2));
    c.append(Gate::cz(0, 1));
    Circuit m = merge_single_qubit(c, GateSetSpec::superconducting());
    EXPECT_EQ(m.gates.size(), 2u);
    EXPECT_LT(phase_insensitive_distance(unitary_of(m), unitary_of(c)), 1e-12);
}

TEST(GateSetSpec, Validation) {
    GateSetSpec s = GateSetSpec::superconducting();
    s.chain = {0, 1, 1, 2};
    EXPECT_THROW(s.validate(4), std::invalid_argument);
    GateSetSpec t = GateSetSpec::ion();
    t.native_single_qubit = {GateKind::RZ};
    EXPECT_THROW(t.validate(3), std::invalid_argument);
    GateSetSpec u = GateSetSpec::ion();
    u.native_two_qubit = GateKind::CNOT;
    EXPECT_THROW(u.validate(3), std::invalid_argument);
}
