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

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>

namespace cqed {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTiny = 1e-12;

Mat4 swap_matrix() {
    Mat4 s = Mat4::Zero();
    s(0, 0) = 1;
    s(1, 2) = 1;
    s(2, 1) = 1;
    s(3, 3) = 1;
    return s;
}

// Matrix of a two-qubit gate expressed on the ordered pair (a, b).
Mat4 matrix_on_pair(const Gate &g, int a) {
    Mat4 m = g.matrix();
    if (g.qubits[0] == a) {
        return m;
    }
    const Mat4 s = swap_matrix();
    return s * m * s;
}

void push_1q(std::vector<Gate> &out, const Mat2 &m, int q) {
    if (phase_insensitive_distance(m, Mat2::Identity()) < kTiny) {
        return;
    }
    auto [t, p, l] = u1q_angles(m);
    out.push_back(Gate::u1q(q, t, p, l));
}

Mat2 h_matrix() {
    Mat2 m;
    m << 1, 1, 1, -1;
    return m / std::sqrt(2.0);
}

Mat2 s_matrix() {
    Mat2 m;
    m << 1, 0, 0, cdouble(0, 1);
    return m;
}

// L with L P L^dag = axis Pauli, where P is the native generator (ZZ or XX).
Mat2 basis_change(int axis, GateKind native) {
    if (native == GateKind::ZZ) {
        switch (axis) {
            case 0:
                return h_matrix();
            case 1:
                return s_matrix() * h_matrix();
            default:
                return Mat2::Identity();
        }
    }
    switch (axis) {
        case 0:
            return Mat2::Identity();
        case 1:
            return s_matrix();
        default:
            return h_matrix();
    }
}

Gate native_gate(GateKind native, int a, int b, double theta) {
    return native == GateKind::ZZ ? Gate::zz(a, b, theta) : Gate::ms_xx(a, b, theta);
}

void require_kind(const Gate &g, GateKind k, const char *what) {
    if (g.kind != k) {
        throw std::invalid_argument(std::string(what) + ": expected " + std::string(gate_name(k)) + ", got " +
                                    std::string(gate_name(g.kind)));
    }
}

int hub_of(const Circuit &c) {
    if (!c.roles.empty()) {
        int h = c.logical_with_role(Role::cavity_env());
        if (h >= 0) {
            return h;
        }
    }
    return 0;
}

// Lowers one gate into the native gate set using the fixed rules.
void lower_fixed(const Gate &g, GateKind native, std::vector<Gate> &out) {
    switch (g.kind) {
        case GateKind::CRY:
            for (const Gate &h : decompose_cry(g)) {
                lower_fixed(h, native, out);
            }
            return;
        case GateKind::CNOT:
            if (native == GateKind::CZ) {
                for (const Gate &h : cnot_to_cz(g)) {
                    out.push_back(h);
                }
            } else if (native == GateKind::MS_XX) {
                for (const Gate &h : cnot_to_msxx(g)) {
                    out.push_back(h);
                }
            } else {
                for (const Gate &h : block_to_native(g.matrix(), g.qubits[0], g.qubits[1], native)) {
                    out.push_back(h);
                }
            }
            return;
        case GateKind::SWAP:
            for (const Gate &h : {Gate::cnot(g.qubits[0], g.qubits[1]), Gate::cnot(g.qubits[1], g.qubits[0]),
                                  Gate::cnot(g.qubits[0], g.qubits[1])}) {
                lower_fixed(h, native, out);
            }
            return;
        case GateKind::CZ:
        case GateKind::ZZ:
        case GateKind::MS_XX:
            if (g.kind == native) {
                out.push_back(g);
            } else {
                for (const Gate &h : block_to_native(g.matrix(), g.qubits[0], g.qubits[1], native)) {
                    out.push_back(h);
                }
            }
            return;
        default:
            out.push_back(g);
    }
}

struct BlockCompiler {
    GateKind native;
    bool mirror;
    Circuit out;
    std::vector<int> perm;  // input wire -> output wire
    CompilationReport *report;

    std::optional<std::pair<int, int>> pair;
    Mat4 acc = Mat4::Identity();

    void flush() {
        if (!pair) {
            return;
        }
        auto [a, b] = *pair;
        int pa = perm[a], pb = perm[b];
        MirrorChoice choice;
        if (mirror) {
            choice = mirror_swap_choice(acc, pa, pb, native);
        } else {
            choice.gates = block_to_native(acc, pa, pb, native);
            choice.angle = 2 * kak_decompose(acc).total_angle();
            choice.unmirrored_angle = choice.angle;
        }
        for (const Gate &g : choice.gates) {
            out.append(g);
        }
        if (report) {
            report->blocks++;
            report->unmirrored_angle += choice.unmirrored_angle;
            if (choice.mirrored) {
                report->mirrored_blocks++;
                report->improved_before += choice.unmirrored_angle;
                report->improved_after += choice.angle;
            }
        }
        if (choice.mirrored) {
            std::swap(perm[a], perm[b]);
        }
        pair.reset();
        acc = Mat4::Identity();
    }

    void add(const Gate &g) {
        if (g.arity() == 1) {
            int q = g.qubits[0];
            if (pair && (q == pair->first || q == pair->second)) {
                Mat2 m = g.matrix();
                Mat4 lifted = q == pair->first ? kron(m, Mat2::Identity()) : kron(Mat2::Identity(), m);
                acc = lifted * acc;
            } else {
                Gate h = g;
                h.qubits[0] = perm[q];
                out.append(h);
            }
            return;
        }
        int a = g.qubits[0], b = g.qubits[1];
        bool same = pair && ((pair->first == a && pair->second == b) || (pair->first == b && pair->second == a));
        if (!same) {
            flush();
            pair = std::make_pair(a, b);
        }
        acc = matrix_on_pair(g, pair->first) * acc;
    }
};

}  // namespace

bool GateSetSpec::allows(GateKind kind) const {
    if (gate_arity(kind) == 2) {
        return kind == native_two_qubit;
    }
    return std::find(native_single_qubit.begin(), native_single_qubit.end(), kind) != native_single_qubit.end();
}

std::vector<int> GateSetSpec::chain_for(int width) const {
    if (!chain.empty()) {
        return chain;
    }
    std::vector<int> c(width);
    for (int i = 0; i < width; i++) {
        c[i] = i;
    }
    return c;
}

void GateSetSpec::validate(int width) const {
    if (gate_arity(native_two_qubit) != 2 || native_two_qubit == GateKind::CNOT ||
        native_two_qubit == GateKind::SWAP || native_two_qubit == GateKind::CRY) {
        throw std::invalid_argument("native two-qubit gate must be MS_XX, ZZ or CZ");
    }
    bool rz = allows(GateKind::RZ), ry = allows(GateKind::RY), rx = allows(GateKind::RX);
    if (!allows(GateKind::U1q) && !(rz && (ry || rx))) {
        throw std::invalid_argument("single-qubit gate set cannot express arbitrary rotations");
    }
    if (connectivity == Connectivity::LinearChain && !chain.empty()) {
        std::vector<int> sorted = chain;
        std::sort(sorted.begin(), sorted.end());
        for (int i = 0; i < (int)sorted.size(); i++) {
            if (sorted[i] != i) {
                throw std::invalid_argument("linear chain order is not a permutation of the qubits");
            }
        }
        if ((int)chain.size() != width) {
            throw std::invalid_argument("linear chain length does not match circuit width");
        }
    }
}

GateSetSpec GateSetSpec::ion() {
    return GateSetSpec{};
}

GateSetSpec GateSetSpec::ion_zz() {
    GateSetSpec s;
    s.native_two_qubit = GateKind::ZZ;
    return s;
}

GateSetSpec GateSetSpec::superconducting() {
    GateSetSpec s;
    s.native_two_qubit = GateKind::CZ;
    s.connectivity = Connectivity::LinearChain;
    return s;
}

std::string_view connectivity_name(Connectivity c) {
    return c == Connectivity::AllToAll ? "all_to_all" : "linear";
}

Connectivity parse_connectivity(std::string_view s) {
    if (s == "all_to_all") {
        return Connectivity::AllToAll;
    }
    if (s == "linear") {
        return Connectivity::LinearChain;
    }
    throw std::invalid_argument("unknown connectivity '" + std::string(s) + "'");
}

double entangling_angle(const Gate &g) {
    if (!g.is_two_qubit()) {
        return 0;
    }
    if (g.kind == GateKind::ZZ || g.kind == GateKind::MS_XX) {
        return std::abs(g.params[0]);
    }
    return 2 * kak_decompose(g.matrix()).total_angle();
}

double total_entangling_angle(const Circuit &c) {
    double total = 0;
    for (const Gate &g : c.gates) {
        total += entangling_angle(g);
    }
    return total;
}

std::vector<Gate> decompose_cry(const Gate &g) {
    require_kind(g, GateKind::CRY, "decompose_cry");
    int c = g.qubits[0], t = g.qubits[1];
    double th = g.params[0];
    return {Gate::ry(t, th / 2), Gate::cnot(c, t), Gate::ry(t, -th / 2), Gate::cnot(c, t)};
}

std::vector<Gate> cnot_to_msxx(const Gate &g) {
    require_kind(g, GateKind::CNOT, "cnot_to_msxx");
    int c = g.qubits[0], t = g.qubits[1];
    return {Gate::ry(c, kPi / 2), Gate::ms_xx(c, t, kPi / 2), Gate::rx(c, -kPi / 2), Gate::rx(t, -kPi / 2),
            Gate::ry(c, -kPi / 2)};
}

std::vector<Gate> cnot_to_cz(const Gate &g) {
    require_kind(g, GateKind::CNOT, "cnot_to_cz");
    int t = g.qubits[1];
    return {Gate::h(t), Gate::cz(g.qubits[0], t), Gate::h(t)};
}

std::vector<Gate> swap_to_cz(const Gate &g) {
    require_kind(g, GateKind::SWAP, "swap_to_cz");
    int a = g.qubits[0], b = g.qubits[1];
    std::vector<Gate> out;
    for (const Gate &c : {Gate::cnot(a, b), Gate::cnot(b, a), Gate::cnot(a, b)}) {
        for (const Gate &h : cnot_to_cz(c)) {
            out.push_back(h);
        }
    }
    return out;
}

std::vector<Gate> block_to_native(const Mat4 &u, int a, int b, GateKind native) {
    if (native != GateKind::ZZ && native != GateKind::MS_XX) {
        throw std::invalid_argument("block_to_native: native gate must be ZZ or MS_XX");
    }
    CanonicalCoords c = kak_decompose(u);
    std::vector<Gate> out;
    push_1q(out, c.k2a, a);
    push_1q(out, c.k2b, b);
    const double ts[3] = {c.tx, c.ty, c.tz};
    for (int axis = 0; axis < 3; axis++) {
        if (std::abs(ts[axis]) < kTiny) {
            continue;
        }
        Mat2 l = basis_change(axis, native);
        push_1q(out, l.adjoint(), a);
        push_1q(out, l.adjoint(), b);
        out.push_back(native_gate(native, a, b, 2 * ts[axis]));
        push_1q(out, l, a);
        push_1q(out, l, b);
    }
    push_1q(out, c.k1a, a);
    push_1q(out, c.k1b, b);
    return out;
}

MirrorChoice mirror_swap_choice(const Mat4 &u, int a, int b, GateKind native) {
    Mat4 mirrored = swap_matrix() * u;
    double plain = 2 * kak_decompose(u).total_angle();
    double swapped = 2 * kak_decompose(mirrored).total_angle();
    MirrorChoice out;
    out.unmirrored_angle = plain;
    if (swapped < plain - kTiny) {
        out.mirrored = true;
        out.angle = swapped;
        out.gates = block_to_native(mirrored, a, b, native);
    } else {
        out.angle = plain;
        out.gates = block_to_native(u, a, b, native);
    }
    return out;
}

Circuit route_star_to_line(const Circuit &circuit, const GateSetSpec &spec, int *swaps_inserted) {
    circuit.validate();
    const int w = circuit.width;
    for (int i = 0; i < w; i++) {
        if (circuit.initial_layout[i] != i || circuit.readout[i] != i) {
            throw std::invalid_argument("route_star_to_line: input must have identity layout");
        }
    }
    const int hub = hub_of(circuit);
    std::vector<int> partners;
    for (const Gate &g : circuit.gates) {
        if (!g.is_two_qubit()) {
            continue;
        }
        if (g.qubits[0] != hub && g.qubits[1] != hub) {
            throw std::invalid_argument("route_star_to_line: two-qubit gate does not involve the hub qubit");
        }
        int p = g.qubits[0] == hub ? g.qubits[1] : g.qubits[0];
        if (std::find(partners.begin(), partners.end(), p) == partners.end()) {
            partners.push_back(p);
        }
    }
    std::vector<int> order;  // logical qubit at each chain position
    if (!partners.empty()) {
        order.push_back(partners[0]);
    }
    order.push_back(hub);
    for (size_t k = 1; k < partners.size(); k++) {
        order.push_back(partners[k]);
    }
    for (int q = 0; q < w; q++) {
        if (std::find(order.begin(), order.end(), q) == order.end()) {
            order.push_back(q);
        }
    }
    const std::vector<int> chain = spec.chain_for(w);
    if ((int)chain.size() != w) {
        throw std::invalid_argument("route_star_to_line: chain length does not match circuit width");
    }
    std::vector<int> pos(w);
    for (int k = 0; k < w; k++) {
        pos[order[k]] = k;
    }

    Circuit out(w);
    out.roles = circuit.roles;
    for (int k = 0; k < w; k++) {
        out.initial_layout[chain[k]] = order[k];
    }
    int swaps = 0;
    for (const Gate &g : circuit.gates) {
        if (g.is_two_qubit()) {
            int p = g.qubits[0] == hub ? g.qubits[1] : g.qubits[0];
            while (std::abs(pos[hub] - pos[p]) > 1) {
                int step = pos[p] > pos[hub] ? 1 : -1;
                int other = order[pos[hub] + step];
                out.append(Gate::swap(chain[pos[hub]], chain[pos[other]]));
                std::swap(order[pos[hub]], order[pos[other]]);
                std::swap(pos[hub], pos[other]);
                swaps++;
            }
        }
        Gate h = g;
        for (int k = 0; k < g.arity(); k++) {
            h.qubits[k] = chain[pos[g.qubits[k]]];
        }
        out.append(h);
    }
    for (int k = 0; k < w; k++) {
        out.readout[chain[k]] = order[k];
    }
    if (swaps_inserted) {
        *swaps_inserted = swaps;
    }
    return out;
}

Circuit merge_single_qubit(const Circuit &circuit, const GateSetSpec &spec) {
    const bool u1q = spec.allows(GateKind::U1q);
    const bool zy = spec.allows(GateKind::RZ) && spec.allows(GateKind::RY);
    const bool zx = spec.allows(GateKind::RZ) && spec.allows(GateKind::RX);
    if (!u1q && !zy && !zx) {
        throw std::invalid_argument("merge_single_qubit: single-qubit gate set is not universal");
    }
    Circuit out = circuit;
    out.gates.clear();
    std::vector<Mat2> run(circuit.width, Mat2::Identity());
    std::vector<bool> pending(circuit.width, false);

    auto flush = [&](int q) {
        if (!pending[q]) {
            return;
        }
        pending[q] = false;
        Mat2 m = run[q];
        run[q] = Mat2::Identity();
        if (phase_insensitive_distance(m, Mat2::Identity()) < kTiny) {
            return;
        }
        auto [t, p, l] = u1q_angles(m);
        if (u1q) {
            out.append(Gate::u1q(q, t, p, l));
            return;
        }
        // m ~ RZ(p) RY(t) RZ(l); RY(t) = RZ(pi/2) RX(t) RZ(-pi/2).
        double first = l, last = p;
        if (!zy) {
            first = wrap_angle(l - kPi / 2);
            last = wrap_angle(p + kPi / 2);
        }
        if (std::abs(t) < kTiny) {
            double z = wrap_angle(first + last);
            if (std::abs(z) > kTiny) {
                out.append(Gate::rz(q, z));
            }
            return;
        }
        if (std::abs(first) > kTiny) {
            out.append(Gate::rz(q, first));
        }
        out.append(zy ? Gate::ry(q, t) : Gate::rx(q, t));
        if (std::abs(last) > kTiny) {
            out.append(Gate::rz(q, last));
        }
    };

    for (const Gate &g : circuit.gates) {
        if (g.arity() == 1) {
            int q = g.qubits[0];
            run[q] = Mat2(g.matrix()) * run[q];
            pending[q] = true;
        } else {
            flush(g.qubits[0]);
            flush(g.qubits[1]);
            out.append(g);
        }
    }
    for (int q = 0; q < circuit.width; q++) {
        flush(q);
    }
    return out;
}

CompilationReport describe(const Circuit &circuit) {
    CompilationReport r;
    for (const Gate &g : circuit.gates) {
        r.census[std::string(gate_name(g.kind))]++;
        if (g.is_two_qubit()) {
            r.two_qubit_gates++;
            r.total_entangling_angle += entangling_angle(g);
        }
    }
    return r;
}

Circuit transpile(const Circuit &circuit, const GateSetSpec &spec, const TranspileOptions &options,
                  CompilationReport *report) {
    circuit.validate();
    spec.validate(circuit.width);
    if (options.mirror && !options.use_zz) {
        throw std::invalid_argument("transpile: mirroring requires block compilation (use_zz)");
    }
    if (options.use_zz && spec.native_two_qubit == GateKind::CZ) {
        throw std::invalid_argument("transpile: block compilation needs an arbitrary-angle native gate");
    }
    if (options.route && spec.connectivity != Connectivity::LinearChain) {
        throw std::invalid_argument("transpile: routing requires linear connectivity");
    }
    if (options.mirror && spec.connectivity == Connectivity::LinearChain) {
        throw std::invalid_argument("transpile: mirroring is not supported on a linear chain");
    }

    CompilationReport rep;
    Circuit cur = circuit;
    if (options.route) {
        cur = route_star_to_line(cur, spec, &rep.swaps_inserted);
    }
    if (options.lower) {
        if (options.use_zz) {
            BlockCompiler bc{spec.native_two_qubit, options.mirror, Circuit(cur.width), {}, &rep, {}, Mat4::Identity()};
            bc.out.roles = cur.roles;
            bc.out.initial_layout = cur.initial_layout;
            bc.perm.resize(cur.width);
            for (int i = 0; i < cur.width; i++) {
                bc.perm[i] = i;
            }
            for (const Gate &g : cur.gates) {
                bc.add(g);
            }
            bc.flush();
            for (int w = 0; w < cur.width; w++) {
                bc.out.readout[bc.perm[w]] = cur.readout[w];
            }
            cur = std::move(bc.out);
        } else {
            Circuit lowered = cur;
            lowered.gates.clear();
            for (const Gate &g : cur.gates) {
                lower_fixed(g, spec.native_two_qubit, lowered.gates);
            }
            cur = std::move(lowered);
        }
        cur = merge_single_qubit(cur, spec);
    }
    if (spec.connectivity == Connectivity::LinearChain && options.lower) {
        std::vector<int> chain = spec.chain_for(cur.width);
        std::vector<int> pos(cur.width);
        for (int k = 0; k < cur.width; k++) {
            pos[chain[k]] = k;
        }
        for (const Gate &g : cur.gates) {
            if (g.is_two_qubit() && std::abs(pos[g.qubits[0]] - pos[g.qubits[1]]) != 1) {
                throw std::invalid_argument("transpile: two-qubit gate on non-adjacent chain positions; enable routing");
            }
        }
    }

    CompilationReport d = describe(cur);
    rep.census = d.census;
    rep.two_qubit_gates = d.two_qubit_gates;
    rep.total_entangling_angle = d.total_entangling_angle;
    if (!options.use_zz) {
        rep.unmirrored_angle = rep.total_entangling_angle;
    }
    if (report) {
        *report = rep;
    }
    return cur;
}

}  // namespace cqed
