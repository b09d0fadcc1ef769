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

#include "cqed/circuit.h"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <iostream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "cqed/rng.h"

namespace cqed {

std::string Role::str() const {
    if (kind == Kind::CavityEnv) {
        return "cav";
    }
    return "e" + std::to_string(emitter);
}

Role Role::parse(const std::string &s) {
    if (s == "cav") {
        return cavity_env();
    }
    if (s.size() >= 2 && s[0] == 'e') {
        return emitter_qubit(std::stoi(s.substr(1)));
    }
    throw std::invalid_argument("unrecognized role '" + s + "'");
}

Circuit::Circuit(int w) : width(w) {
    initial_layout.resize(w);
    std::iota(initial_layout.begin(), initial_layout.end(), 0);
    readout = initial_layout;
}

void Circuit::append(const Gate &g) {
    gates.push_back(g);
}

namespace {

bool is_permutation_of_width(const std::vector<int> &p, int width) {
    if ((int)p.size() != width) {
        return false;
    }
    std::vector<bool> seen(width, false);
    for (int v : p) {
        if (v < 0 || v >= width || seen[v]) {
            return false;
        }
        seen[v] = true;
    }
    return true;
}

}  // namespace

void Circuit::validate() const {
    if (width < 1) {
        throw std::invalid_argument("circuit width must be >= 1");
    }
    if (!is_permutation_of_width(initial_layout, width) || !is_permutation_of_width(readout, width)) {
        throw std::invalid_argument("circuit layout/readout is not a permutation of the wires");
    }
    for (const Gate &g : gates) {
        for (int k = 0; k < g.arity(); k++) {
            if (g.qubits[k] < 0 || g.qubits[k] >= width) {
                throw std::invalid_argument(
                    "gate " + std::string(gate_name(g.kind)) + " on qubit " + std::to_string(g.qubits[k]) +
                    " outside circuit width " + std::to_string(width));
            }
        }
        if (g.arity() == 2 && g.qubits[0] == g.qubits[1]) {
            throw std::invalid_argument("two-qubit gate " + std::string(gate_name(g.kind)) + " on repeated qubit");
        }
    }
    if (!roles.empty()) {
        if ((int)roles.size() != width) {
            throw std::invalid_argument("roles must cover every qubit");
        }
        int cav = 0;
        std::vector<bool> seen(width, false);
        for (const Role &r : roles) {
            if (r.kind == Role::Kind::CavityEnv) {
                cav++;
            } else {
                if (r.emitter < 1 || r.emitter >= width || seen[r.emitter]) {
                    throw std::invalid_argument("roles are not a bijection onto cavity + emitters");
                }
                seen[r.emitter] = true;
            }
        }
        if (cav != 1) {
            throw std::invalid_argument("roles must contain exactly one cavity/environment qubit");
        }
    }
}

int Circuit::two_qubit_gate_count() const {
    return (int)std::count_if(gates.begin(), gates.end(), [](const Gate &g) { return g.is_two_qubit(); });
}

int Circuit::count(GateKind kind) const {
    return (int)std::count_if(gates.begin(), gates.end(), [&](const Gate &g) { return g.kind == kind; });
}

std::vector<Role> Circuit::final_wire_roles() const {
    std::vector<Role> out;
    for (int w = 0; w < width && !roles.empty(); w++) {
        out.push_back(roles[readout[w]]);
    }
    return out;
}

int Circuit::logical_with_role(const Role &r) const {
    for (size_t k = 0; k < roles.size(); k++) {
        if (roles[k] == r) {
            return (int)k;
        }
    }
    return -1;
}

void Counts::add(uint64_t outcome, uint64_t n) {
    if (n == 0) {
        return;
    }
    histogram[outcome] += n;
    total += n;
}

void Counts::merge(const Counts &other) {
    if (width == 0) {
        width = other.width;
    }
    if (other.width != width) {
        throw std::invalid_argument("Counts::merge: width mismatch");
    }
    for (auto [k, v] : other.histogram) {
        add(k, v);
    }
}

uint64_t Counts::get(uint64_t outcome) const {
    auto it = histogram.find(outcome);
    return it == histogram.end() ? 0 : it->second;
}

std::map<std::string, uint64_t> Counts::by_bitstring() const {
    std::map<std::string, uint64_t> out;
    for (auto [k, v] : histogram) {
        out[bitstring(k, width)] = v;
    }
    return out;
}

Counts Counts::from_bitstrings(const std::map<std::string, uint64_t> &m) {
    Counts c;
    for (const auto &[s, v] : m) {
        if (c.width == 0) {
            c.width = (int)s.size();
        } else if ((int)s.size() != c.width) {
            throw std::invalid_argument("Counts: bitstrings of different lengths");
        }
        c.add(parse_bitstring(s), v);
    }
    return c;
}

std::string bitstring(uint64_t index, int width) {
    std::string s(width, '0');
    for (int q = 0; q < width; q++) {
        if ((index >> q) & 1) {
            s[width - 1 - q] = '1';
        }
    }
    return s;
}

uint64_t parse_bitstring(const std::string &s) {
    uint64_t v = 0;
    int w = (int)s.size();
    for (int k = 0; k < w; k++) {
        char ch = s[w - 1 - k];
        if (ch == '1') {
            v |= uint64_t{1} << k;
        } else if (ch != '0') {
            throw std::invalid_argument("bad bitstring '" + s + "'");
        }
    }
    return v;
}

QmarinaCircuit synthesize_qmarina(const PopulationDistribution &target, int excited) {
    target.validate(1e-9);
    int n = (int)target.p_emitters.size();
    if (excited < 1 || excited > n) {
        throw std::invalid_argument("synthesize_qmarina: excited emitter out of range");
    }
    constexpr double kResidualFloor = 1e-12;
    constexpr double kRatioSlack = 1e-9;

    QmarinaCircuit out;
    out.interaction_order.push_back(excited);
    for (int i = 1; i <= n; i++) {
        if (i != excited) {
            out.interaction_order.push_back(i);
        }
    }

    Circuit c(n + 1);
    c.roles.push_back(Role::cavity_env());
    for (int i = 1; i <= n; i++) {
        c.roles.push_back(Role::emitter_qubit(i));
    }
    const int cav = 0;

    double p_first = std::clamp(target.p_emitters[excited - 1], 0.0, 1.0);
    double theta = 2 * std::acos(std::sqrt(p_first));
    double residual = 1 - p_first;
    out.angles.push_back(theta);
    c.append(Gate::x(excited));
    c.append(Gate::cry(excited, cav, theta));
    c.append(Gate::cnot(cav, excited));

    for (size_t k = 1; k < out.interaction_order.size(); k++) {
        int e = out.interaction_order[k];
        double p = std::max(target.p_emitters[e - 1], 0.0);
        double angle = 0;
        if (residual > kResidualFloor) {
            double ratio = p / residual;
            if (ratio > 1 + kRatioSlack) {
                throw std::invalid_argument(
                    "synthesize_qmarina: inconsistent target (emitter " + std::to_string(e) +
                    " population exceeds the remaining excitation)");
            }
            angle = 2 * std::asin(std::sqrt(std::min(ratio, 1.0)));
            residual = std::max(residual - p, 0.0);
        }
        out.angles.push_back(angle);
        c.append(Gate::cry(cav, e, angle));
        c.append(Gate::cnot(e, cav));
    }
    out.circuit = std::move(c);
    return out;
}

void apply_gate(Eigen::VectorXcd &state, const Gate &g, const Eigen::MatrixXcd &m) {
    const uint64_t dim = state.size();
    if (g.arity() == 1) {
        const uint64_t bit = uint64_t{1} << g.qubits[0];
        const cdouble m00 = m(0, 0), m01 = m(0, 1), m10 = m(1, 0), m11 = m(1, 1);
        for (uint64_t i = 0; i < dim; i++) {
            if (i & bit) {
                continue;
            }
            cdouble a0 = state[i], a1 = state[i | bit];
            state[i] = m00 * a0 + m01 * a1;
            state[i | bit] = m10 * a0 + m11 * a1;
        }
        return;
    }
    const uint64_t b0 = uint64_t{1} << g.qubits[0];
    const uint64_t b1 = uint64_t{1} << g.qubits[1];
    for (uint64_t i = 0; i < dim; i++) {
        if (i & (b0 | b1)) {
            continue;
        }
        const uint64_t idx[4] = {i, i | b1, i | b0, i | b0 | b1};
        cdouble a[4];
        for (int k = 0; k < 4; k++) {
            a[k] = state[idx[k]];
        }
        for (int r = 0; r < 4; r++) {
            cdouble acc = 0;
            for (int k = 0; k < 4; k++) {
                acc += m(r, k) * a[k];
            }
            state[idx[r]] = acc;
        }
    }
}

Eigen::VectorXcd statevector(const Circuit &circuit) {
    circuit.validate();
    if (circuit.width > 24) {
        throw std::invalid_argument("statevector simulation limited to 24 qubits");
    }
    Eigen::VectorXcd state = Eigen::VectorXcd::Zero(Eigen::Index{1} << circuit.width);
    state[0] = 1;
    for (const Gate &g : circuit.gates) {
        apply_gate(state, g, g.matrix());
    }
    return state;
}

std::vector<double> physical_to_logical(std::span<const double> probs, const std::vector<int> &readout) {
    std::vector<double> out(probs.size(), 0.0);
    int width = (int)readout.size();
    for (uint64_t p = 0; p < probs.size(); p++) {
        uint64_t l = 0;
        for (int w = 0; w < width; w++) {
            if ((p >> w) & 1) {
                l |= uint64_t{1} << readout[w];
            }
        }
        out[l] += probs[p];
    }
    return out;
}

std::vector<double> simulate_statevector(const Circuit &circuit) {
    Eigen::VectorXcd s = statevector(circuit);
    std::vector<double> probs(s.size());
    for (Eigen::Index i = 0; i < s.size(); i++) {
        probs[i] = std::norm(s[i]);
    }
    return physical_to_logical(probs, circuit.readout);
}

Counts sample_distribution(std::span<const double> probs, int width, uint64_t shots, uint64_t seed) {
    if (shots < 1) {
        throw std::invalid_argument("shots must be >= 1");
    }
    Rng rng(seed);
    std::vector<uint64_t> draws = sample_multinomial(probs, shots, rng);
    Counts c;
    c.width = width;
    for (size_t k = 0; k < draws.size(); k++) {
        c.add(k, draws[k]);
    }
    return c;
}

Counts sample_counts(const Circuit &circuit, uint64_t shots, uint64_t seed) {
    std::vector<double> probs = simulate_statevector(circuit);
    return sample_distribution(probs, circuit.width, shots, derive_seed(seed, {0}));
}

Eigen::MatrixXcd unitary_of(const Circuit &circuit) {
    circuit.validate();
    if (circuit.width > 10) {
        throw std::invalid_argument("unitary_of: width must be <= 10");
    }
    const Eigen::Index dim = Eigen::Index{1} << circuit.width;
    std::vector<Eigen::MatrixXcd> mats;
    mats.reserve(circuit.gates.size());
    for (const Gate &g : circuit.gates) {
        mats.push_back(g.matrix());
    }
    Eigen::MatrixXcd u(dim, dim);
    for (Eigen::Index col = 0; col < dim; col++) {
        Eigen::VectorXcd s = Eigen::VectorXcd::Zero(dim);
        s[col] = 1;
        for (size_t k = 0; k < circuit.gates.size(); k++) {
            apply_gate(s, circuit.gates[k], mats[k]);
        }
        u.col(col) = s;
    }
    return u;
}

namespace {

// M(l, p) = 1 when physical basis index p holds logical index l under `layout`.
Eigen::MatrixXcd layout_permutation(const std::vector<int> &layout) {
    int width = (int)layout.size();
    Eigen::Index dim = Eigen::Index{1} << width;
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
    for (Eigen::Index p = 0; p < dim; p++) {
        Eigen::Index l = 0;
        for (int w = 0; w < width; w++) {
            if ((p >> w) & 1) {
                l |= Eigen::Index{1} << layout[w];
            }
        }
        m(l, p) = 1;
    }
    return m;
}

}  // namespace

Eigen::MatrixXcd logical_unitary(const Circuit &circuit) {
    Eigen::MatrixXcd u = unitary_of(circuit);
    return layout_permutation(circuit.readout) * u * layout_permutation(circuit.initial_layout).transpose();
}

void write_circuit(std::ostream &out, const Circuit &circuit) {
    out << "cqedsim-circuit 1\n";
    out << "width " << circuit.width << "\n";
    if (!circuit.roles.empty()) {
        out << "roles";
        for (const Role &r : circuit.roles) {
            out << " " << r.str();
        }
        out << "\n";
    }
    out << "layout";
    for (int v : circuit.initial_layout) {
        out << " " << v;
    }
    out << "\nreadout";
    for (int v : circuit.readout) {
        out << " " << v;
    }
    out << "\n";
    out << std::setprecision(17);
    for (const Gate &g : circuit.gates) {
        out << gate_name(g.kind) << " " << g.qubits[0];
        if (g.arity() == 2) {
            out << "," << g.qubits[1];
        }
        for (int k = 0; k < gate_param_count(g.kind); k++) {
            out << "," << g.params[k];
        }
        out << "\n";
    }
}

std::string circuit_to_string(const Circuit &circuit) {
    std::ostringstream ss;
    write_circuit(ss, circuit);
    return ss.str();
}

Circuit read_circuit(std::istream &in) {
    std::string line;
    Circuit c;
    bool header = false;
    bool have_width = false;
    int line_no = 0;
    auto fail = [&](const std::string &msg) {
        throw std::invalid_argument("circuit line " + std::to_string(line_no) + ": " + msg);
    };
    while (std::getline(in, line)) {
        line_no++;
        if (line.empty() || line[0] == '#') {
            continue;
        }
        std::istringstream ss(line);
        std::string word;
        ss >> word;
        if (!header) {
            int version = 0;
            if (word != "cqedsim-circuit" || !(ss >> version) || version != 1) {
                fail("expected 'cqedsim-circuit 1' header");
            }
            header = true;
            continue;
        }
        if (word == "width") {
            int w;
            if (!(ss >> w)) {
                fail("bad width");
            }
            c = Circuit(w);
            have_width = true;
        } else if (word == "roles") {
            std::string r;
            c.roles.clear();
            while (ss >> r) {
                c.roles.push_back(Role::parse(r));
            }
        } else if (word == "layout" || word == "readout") {
            std::vector<int> v;
            int x;
            while (ss >> x) {
                v.push_back(x);
            }
            (word == "layout" ? c.initial_layout : c.readout) = v;
        } else {
            if (!have_width) {
                fail("gate before width");
            }
            auto kind = parse_gate_kind(word);
            if (!kind) {
                fail("unknown gate '" + word + "'");
            }
            std::string rest;
            std::getline(ss, rest);
            std::vector<std::string> fields;
            std::stringstream fs(rest);
            std::string f;
            while (std::getline(fs, f, ',')) {
                fields.push_back(f);
            }
            int arity = gate_arity(*kind);
            int np = gate_param_count(*kind);
            if ((int)fields.size() != arity + np) {
                fail("wrong number of fields for " + word);
            }
            Gate g;
            g.kind = *kind;
            for (int k = 0; k < arity; k++) {
                g.qubits[k] = std::stoi(fields[k]);
            }
            for (int k = 0; k < np; k++) {
                g.params[k] = std::stod(fields[arity + k]);
            }
            c.append(g);
        }
    }
    if (!header || !have_width) {
        throw std::invalid_argument("circuit text missing header or width");
    }
    c.validate();
    return c;
}

Circuit circuit_from_string(const std::string &text) {
    std::istringstream ss(text);
    return read_circuit(ss);
}

}  // namespace cqed
