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

#include "cqed/noise.h"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>
#include <stdexcept>

namespace cqed {

namespace {

std::string trim(const std::string &s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) {
        return "";
    }
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

void check_probability(double p, const char *what) {
    if (!(p >= 0 && p <= 1)) {
        throw std::invalid_argument(std::string(what) + " must be a probability in [0, 1]");
    }
}

// Applies m to the row index of every column of rho.
void apply_rows(Eigen::MatrixXcd &rho, const Gate &g, const Eigen::MatrixXcd &m) {
    const uint64_t dim = rho.rows();
    const Eigen::Index cols = rho.cols();
    if (g.arity() == 1) {
        const uint64_t bit = uint64_t{1} << g.qubits[0];
        for (Eigen::Index c = 0; c < cols; c++) {
            for (uint64_t i = 0; i < dim; i++) {
                if (i & bit) {
                    continue;
                }
                cdouble a0 = rho(i, c), a1 = rho(i | bit, c);
                rho(i, c) = m(0, 0) * a0 + m(0, 1) * a1;
                rho(i | bit, c) = m(1, 0) * a0 + m(1, 1) * a1;
            }
        }
        return;
    }
    const uint64_t b0 = uint64_t{1} << g.qubits[0];
    const uint64_t b1 = uint64_t{1} << g.qubits[1];
    for (Eigen::Index c = 0; c < cols; c++) {
        for (uint64_t i = 0; i < dim; i++) {
            if (i & (b0 | b1)) {
                continue;
            }
            const uint64_t idx[4] = {i, i | b1, i | b0, i | b0 | b1};
            cdouble a[4];
            for (int k = 0; k < 4; k++) {
                a[k] = rho(idx[k], c);
            }
            for (int r = 0; r < 4; r++) {
                cdouble acc = 0;
                for (int k = 0; k < 4; k++) {
                    acc += m(r, k) * a[k];
                }
                rho(idx[r], c) = acc;
            }
        }
    }
}

void apply_unitary(Eigen::MatrixXcd &rho, const Gate &g, const Eigen::MatrixXcd &m) {
    apply_rows(rho, g, m);
    Eigen::MatrixXcd t = rho.adjoint();
    apply_rows(t, g, m);
    rho = t.adjoint();
}

// rho -> (1 - p) rho + p (tr_S rho) (x) I_S / d_S for the qubits in `mask`.
void depolarize(Eigen::MatrixXcd &rho, uint64_t mask, double p) {
    if (p <= 0) {
        return;
    }
    const uint64_t dim = rho.rows();
    std::vector<uint64_t> sub;  // all assignments of the masked bits
    for (uint64_t s = 0;; s = (s - mask) & mask) {
        sub.push_back(s);
        if (((s - mask) & mask) == 0) {
            break;
        }
    }
    const double inv_d = 1.0 / (double)sub.size();
    Eigen::MatrixXcd out = (1 - p) * rho;
    for (uint64_t i = 0; i < dim; i++) {
        if (i & mask) {
            continue;
        }
        for (uint64_t j = 0; j < dim; j++) {
            if (j & mask) {
                continue;
            }
            cdouble tr = 0;
            for (uint64_t s : sub) {
                tr += rho(i | s, j | s);
            }
            cdouble add = p * inv_d * tr;
            for (uint64_t s : sub) {
                out(i | s, j | s) += add;
            }
        }
    }
    rho = std::move(out);
}

Eigen::MatrixXcd matrix_power(const Eigen::MatrixXcd &u, double power) {
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(u);
    Eigen::VectorXcd d = es.eigenvalues();
    for (Eigen::Index k = 0; k < d.size(); k++) {
        d[k] = std::polar(std::pow(std::abs(d[k]), power), std::arg(d[k]) * power);
    }
    const Eigen::MatrixXcd &v = es.eigenvectors();
    return v * d.asDiagonal() * v.inverse();
}

bool has_angle(GateKind k) {
    return gate_param_count(k) > 0;
}

Eigen::MatrixXcd noisy_matrix(const Gate &g, const NoiseModel &noise, Rng *jitter) {
    Gate h = g;
    double eps = 0;
    if (auto it = noise.overrotation.find(g.kind); it != noise.overrotation.end()) {
        eps = it->second;
    }
    double delta = 0;
    if (jitter && noise.amplitude_noise > 0 && (g.kind == GateKind::MS_XX || g.kind == GateKind::ZZ)) {
        std::normal_distribution<double> n(0.0, noise.amplitude_noise * std::abs(g.params[0]));
        delta = n(*jitter);
    }
    if (has_angle(g.kind)) {
        h.params[0] = g.params[0] * (1 + eps) + delta;
        return h.matrix();
    }
    if (eps != 0) {
        return matrix_power(g.matrix(), 1 + eps);
    }
    return g.matrix();
}

void apply_spam(std::vector<double> &probs, int width, double flip) {
    if (flip <= 0) {
        return;
    }
    for (int q = 0; q < width; q++) {
        const uint64_t bit = uint64_t{1} << q;
        for (uint64_t i = 0; i < probs.size(); i++) {
            if (i & bit) {
                continue;
            }
            double a = probs[i], b = probs[i | bit];
            probs[i] = (1 - flip) * a + flip * b;
            probs[i | bit] = (1 - flip) * b + flip * a;
        }
    }
}

}  // namespace

void FidelityTable::validate() const {
    if (!(single_qubit_fidelity > 0 && single_qubit_fidelity <= 1)) {
        throw std::invalid_argument("single-qubit fidelity must lie in (0, 1]");
    }
    for (const FidelityEntry &e : pairs) {
        if (!(e.fidelity > 0 && e.fidelity <= 1)) {
            throw std::invalid_argument("pair fidelity must lie in (0, 1]");
        }
        if (e.a == e.b || e.a < 0 || e.b < 0) {
            throw std::invalid_argument("fidelity table pair must name two distinct qubits");
        }
    }
}

FidelityTable FidelityTable::qscout_run(int run) {
    struct Row {
        int a, b;
        const char *conn;
    };
    static const Row rows[5] = {{0, 1, "nearest neighbor"},
                                {0, 2, "nearest neighbor"},
                                {0, 3, "next-nearest neighbor"},
                                {1, 3, "nearest neighbor"},
                                {2, 3, "outer"}};
    // {fidelity, +, -} per pair.
    static const double data[4][5][3] = {
        {{0.984, 0.008, 0.009}, {0.993, 0.006, 0.008}, {0.976, 0.009, 0.010}, {0.992, 0.006, 0.008}, {0.985, 0.008, 0.009}},
        {{0.975, 0.009, 0.010}, {0.983, 0.008, 0.009}, {0.983, 0.008, 0.010}, {0.990, 0.007, 0.009}, {0.978, 0.008, 0.010}},
        {{0.988, 0.006, 0.008}, {0.990, 0.006, 0.009}, {0.984, 0.008, 0.009}, {0.988, 0.006, 0.008}, {0.981, 0.008, 0.010}},
        {{0.995, 0.005, 0.007}, {0.988, 0.007, 0.009}, {0.988, 0.007, 0.009}, {0.994, 0.005, 0.007}, {0.985, 0.007, 0.009}},
    };
    if (run < 0 || run > 3) {
        throw std::invalid_argument("fidelity table run must be 0..3");
    }
    FidelityTable t;
    t.name = "qscout-run" + std::to_string(run);
    t.single_qubit_fidelity = 0.993;
    for (int k = 0; k < 5; k++) {
        t.pairs.push_back({rows[k].a, rows[k].b, rows[k].conn, data[run][k][0], data[run][k][1], data[run][k][2]});
    }
    return t;
}

FidelityTable FidelityTable::parse(std::istream &in) {
    FidelityTable t;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        lineno++;
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        if (line[0] == '#') {
            std::string body = trim(line.substr(1));
            auto colon = body.find(':');
            if (colon != std::string::npos) {
                std::string key = trim(body.substr(0, colon));
                std::string val = trim(body.substr(colon + 1));
                if (key == "single_qubit_fidelity") {
                    t.single_qubit_fidelity = std::stod(val);
                } else if (key == "name") {
                    t.name = val;
                }
            }
            continue;
        }
        std::vector<std::string> cols;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, '|')) {
            cols.push_back(trim(cell));
        }
        if (cols.size() != 5) {
            throw std::invalid_argument("fidelity table line " + std::to_string(lineno) + ": expected 5 columns");
        }
        FidelityEntry e;
        auto dash = cols[0].find('-');
        if (dash == std::string::npos) {
            throw std::invalid_argument("fidelity table line " + std::to_string(lineno) + ": pair must be 'a-b'");
        }
        try {
            e.a = std::stoi(cols[0].substr(0, dash));
            e.b = std::stoi(cols[0].substr(dash + 1));
            e.connectivity = cols[1];
            e.fidelity = std::stod(cols[2]);
            e.plus = std::stod(cols[3]);
            e.minus = std::stod(cols[4]);
        } catch (const std::logic_error &) {
            throw std::invalid_argument("fidelity table line " + std::to_string(lineno) + ": malformed number");
        }
        t.pairs.push_back(e);
    }
    t.validate();
    return t;
}

FidelityTable FidelityTable::load(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open fidelity table '" + path + "'");
    }
    FidelityTable t = parse(in);
    if (t.name.empty()) {
        t.name = path;
    }
    return t;
}

std::string FidelityTable::to_text() const {
    std::ostringstream out;
    if (!name.empty()) {
        out << "# name: " << name << "\n";
    }
    out << "# single_qubit_fidelity: " << single_qubit_fidelity << "\n";
    for (const FidelityEntry &e : pairs) {
        out << e.a << "-" << e.b << " | " << e.connectivity << " | " << e.fidelity << " | " << e.plus << " | "
            << e.minus << "\n";
    }
    return out.str();
}

void NoiseModel::validate() const {
    check_probability(depol_1q, "depol_1q");
    check_probability(depol_2q, "depol_2q");
    for (const auto &[pair, p] : depol_2q_pair) {
        check_probability(p, "per-pair depol_2q");
    }
    check_probability(spam_flip, "spam_flip");
    if (!(amplitude_noise >= 0)) {
        throw std::invalid_argument("amplitude_noise must be >= 0");
    }
    if (jitter_batches < 1) {
        throw std::invalid_argument("jitter_batches must be >= 1");
    }
    for (const auto &[kind, eps] : overrotation) {
        if (!std::isfinite(eps)) {
            throw std::invalid_argument("overrotation must be finite");
        }
    }
}

double NoiseModel::depol_for_pair(int a, int b) const {
    auto it = depol_2q_pair.find({std::min(a, b), std::max(a, b)});
    return it == depol_2q_pair.end() ? depol_2q : it->second;
}

void NoiseModel::set_two_qubit_overrotation(double eps) {
    for (GateKind k : {GateKind::CRY, GateKind::CNOT, GateKind::CZ, GateKind::ZZ, GateKind::MS_XX, GateKind::SWAP}) {
        overrotation[k] = eps;
    }
}

bool NoiseModel::is_noiseless() const {
    if (depol_1q > 0 || depol_2q > 0 || amplitude_noise > 0 || spam_flip > 0) {
        return false;
    }
    for (const auto &[pair, p] : depol_2q_pair) {
        if (p > 0) {
            return false;
        }
    }
    for (const auto &[kind, eps] : overrotation) {
        if (eps != 0) {
            return false;
        }
    }
    return true;
}

NoiseModel NoiseModel::ion(int run) {
    NoiseModel m = noise_from_fidelity(FidelityTable::qscout_run(run));
    m.amplitude_noise = 0.05;
    m.spam_flip = 0.005;
    return m;
}

NoiseModel NoiseModel::superconducting() {
    NoiseModel m;
    m.depol_1q = 0.001;
    m.depol_2q = 0.01;
    m.set_two_qubit_overrotation(0.03);
    m.spam_flip = 0.01;
    return m;
}

double depolarizing_from_fidelity(double fidelity, int dim) {
    if (!(fidelity > 0 && fidelity <= 1)) {
        throw std::invalid_argument("fidelity must lie in (0, 1]");
    }
    double p = (1 - fidelity) * dim / (dim - 1);
    return std::min(p, 1.0);
}

NoiseModel noise_from_fidelity(const FidelityTable &table) {
    table.validate();
    NoiseModel m;
    m.depol_1q = depolarizing_from_fidelity(table.single_qubit_fidelity, 2);
    double sum = 0;
    for (const FidelityEntry &e : table.pairs) {
        double p = depolarizing_from_fidelity(e.fidelity, 4);
        m.depol_2q_pair[{std::min(e.a, e.b), std::max(e.a, e.b)}] = p;
        sum += p;
    }
    m.depol_2q = table.pairs.empty() ? 0 : sum / table.pairs.size();
    return m;
}

Eigen::MatrixXcd noisy_density_matrix(const Circuit &circuit, const NoiseModel &noise, Rng *jitter) {
    circuit.validate();
    noise.validate();
    if (circuit.width > 10) {
        throw std::invalid_argument("noisy simulation: width must be <= 10");
    }
    const Eigen::Index dim = Eigen::Index{1} << circuit.width;
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(dim, dim);
    rho(0, 0) = 1;
    for (const Gate &g : circuit.gates) {
        apply_unitary(rho, g, noisy_matrix(g, noise, jitter));
        if (g.arity() == 1) {
            depolarize(rho, uint64_t{1} << g.qubits[0], noise.depol_1q);
        } else {
            uint64_t mask = (uint64_t{1} << g.qubits[0]) | (uint64_t{1} << g.qubits[1]);
            depolarize(rho, mask, noise.depol_for_pair(g.qubits[0], g.qubits[1]));
        }
    }
    return rho;
}

std::vector<double> noisy_distribution(const Circuit &circuit, const NoiseModel &noise, Rng *jitter) {
    Eigen::MatrixXcd rho = noisy_density_matrix(circuit, noise, jitter);
    std::vector<double> probs(rho.rows());
    for (Eigen::Index i = 0; i < rho.rows(); i++) {
        probs[i] = std::max(0.0, rho(i, i).real());
    }
    apply_spam(probs, circuit.width, noise.spam_flip);
    return physical_to_logical(probs, circuit.readout);
}

Counts apply_noisy(const Circuit &circuit, const NoiseModel &noise, uint64_t shots, uint64_t seed) {
    if (shots < 1) {
        throw std::invalid_argument("shots must be >= 1");
    }
    noise.validate();
    if (noise.is_noiseless()) {
        return sample_distribution(simulate_statevector(circuit), circuit.width, shots, derive_seed(seed, {noise.seed}));
    }
    const bool jitter = noise.amplitude_noise > 0;
    const uint64_t batches = jitter ? std::min<uint64_t>(noise.jitter_batches, shots) : 1;
    Counts total;
    total.width = circuit.width;
    for (uint64_t b = 0; b < batches; b++) {
        uint64_t n = shots / batches + (b < shots % batches ? 1 : 0);
        Rng jrng(derive_seed(seed, {noise.seed, b, 1}));
        std::vector<double> probs = noisy_distribution(circuit, noise, jitter ? &jrng : nullptr);
        uint64_t sample_seed = b == 0 ? derive_seed(seed, {noise.seed}) : derive_seed(seed, {noise.seed, b});
        total.merge(sample_distribution(probs, circuit.width, n, sample_seed));
    }
    return total;
}

}  // namespace cqed
