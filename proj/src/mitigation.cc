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

#include "cqed/mitigation.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

#include "cqed/rng.h"

namespace cqed {

namespace {

int count_emitters(const std::vector<Role> &roles) {
    int n = 0;
    for (const Role &r : roles) {
        if (r.kind == Role::Kind::Emitter) {
            n++;
        }
    }
    return n;
}

void add_to_role(PopulationDistribution &p, const Role &r, double w) {
    if (r.kind == Role::Kind::CavityEnv) {
        p.p_cav_env += w;
    } else {
        p.p_emitters[r.emitter - 1] += w;
    }
}

void require_roles(const Counts &counts, const std::vector<Role> &roles) {
    if ((int)roles.size() != counts.width) {
        throw std::invalid_argument("roles must cover every measured qubit");
    }
}

// Index of the Pauli pair equal to m up to phase, or -1.
int pauli_pair_index(const Mat4 &m) {
    for (int k = 0; k < 16; k++) {
        Mat4 p = kron(pauli_matrix(k / 4), pauli_matrix(k % 4));
        cdouble ov = (p.adjoint() * m).trace() / 4.0;
        if (std::abs(std::abs(ov) - 1) < 1e-9) {
            return k;
        }
    }
    return -1;
}

Gate pauli_gate(int which, int q) {
    auto [t, p, l] = u1q_angles(pauli_matrix(which));
    return Gate::u1q(q, t, p, l);
}

}  // namespace

void MitigationConfig::validate() const {
    if (rc_randomizations != 0 && (rc_randomizations < 2 || rc_randomizations > 10000)) {
        throw std::invalid_argument("rc_randomizations must be 0 or in [2, 10000]");
    }
    for (size_t i = 0; i < nox_factors.size(); i++) {
        int f = nox_factors[i];
        if (f < 1 || f % 2 == 0) {
            throw std::invalid_argument("NOX factors must be odd and >= 1");
        }
        if (i > 0 && f <= nox_factors[i - 1]) {
            throw std::invalid_argument("NOX factors must be strictly increasing");
        }
    }
    for (int e : average_identical) {
        if (e < 1) {
            throw std::invalid_argument("identical emitter indices are 1-based");
        }
    }
}

PostselectResult postselect(const Counts &counts) {
    PostselectResult r;
    r.kept.width = counts.width;
    for (const auto &[k, n] : counts.histogram) {
        if (std::popcount(k) == 1) {
            r.kept.add(k, n);
        } else {
            r.discarded += n;
        }
    }
    r.empty = r.kept.total == 0;
    r.discard_fraction = counts.total == 0 ? 0.0 : (double)r.discarded / (double)counts.total;
    return r;
}

std::optional<PopulationDistribution> populations_from_counts(const Counts &counts, const std::vector<Role> &roles) {
    require_roles(counts, roles);
    PopulationDistribution p;
    p.p_emitters.assign(count_emitters(roles), 0.0);
    uint64_t kept = 0;
    for (const auto &[k, n] : counts.histogram) {
        if (std::popcount(k) == 1) {
            add_to_role(p, roles[std::countr_zero(k)], (double)n);
            kept += n;
        }
    }
    if (kept == 0) {
        return std::nullopt;
    }
    for (double &v : p.p_emitters) {
        v /= (double)kept;
    }
    p.p_cav_env /= (double)kept;
    return p;
}

std::optional<PopulationDistribution> marginal_populations(const Counts &counts, const std::vector<Role> &roles) {
    require_roles(counts, roles);
    PopulationDistribution p;
    p.p_emitters.assign(count_emitters(roles), 0.0);
    double sum = 0;
    for (const auto &[k, n] : counts.histogram) {
        for (int l = 0; l < counts.width; l++) {
            if ((k >> l) & 1) {
                add_to_role(p, roles[l], (double)n);
                sum += (double)n;
            }
        }
    }
    if (sum == 0) {
        return std::nullopt;
    }
    for (double &v : p.p_emitters) {
        v /= sum;
    }
    p.p_cav_env /= sum;
    return p;
}

PopulationDistribution average_identical_emitters(const PopulationDistribution &pops, const std::set<int> &identical,
                                                  int excited) {
    if (identical.count(excited)) {
        throw std::invalid_argument("identical-emitter set must not contain the excited emitter");
    }
    PopulationDistribution out = pops;
    if (identical.size() < 2) {
        return out;
    }
    double mean = 0;
    for (int e : identical) {
        if (e < 1 || e > (int)pops.p_emitters.size()) {
            throw std::invalid_argument("identical emitter index out of range");
        }
        mean += pops.p_emitters[e - 1];
    }
    mean /= (double)identical.size();
    for (int e : identical) {
        out.p_emitters[e - 1] = mean;
    }
    return out;
}

std::vector<Circuit> randomize_compile(const Circuit &circuit, int n, uint64_t seed, const GateSetSpec &spec) {
    if (n < 2) {
        throw std::invalid_argument("randomized compiling needs at least 2 randomizations");
    }
    circuit.validate();
    // Pauli frames that each gate maps back onto Paulis.
    std::vector<std::vector<std::pair<int, int>>> frames(circuit.gates.size());
    for (size_t i = 0; i < circuit.gates.size(); i++) {
        const Gate &g = circuit.gates[i];
        if (!g.is_two_qubit()) {
            continue;
        }
        Mat4 u = g.matrix();
        for (int k = 0; k < 16; k++) {
            Mat4 p = kron(pauli_matrix(k / 4), pauli_matrix(k % 4));
            int out = pauli_pair_index(u * p * u.adjoint());
            if (out >= 0) {
                frames[i].push_back({k, out});
            }
        }
    }
    std::vector<Circuit> result;
    result.reserve(n);
    for (int r = 0; r < n; r++) {
        Rng rng(derive_seed(seed, {(uint64_t)r}));
        Circuit c = circuit;
        c.gates.clear();
        for (size_t i = 0; i < circuit.gates.size(); i++) {
            const Gate &g = circuit.gates[i];
            if (!g.is_two_qubit()) {
                c.append(g);
                continue;
            }
            std::uniform_int_distribution<size_t> pick(0, frames[i].size() - 1);
            auto [before, after] = frames[i][pick(rng)];
            c.append(pauli_gate(before / 4, g.qubits[0]));
            c.append(pauli_gate(before % 4, g.qubits[1]));
            c.append(g);
            c.append(pauli_gate(after / 4, g.qubits[0]));
            c.append(pauli_gate(after % 4, g.qubits[1]));
        }
        result.push_back(merge_single_qubit(c, spec));
    }
    return result;
}

Circuit nox_amplify(const Circuit &circuit, int lambda) {
    if (lambda < 1 || lambda % 2 == 0) {
        throw std::invalid_argument("NOX amplification factor must be odd and >= 1");
    }
    Circuit out = circuit;
    out.gates.clear();
    const int pairs = (lambda - 1) / 2;
    for (const Gate &g : circuit.gates) {
        out.append(g);
        if (!g.is_two_qubit()) {
            continue;
        }
        Gate inv = g.inverse();
        for (int k = 0; k < pairs; k++) {
            out.append(inv);
            out.append(g);
        }
    }
    return out;
}

NoxEstimate nox_extrapolate_step(const std::map<int, PopulationDistribution> &by_lambda) {
    if (by_lambda.size() < 2) {
        throw std::invalid_argument("NOX extrapolation needs at least two amplification factors");
    }
    const size_t n = by_lambda.size();
    double xm = 0;
    for (const auto &[x, p] : by_lambda) {
        xm += x;
    }
    xm /= (double)n;
    double sxx = 0;
    for (const auto &[x, p] : by_lambda) {
        sxx += (x - xm) * (x - xm);
    }
    const PopulationDistribution &first = by_lambda.begin()->second;
    const size_t dim = first.as_vector().size();
    std::vector<double> est(dim);
    for (size_t c = 0; c < dim; c++) {
        double ym = 0, sxy = 0;
        for (const auto &[x, p] : by_lambda) {
            ym += p.as_vector().at(c);
        }
        ym /= (double)n;
        for (const auto &[x, p] : by_lambda) {
            sxy += (x - xm) * (p.as_vector().at(c) - ym);
        }
        est[c] = ym - (sxy / sxx) * xm;
    }
    NoxEstimate out;
    double sum = 0;
    for (double &v : est) {
        if (v < 0 || v > 1) {
            out.clipped = true;
            v = std::clamp(v, 0.0, 1.0);
        }
        sum += v;
    }
    if (sum <= 0) {
        out.clipped = true;
        est = first.as_vector();
        sum = 1;
    }
    for (double &v : est) {
        v /= sum;
    }
    out.pops = PopulationDistribution::from_vector(est);
    return out;
}

NoxResult nox_extrapolate(const std::map<int, std::vector<PopulationDistribution>> &results) {
    if (results.size() < 2) {
        throw std::invalid_argument("NOX extrapolation needs at least two amplification factors");
    }
    const size_t steps = results.begin()->second.size();
    for (const auto &[l, series] : results) {
        if (series.size() != steps) {
            throw std::invalid_argument("NOX series lengths differ across amplification factors");
        }
    }
    NoxResult out;
    for (size_t t = 0; t < steps; t++) {
        std::map<int, PopulationDistribution> step;
        for (const auto &[l, series] : results) {
            step[l] = series[t];
        }
        NoxEstimate e = nox_extrapolate_step(step);
        out.pops.push_back(e.pops);
        out.clipped.push_back(e.clipped);
    }
    return out;
}

}  // namespace cqed
