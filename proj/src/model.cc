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

#include "cqed/model.h"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <unsupported/Eigen/MatrixFunctions>

namespace cqed {

void TCParams::validate() const {
    if (n_emitters < 1) {
        throw std::invalid_argument("TCParams: n_emitters must be >= 1");
    }
    if (!(kappa >= 0)) {
        throw std::invalid_argument("TCParams: kappa must be nonnegative");
    }
    if (couplings.size() != (size_t)n_emitters || emitter_freqs.size() != (size_t)n_emitters) {
        throw std::invalid_argument("TCParams: couplings and emitter_freqs must have n_emitters entries");
    }
    if (excited_emitter < 1 || excited_emitter > n_emitters) {
        throw std::invalid_argument(
            "TCParams: excited_emitter " + std::to_string(excited_emitter) + " out of range [1, " +
            std::to_string(n_emitters) + "]");
    }
    for (double g : couplings) {
        if (!std::isfinite(g)) {
            throw std::invalid_argument("TCParams: non-finite coupling");
        }
    }
}

TCParams TCParams::identical(int n_emitters, double g, double kappa, int excited_emitter) {
    TCParams p;
    p.n_emitters = n_emitters;
    p.couplings.assign(std::max(n_emitters, 0), g);
    p.kappa = kappa;
    p.cavity_freq = 0;
    p.emitter_freqs.assign(std::max(n_emitters, 0), 0.0);
    p.excited_emitter = excited_emitter;
    p.validate();
    return p;
}

double PopulationDistribution::total() const {
    return std::accumulate(p_emitters.begin(), p_emitters.end(), 0.0) + p_cav_env;
}

std::vector<double> PopulationDistribution::as_vector() const {
    std::vector<double> v = p_emitters;
    v.push_back(p_cav_env);
    return v;
}

PopulationDistribution PopulationDistribution::from_vector(std::span<const double> v) {
    if (v.size() < 2) {
        throw std::invalid_argument("PopulationDistribution needs at least one emitter and the cavity entry");
    }
    PopulationDistribution d;
    d.p_emitters.assign(v.begin(), v.end() - 1);
    d.p_cav_env = v.back();
    return d;
}

void PopulationDistribution::validate(double tol) const {
    for (double p : as_vector()) {
        if (!(p >= -tol)) {
            throw std::invalid_argument("PopulationDistribution: negative entry " + std::to_string(p));
        }
    }
    if (std::abs(total() - 1) > tol) {
        throw std::invalid_argument("PopulationDistribution: entries sum to " + std::to_string(total()));
    }
}

Eigen::MatrixXcd effective_hamiltonian(const TCParams &params) {
    params.validate();
    int n = params.n_emitters;
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(n + 1, n + 1);
    for (int i = 0; i < n; i++) {
        h(i, i) = params.emitter_freqs[i] - params.cavity_freq;
        h(i, n) = params.couplings[i];
        h(n, i) = params.couplings[i];
    }
    h(n, n) = cdouble(0, -params.kappa / 2);
    return h;
}

Eigen::MatrixXcd single_excitation_propagator(const TCParams &params, double t) {
    if (!(t >= 0)) {
        throw std::invalid_argument("propagation time must be nonnegative");
    }
    Eigen::MatrixXcd gen = effective_hamiltonian(params) * cdouble(0, -t);
    return gen.exp();
}

SingleExcitationState evolve_single_excitation(const TCParams &params, double t) {
    Eigen::MatrixXcd u = single_excitation_propagator(params, t);
    SingleExcitationState s;
    s.amplitudes = u.col(params.excited_emitter - 1);
    s.p_lost = std::clamp(1 - s.amplitudes.squaredNorm(), 0.0, 1.0);
    return s;
}

std::vector<SingleExcitationState> evolve_single_excitation(const TCParams &params, std::span<const double> times) {
    std::vector<SingleExcitationState> out;
    out.reserve(times.size());
    for (double t : times) {
        out.push_back(evolve_single_excitation(params, t));
    }
    return out;
}

PopulationDistribution populations(const SingleExcitationState &state) {
    PopulationDistribution d;
    auto n = state.amplitudes.size() - 1;
    for (Eigen::Index i = 0; i < n; i++) {
        d.p_emitters.push_back(std::norm(state.amplitudes[i]));
    }
    d.p_cav_env = std::norm(state.amplitudes[n]) + state.p_lost;
    return d;
}

double rabi_frequency(const TCParams &params) {
    params.validate();
    for (int i = 0; i < params.n_emitters; i++) {
        if (params.couplings[i] != params.couplings[0]) {
            throw std::domain_error("rabi_frequency: couplings are not identical");
        }
        if (params.emitter_freqs[i] != params.cavity_freq) {
            throw std::domain_error("rabi_frequency: emitters are not resonant with the cavity");
        }
    }
    return std::sqrt((double)params.n_emitters) * params.couplings[0];
}

OperatorSet build_operators(const TCParams &params, int fock_cutoff) {
    params.validate();
    if (fock_cutoff < 1) {
        throw std::invalid_argument("fock_cutoff must be >= 1");
    }
    OperatorSet ops;
    int n = params.n_emitters;
    int qdim = 1 << n;
    ops.n_emitters = n;
    ops.fock_cutoff = fock_cutoff;
    ops.dim = (fock_cutoff + 1) * qdim;
    int dim = ops.dim;

    ops.a = Eigen::MatrixXcd::Zero(dim, dim);
    for (int m = 1; m <= fock_cutoff; m++) {
        for (int b = 0; b < qdim; b++) {
            ops.a((m - 1) * qdim + b, m * qdim + b) = std::sqrt((double)m);
        }
    }
    ops.a_dag = ops.a.adjoint();

    for (int i = 0; i < n; i++) {
        Eigen::MatrixXcd sp = Eigen::MatrixXcd::Zero(dim, dim);
        Eigen::MatrixXcd sz = Eigen::MatrixXcd::Zero(dim, dim);
        for (int k = 0; k < dim; k++) {
            bool up = (k >> i) & 1;
            sz(k, k) = up ? 1.0 : -1.0;
            if (!up) {
                sp(k | (1 << i), k) = 1.0;
            }
        }
        ops.sigma_plus.push_back(sp);
        ops.sigma_minus.push_back(sp.adjoint());
        ops.sigma_z.push_back(sz);
    }

    // omega_c a^dag a + sum_i (omega_i/2) sigma_z_i - omega_c * (excitation number) = rotating frame.
    ops.hamiltonian = Eigen::MatrixXcd::Zero(dim, dim);
    for (int i = 0; i < n; i++) {
        double detuning = params.emitter_freqs[i] - params.cavity_freq;
        ops.hamiltonian += 0.5 * detuning * ops.sigma_z[i];
        ops.hamiltonian +=
            params.couplings[i] * (ops.sigma_plus[i] * ops.a + ops.a_dag * ops.sigma_minus[i]);
    }
    return ops;
}

Eigen::MatrixXcd OperatorSet::dissipator(const Eigen::MatrixXcd &rho) const {
    Eigen::MatrixXcd num = a_dag * a;
    return 2.0 * a * rho * a_dag - num * rho - rho * num;
}

namespace {

// Hand-rolled L(rho) exploiting sparsity of H and a (one nonzero per row of a)
// and Hermiticity of rho: -i[H, rho] = -i (X - X^dag) with X = H rho.
struct LindbladIntegrator {
    struct Entry {
        int col;
        cdouble value;
    };
    int dim = 0;
    std::vector<std::vector<Entry>> h_rows;
    std::vector<int> a_col;  // a(r, a_col[r]) = a_val[r], or -1
    std::vector<double> a_val;
    std::vector<double> number;
    double kappa = 0;
    Eigen::MatrixXcd x;

    void init(const OperatorSet &ops, double k) {
        dim = ops.dim;
        kappa = k;
        h_rows.assign(dim, {});
        a_col.assign(dim, -1);
        a_val.assign(dim, 0);
        number.assign(dim, 0);
        for (int r = 0; r < dim; r++) {
            for (int c = 0; c < dim; c++) {
                if (ops.hamiltonian(r, c) != cdouble(0)) {
                    h_rows[r].push_back({c, ops.hamiltonian(r, c)});
                }
                if (ops.a(r, c) != cdouble(0)) {
                    a_col[r] = c;
                    a_val[r] = ops.a(r, c).real();
                }
            }
        }
        Eigen::MatrixXcd num = ops.a_dag * ops.a;
        for (int r = 0; r < dim; r++) {
            number[r] = num(r, r).real();
        }
        x.resize(dim, dim);
    }

    // Writes L(rho) into out and returns the instantaneous loss flux.
    double derivative(const Eigen::MatrixXcd &rho, Eigen::MatrixXcd &out) {
        for (int k = 0; k < dim; k++) {
            const cdouble *col = rho.data() + (size_t)k * dim;
            cdouble *xc = x.data() + (size_t)k * dim;
            for (int r = 0; r < dim; r++) {
                cdouble acc = 0;
                for (const Entry &e : h_rows[r]) {
                    acc += e.value * col[e.col];
                }
                xc[r] = acc;
            }
        }
        const cdouble minus_i(0, -1);
        for (int k = 0; k < dim; k++) {
            for (int r = 0; r < dim; r++) {
                out(r, k) = minus_i * (x(r, k) - std::conj(x(k, r)));
            }
        }
        double flux = 0;
        if (kappa > 0) {
            for (int k = 0; k < dim; k++) {
                int ck = a_col[k];
                for (int r = 0; r < dim; r++) {
                    cdouble v = -0.5 * kappa * (number[r] + number[k]) * rho(r, k);
                    int cr = a_col[r];
                    if (cr >= 0 && ck >= 0) {
                        v += kappa * a_val[r] * a_val[k] * rho(cr, ck);
                    }
                    out(r, k) += v;
                }
            }
            for (int r = 0; r < dim; r++) {
                flux += number[r] * rho(r, r).real();
            }
        }
        return kappa * flux;
    }
};

LindbladResult measure(const Eigen::MatrixXcd &rho, double p_env, int n, int fock_cutoff) {
    int qdim = 1 << n;
    LindbladResult r;
    r.populations.p_emitters.assign(n, 0.0);
    double trace = 0;
    for (int m = 0; m <= fock_cutoff; m++) {
        for (int b = 0; b < qdim; b++) {
            int k = m * qdim + b;
            double p = rho(k, k).real();
            trace += p;
            if (p < -1e-9) {
                r.negative_drift = true;
            }
            r.p_cavity += m * p;
            for (int i = 0; i < n; i++) {
                if ((b >> i) & 1) {
                    r.populations.p_emitters[i] += p;
                }
            }
        }
    }
    r.p_ground = rho(0, 0).real();
    r.p_environment = p_env;
    r.populations.p_cav_env = r.p_cavity + p_env;
    r.trace_error = std::abs(trace - 1);
    r.conservation_error = std::abs(r.populations.total() - 1);
    for (double p : r.populations.p_emitters) {
        if (p < -1e-9) {
            r.negative_drift = true;
        }
    }
    return r;
}

}  // namespace

std::vector<LindbladResult> lindblad_oracle(
    const TCParams &params, std::span<const double> times, const LindbladOptions &options) {
    params.validate();
    if (!(options.dt > 0)) {
        throw std::invalid_argument("lindblad_oracle: dt must be positive");
    }
    OperatorSet ops = build_operators(params, options.fock_cutoff);
    LindbladIntegrator integ;
    integ.init(ops, params.kappa);

    int n = params.n_emitters;
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(ops.dim, ops.dim);
    int start = 1 << (params.excited_emitter - 1);
    rho(start, start) = 1.0;
    double p_env = 0;
    double now = 0;

    Eigen::MatrixXcd k1(ops.dim, ops.dim), k2(ops.dim, ops.dim), k3(ops.dim, ops.dim), k4(ops.dim, ops.dim);
    Eigen::MatrixXcd stage(ops.dim, ops.dim);

    std::vector<LindbladResult> out;
    out.reserve(times.size());
    for (double target : times) {
        if (!(target >= now - 1e-15)) {
            throw std::invalid_argument("lindblad_oracle: times must be nonnegative and nondecreasing");
        }
        double span = std::max(target - now, 0.0);
        long steps = (long)std::ceil(span / options.dt - 1e-9);
        double h = steps > 0 ? span / steps : 0.0;
        for (long s = 0; s < steps; s++) {
            double f1 = integ.derivative(rho, k1);
            stage = rho + (0.5 * h) * k1;
            double f2 = integ.derivative(stage, k2);
            stage = rho + (0.5 * h) * k2;
            double f3 = integ.derivative(stage, k3);
            stage = rho + h * k3;
            double f4 = integ.derivative(stage, k4);
            rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            p_env += (h / 6.0) * (f1 + 2 * f2 + 2 * f3 + f4);
        }
        now = std::max(now, target);
        out.push_back(measure(rho, p_env, n, options.fock_cutoff));
    }
    return out;
}

LindbladResult lindblad_oracle(const TCParams &params, double t, int fock_cutoff, double dt) {
    double times[1] = {t};
    return lindblad_oracle(params, times, LindbladOptions{fock_cutoff, dt})[0];
}

}  // namespace cqed
