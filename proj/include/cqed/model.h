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

#ifndef CQED_MODEL_H
#define CQED_MODEL_H

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <complex>
#include <span>
#include <vector>

namespace cqed {

using cdouble = std::complex<double>;

/// Physical description of an open Tavis-Cummings system. All rates are
/// angular (rad/ns, hbar = 1); times are in ns.
struct TCParams {
    int n_emitters = 1;
    std::vector<double> couplings;
    double kappa = 0;
    double cavity_freq = 0;
    std::vector<double> emitter_freqs;
    /// 1-based index of the initially excited emitter.
    int excited_emitter = 1;

    /// Throws std::invalid_argument when an invariant is violated.
    void validate() const;

    /// N identical emitters resonant with the cavity.
    static TCParams identical(int n_emitters, double g, double kappa, int excited_emitter = 1);
};

/// Emitter populations plus the combined cavity/environment population.
struct PopulationDistribution {
    std::vector<double> p_emitters;
    double p_cav_env = 0;

    size_t size() const {
        return p_emitters.size() + 1;
    }
    double total() const;
    /// Emitters first, cavity/environment last.
    std::vector<double> as_vector() const;
    static PopulationDistribution from_vector(std::span<const double> v);
    void validate(double tol = 1e-10) const;
};

struct SingleExcitationState {
    /// c_1..c_N for the emitters followed by the cavity amplitude.
    Eigen::VectorXcd amplitudes;
    double p_lost = 0;
};

/// Non-Hermitian generator of the no-jump evolution restricted to the
/// single-excitation manifold {|e_1>, ..., |e_N>, |1_cav>}, written in the frame
/// rotating at the cavity frequency.
Eigen::MatrixXcd effective_hamiltonian(const TCParams &params);

/// exp(-i H_eff t).
Eigen::MatrixXcd single_excitation_propagator(const TCParams &params, double t);

SingleExcitationState evolve_single_excitation(const TCParams &params, double t);

/// Evaluates the state on a whole grid of times (each entry independent).
std::vector<SingleExcitationState> evolve_single_excitation(const TCParams &params, std::span<const double> times);

PopulationDistribution populations(const SingleExcitationState &state);

/// Collective vacuum Rabi rate sqrt(N) g. Requires identical resonant emitters.
double rabi_frequency(const TCParams &params);

/// Operators of the full emitter + truncated-Fock-space model. Basis index is
/// n * 2^N + (emitter bits), with emitter i on bit i-1.
struct OperatorSet {
    int n_emitters = 0;
    int fock_cutoff = 0;
    int dim = 0;
    Eigen::MatrixXcd a;
    Eigen::MatrixXcd a_dag;
    std::vector<Eigen::MatrixXcd> sigma_plus;
    std::vector<Eigen::MatrixXcd> sigma_minus;
    std::vector<Eigen::MatrixXcd> sigma_z;
    /// Tavis-Cummings Hamiltonian in the frame rotating at the cavity frequency.
    Eigen::MatrixXcd hamiltonian;

    /// D_a(rho) = 2 a rho a^dag - {a^dag a, rho}.
    Eigen::MatrixXcd dissipator(const Eigen::MatrixXcd &rho) const;
};

OperatorSet build_operators(const TCParams &params, int fock_cutoff);

struct LindbladOptions {
    int fock_cutoff = 2;
    double dt = 1e-4;
};

struct LindbladResult {
    PopulationDistribution populations;
    double p_cavity = 0;
    /// Integrated outgoing flux kappa * <a^dag a> dt.
    double p_environment = 0;
    /// Population of the global ground state; equals p_environment up to integration error.
    double p_ground = 0;
    double trace_error = 0;
    /// |sum of emitter, cavity and environment populations - 1|.
    double conservation_error = 0;
    /// Set when any population drifted below -1e-9.
    bool negative_drift = false;
};

/// Integrates the full Lindblad master equation with a fixed-step classical
/// RK4 integrator. `times` must be nondecreasing and nonnegative; each grid time
/// is reached by an exact final partial step.
std::vector<LindbladResult> lindblad_oracle(
    const TCParams &params, std::span<const double> times, const LindbladOptions &options = {});

LindbladResult lindblad_oracle(const TCParams &params, double t, int fock_cutoff = 2, double dt = 1e-4);

}  // namespace cqed

#endif
