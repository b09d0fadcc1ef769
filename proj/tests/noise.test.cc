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

#include <gtest/gtest.h>

#include <numeric>
#include <sstream>

#include "cqed/mitigation.h"
#include "cqed/transpiler.h"

using namespace cqed;

namespace {

Circuit default_circuit(double t, bool compiled = true) {
    TCParams p = TCParams::identical(3, 4, 2, 1);
    Circuit c = synthesize_qmarina(populations(evolve_single_excitation(p, t)), 1).circuit;
    return compiled ? transpile(c, GateSetSpec::ion(), {}) : c;
}

double hw1_fraction(const std::vector<double> &p) {
    double s = 0;
    for (size_t i = 0; i < p.size(); i++) {
        if (std::popcount(i) == 1) {
            s += p[i];
        }
    }
    return s;
}

}  // namespace

TEST(FidelityConversion, Values) {
    EXPECT_NEAR(depolarizing_from_fidelity(0.984, 4), 0.016 * 4 / 3, 1e-15);
    EXPECT_NEAR(depolarizing_from_fidelity(0.993, 2), 0.014, 1e-15);
    EXPECT_DOUBLE_EQ(depolarizing_from_fidelity(1, 4), 0);
    EXPECT_THROW(depolarizing_from_fidelity(0, 4), std::invalid_argument);
    EXPECT_THROW(depolarizing_from_fidelity(1.2, 4), std::invalid_argument);
}

TEST(FidelityConversion, TableToNoise) {
    NoiseModel m = noise_from_fidelity(FidelityTable::qscout_run(0));
    EXPECT_NEAR(m.depol_1q, 0.014, 1e-12);
    EXPECT_NEAR(m.depol_for_pair(0, 1), 0.021333333333333333, 1e-12);
    EXPECT_NEAR(m.depol_for_pair(1, 0), 0.021333333333333333, 1e-12);
    EXPECT_NEAR(m.depol_for_pair(0, 2), 0.009333333333333333, 1e-12);
    // (1, 2) is not listed: mean fidelity 0.986.
    EXPECT_NEAR(m.depol_for_pair(1, 2), 0.018666666666666666, 1e-12);
}

TEST(FidelityTable, RoundTrip) {
    for (int run = 0; run < 4; run++) {
        FidelityTable t = FidelityTable::qscout_run(run);
        std::istringstream in(t.to_text());
        FidelityTable u = FidelityTable::parse(in);
        ASSERT_EQ(u.pairs.size(), t.pairs.size());
        EXPECT_DOUBLE_EQ(u.single_qubit_fidelity, t.single_qubit_fidelity);
        for (size_t k = 0; k < t.pairs.size(); k++) {
            EXPECT_EQ(u.pairs[k].a, t.pairs[k].a);
            EXPECT_EQ(u.pairs[k].b, t.pairs[k].b);
            EXPECT_EQ(u.pairs[k].connectivity, t.pairs[k].connectivity);
            EXPECT_DOUBLE_EQ(u.pairs[k].fidelity, t.pairs[k].fidelity);
            EXPECT_DOUBLE_EQ(u.pairs[k].plus, t.pairs[k].plus);
            EXPECT_DOUBLE_EQ(u.pairs[k].minus, t.pairs[k].minus);
        }
    }
    EXPECT_THROW(FidelityTable::qscout_run(4), std::invalid_argument);
}

TEST(FidelityTable, ParseErrors) {
    for (const char *bad : {"0-1 | nn | 1.5 | 0 | 0\n", "0-0 | nn | 0.9 | 0 | 0\n", "0-1 | nn | 0.9\n", "01 | nn | 0.9 | 0 | 0\n",
                            "0-1 | nn | x | 0 | 0\n"}) {
        std::istringstream in(bad);
        EXPECT_THROW(FidelityTable::parse(in), std::invalid_argument) << bad;
    }
    EXPECT_THROW(FidelityTable::load("/nonexistent/table.txt"), std::runtime_error);
}

TEST(NoiseModel, Validation) {
    NoiseModel m;
    EXPECT_TRUE(m.is_noiseless());
    m.depol_2q = 1.5;
    EXPECT_THROW(m.validate(), std::invalid_argument);
    m = NoiseModel{};
    m.spam_flip = -0.1;
    EXPECT_THROW(m.validate(), std::invalid_argument);
    m = NoiseModel{};
    m.jitter_batches = 0;
    EXPECT_THROW(m.validate(), std::invalid_argument);
    EXPECT_FALSE(NoiseModel::ion().is_noiseless());
    EXPECT_FALSE(NoiseModel::superconducting().is_noiseless());
}

TEST(Noisy, ZeroNoiseMatchesIdealSampling) {
    Circuit c = default_circuit(0.7);
    EXPECT_EQ(apply_noisy(c, NoiseModel{}, 5000, 42), sample_counts(c, 5000, 42));
    std::vector<double> p = noisy_distribution(c, NoiseModel{});
    std::vector<double> ideal = simulate_statevector(c);
    for (size_t i = 0; i < p.size(); i++) {
        EXPECT_NEAR(p[i], ideal[i], 1e-12);
    }
}

TEST(Noisy, DensityMatrixPhysical) {
    Circuit c = default_circuit(1.3);
    for (const NoiseModel &m : {NoiseModel::ion(), NoiseModel::superconducting()}) {
        Rng rng(5);
        Eigen::MatrixXcd rho = noisy_density_matrix(c, m, &rng);
        EXPECT_NEAR(rho.trace().real(), 1, 1e-10);
        EXPECT_LT((rho - rho.adjoint()).cwiseAbs().maxCoeff(), 1e-12);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho);
        EXPECT_GT(es.eigenvalues().minCoeff(), -1e-10);
    }
}

TEST(Noisy, FullDepolarizingGivesUniform) {
    Circuit c(2);
    c.append(Gate::x(0));
    c.append(Gate::cnot(0, 1));
    NoiseModel m;
    m.depol_2q = 1;
    for (double p : noisy_distribution(c, m)) {
        EXPECT_NEAR(p, 0.25, 1e-12);
    }
}

TEST(Noisy, DiscardGrowsWithNoise) {
    Circuit c = default_circuit(1.0);
    double last = -1;
    for (double p : {0.0, 0.01, 0.03, 0.1, 0.3}) {
        NoiseModel m;
        m.depol_2q = p;
        double discard = 1 - hw1_fraction(noisy_distribution(c, m));
        EXPECT_GE(discard, last - 1e-12);
        last = discard;
    }
    EXPECT_GT(last, 0.1);
}

TEST(Noisy, SpamFlipsSingleQubit) {
    Circuit c(1);
    NoiseModel m;
    m.spam_flip = 0.1;
    std::vector<double> p = noisy_distribution(c, m);
    EXPECT_NEAR(p[0], 0.9, 1e-12);
    EXPECT_NEAR(p[1], 0.1, 1e-12);
}

TEST(Noisy, SpamFollowsReadoutPermutation) {
    Circuit c(2);
    c.append(Gate::x(0));
    c.readout = {1, 0};
    NoiseModel m;
    m.spam_flip = 0.2;
    std::vector<double> ideal = simulate_statevector(c);
    std::vector<double> p = noisy_distribution(c, m);
    size_t hot = std::max_element(ideal.begin(), ideal.end()) - ideal.begin();
    EXPECT_NEAR(p[hot], 0.8 * 0.8, 1e-12);
    EXPECT_NEAR(p[hot ^ 3], 0.2 * 0.2, 1e-12);
}

TEST(Noisy, OverRotation) {
    Circuit c(1);
    c.append(Gate::rx(0, M_PI / 2));
    NoiseModel m;
    m.overrotation[GateKind::RX] = 0.1;
    EXPECT_NEAR(noisy_distribution(c, m)[1], std::pow(std::sin(1.1 * M_PI / 4), 2), 1e-12);

    // A fixed gate raised to 1 + eps: CZ^(1+eps) on |11> adds a phase only;
    // sandwiched in Hadamards the population leak is sin^2(pi eps / 2).
    Circuit d(2);
    d.append(Gate::x(0));
    d.append(Gate::h(1));
    d.append(Gate::cz(0, 1));
    d.append(Gate::h(1));
    NoiseModel n;
    n.overrotation[GateKind::CZ] = 0.1;
    std::vector<double> p = noisy_distribution(d, n);
    EXPECT_NEAR(p[1], std::pow(std::sin(M_PI * 0.1 / 2), 2), 1e-12);
    EXPECT_NEAR(p[3], std::pow(std::cos(M_PI * 0.1 / 2), 2), 1e-12);
}

TEST(Noisy, JitterIsDeterministicAndActive) {
    Circuit c = default_circuit(0.8);
    NoiseModel m;
    m.amplitude_noise = 0.2;
    Rng a(1), b(1), d(2);
    std::vector<double> pa = noisy_distribution(c, m, &a);
    std::vector<double> pb = noisy_distribution(c, m, &b);
    std::vector<double> pd = noisy_distribution(c, m, &d);
    EXPECT_EQ(pa, pb);
    EXPECT_NE(pa, pd);
    std::vector<double> plain = noisy_distribution(c, m), ideal = simulate_statevector(c);
    for (size_t i = 0; i < ideal.size(); i++) {
        EXPECT_NEAR(plain[i], ideal[i], 1e-12);
    }
}

TEST(Noisy, ApplyNoisyDeterminism) {
    Circuit c = default_circuit(2.0);
    NoiseModel m = NoiseModel::ion();
    Counts a = apply_noisy(c, m, 3000, 9);
    EXPECT_EQ(a, apply_noisy(c, m, 3000, 9));
    EXPECT_NE(a, apply_noisy(c, m, 3000, 10));
    EXPECT_EQ(a.total, 3000u);
    NoiseModel m2 = m;
    m2.seed = 1;
    EXPECT_NE(a, apply_noisy(c, m2, 3000, 9));
}

TEST(Noisy, IonDiscardBand) {
    // Discarded fraction over the default grid for the manual compilation.
    double sum = 0;
    int n = 0;
    for (int k = 0; k < 51; k += 5) {
        Counts counts = apply_noisy(default_circuit(0.06 * k), NoiseModel::ion(), 4000, k);
        sum += postselect(counts).discard_fraction;
        n++;
    }
    double mean = sum / n;
    EXPECT_GT(mean, 0.05);
    EXPECT_LT(mean, 0.40);
}

TEST(Noisy, WidthLimit) {
    Circuit c(11);
    NoiseModel m;
    m.depol_1q = 0.01;
    EXPECT_THROW(noisy_distribution(c, m), std::invalid_argument);
}
