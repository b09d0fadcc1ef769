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

#include "cqed/analysis.h"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace cqed;

namespace {

TimeSeries exact_series(int n_steps = 51, double t_max = 3) {
    TCParams p = TCParams::identical(3, 4, 2, 1);
    TimeSeries s;
    for (int k = 0; k < n_steps; k++) {
        double t = t_max * k / (n_steps - 1);
        s.times.push_back(t);
        s.pops.push_back(populations(evolve_single_excitation(p, t)));
    }
    return s;
}

double fraction_of_one(std::span<const Counts> data) {
    return (double)data[0].get(1) / (double)data[0].total;
}

}  // namespace

TEST(Hellinger, Values) {
    std::vector<double> a{0.5, 0.5}, b{1, 0};
    EXPECT_NEAR(hellinger(a, b), 0.541196100146197, 1e-14);
    EXPECT_NEAR(hellinger(a, b), hellinger(b, a), 1e-16);
    EXPECT_DOUBLE_EQ(hellinger(a, a), 0);
    std::vector<double> c{0, 1};
    EXPECT_NEAR(hellinger(b, c), 1, 1e-15);
}

TEST(Hellinger, Validation) {
    std::vector<double> a{0.5, 0.5}, bad{0.7, 0.7}, neg{1.5, -0.5}, shorter{1};
    EXPECT_THROW(hellinger(a, bad), std::invalid_argument);
    EXPECT_THROW(hellinger(a, neg), std::invalid_argument);
    EXPECT_THROW(hellinger(a, shorter), std::invalid_argument);
}

TEST(Hellinger, TriangleInequality) {
    std::mt19937_64 rng(1);
    std::gamma_distribution<double> g(0.5, 1);
    auto draw = [&] {
        std::vector<double> v(6);
        double s = 0;
        for (double &x : v) {
            s += x = g(rng);
        }
        for (double &x : v) {
            x /= s;
        }
        return v;
    };
    for (int k = 0; k < 500; k++) {
        auto p = draw(), q = draw(), r = draw();
        EXPECT_LE(hellinger(p, r), hellinger(p, q) + hellinger(q, r) + 1e-12);
    }
}

TEST(MeanHellinger, AveragesSteps) {
    TimeSeries a, b;
    a.times = b.times = {0, 1};
    a.pops = {PopulationDistribution::from_vector(std::vector<double>{0.5, 0.5}),
              PopulationDistribution::from_vector(std::vector<double>{1, 0})};
    b.pops = {PopulationDistribution::from_vector(std::vector<double>{1, 0}),
              PopulationDistribution::from_vector(std::vector<double>{1, 0})};
    EXPECT_NEAR(mean_hellinger(a, b), 0.541196100146197 / 2, 1e-14);
    b.times = {0, 2};
    EXPECT_THROW(mean_hellinger(a, b), std::invalid_argument);
}

TEST(Embed, PlacesHammingWeightOne) {
    PopulationDistribution p = PopulationDistribution::from_vector(std::vector<double>{0.2, 0.3, 0.5});
    std::vector<Role> roles{Role::cavity_env(), Role::emitter_qubit(1), Role::emitter_qubit(2)};
    std::vector<double> e = embed_populations(p, roles);
    ASSERT_EQ(e.size(), 8u);
    EXPECT_DOUBLE_EQ(e[1], 0.5);
    EXPECT_DOUBLE_EQ(e[2], 0.2);
    EXPECT_DOUBLE_EQ(e[4], 0.3);
    EXPECT_DOUBLE_EQ(e[0] + e[3] + e[5] + e[6] + e[7], 0);

    Counts c = Counts::from_bitstrings({{"001", 3}, {"110", 1}});
    std::vector<double> d = empirical_distribution(c);
    EXPECT_DOUBLE_EQ(d[1], 0.75);
    EXPECT_DOUBLE_EQ(d[6], 0.25);
    EXPECT_THROW(empirical_distribution(Counts{3, {}, 0}), std::invalid_argument);
}

TEST(Bootstrap, ZeroVariance) {
    std::vector<Counts> data{Counts::from_bitstrings({{"1", 100}})};
    Interval ci = bootstrap_ci(data, fraction_of_one, 200, 0.95, 3);
    EXPECT_DOUBLE_EQ(ci.lo, 1);
    EXPECT_DOUBLE_EQ(ci.hi, 1);
    EXPECT_DOUBLE_EQ(ci.point, 1);
}

TEST(Bootstrap, ContainsPointAndIsDeterministic) {
    std::vector<Counts> data{Counts::from_bitstrings({{"0", 700}, {"1", 300}})};
    Interval a = bootstrap_ci(data, fraction_of_one, 1000, 0.95, 5);
    Interval b = bootstrap_ci(data, fraction_of_one, 1000, 0.95, 5);
    EXPECT_EQ(a.lo, b.lo);
    EXPECT_EQ(a.hi, b.hi);
    EXPECT_TRUE(a.contains(a.point));
    EXPECT_DOUBLE_EQ(a.point, 0.3);
    // Normal approximation half width 1.96 sqrt(0.21 / 1000) = 0.0284.
    EXPECT_NEAR(a.width(), 2 * 0.0284, 0.008);
    Interval narrow = bootstrap_ci(data, fraction_of_one, 1000, 0.5, 5);
    EXPECT_LT(narrow.width(), a.width());
}

TEST(Bootstrap, Coverage) {
    const std::vector<double> truth{0.7, 0.3};
    int covered = 0;
    const int trials = 200;
    for (int k = 0; k < trials; k++) {
        std::vector<Counts> data{sample_distribution(truth, 1, 400, 1000 + k)};
        covered += bootstrap_ci(data, fraction_of_one, 500, 0.95, k).contains(0.3);
    }
    EXPECT_GE(covered, 182);
    EXPECT_LE(covered, 198);
}

TEST(Bootstrap, HellingerCoverage) {
    // Reference far from the truth, so the statistic is smooth in the counts.
    const std::vector<double> truth{0.6, 0.3, 0.1, 0.0};
    const std::vector<double> ref{0.25, 0.25, 0.25, 0.25};
    const double h_true = hellinger(truth, ref);
    CountsStatistic stat = [&](std::span<const Counts> d) {
        return hellinger(empirical_distribution(d[0]), ref);
    };
    int covered = 0;
    for (int k = 0; k < 200; k++) {
        std::vector<Counts> data{sample_distribution(truth, 2, 2000, 7000 + k)};
        covered += bootstrap_ci(data, stat, 400, 0.95, k).contains(h_true);
    }
    EXPECT_GE(covered, 182);
}

TEST(Bootstrap, Errors) {
    std::vector<Counts> none;
    EXPECT_THROW(bootstrap_ci(none, fraction_of_one), std::invalid_argument);
    std::vector<Counts> data{Counts::from_bitstrings({{"1", 10}})};
    EXPECT_THROW(bootstrap_ci(data, fraction_of_one, 0), std::invalid_argument);
    EXPECT_THROW(bootstrap_ci(data, fraction_of_one, 10, 1.0), std::invalid_argument);
}

TEST(Fft, MeanIsRemoved) {
    std::vector<double> t(20), x(20, 3.5);
    for (int k = 0; k < 20; k++) {
        t[k] = 0.1 * k;
    }
    Spectrum s = fft_spectrum(t, {x}, {"c"});
    for (double a : s.amplitudes[0]) {
        EXPECT_NEAR(a, 0, 1e-14);
    }
    EXPECT_THROW(rabi_peak_bin(s), std::invalid_argument);
}

TEST(Fft, CosinePeak) {
    const int n = 64;
    const double dt = 0.125;
    std::vector<double> t(n), x(n);
    for (int k = 0; k < n; k++) {
        t[k] = k * dt;
        x[k] = 0.4 * std::cos(2 * std::numbers::pi * 0.5 * t[k]);
    }
    Spectrum s = fft_spectrum(t, {x}, {"c"});
    EXPECT_EQ(s.frequencies.size(), (size_t)n / 2 + 1);
    EXPECT_NEAR(s.bin_width(), 1.0 / (n * dt), 1e-15);
    EXPECT_EQ(rabi_peak_bin(s), 4u);
    EXPECT_NEAR(rabi_peak(s), 0.5, 1e-12);
    EXPECT_NEAR(s.amplitudes[0][4], 0.2, 1e-12);
}

TEST(Fft, RobustToNoise) {
    const int n = 51;
    std::vector<double> t(n), x(n);
    std::mt19937_64 rng(4);
    std::normal_distribution<double> noise(0, 0.05);
    for (int k = 0; k < n; k++) {
        t[k] = 0.06 * k;
        x[k] = 0.5 + 0.4 * std::cos(2 * std::numbers::pi * 0.98 * t[k]) + noise(rng);
    }
    EXPECT_EQ(rabi_peak_bin(fft_spectrum(t, {x}, {"c"})), 3u);
}

TEST(Fft, ExactSeriesPeak) {
    Spectrum s = fft_spectrum(exact_series());
    ASSERT_EQ(s.channels.size(), 4u);
    EXPECT_EQ(s.channels[0], "e1");
    EXPECT_EQ(s.channels[3], "cav");
    EXPECT_NEAR(s.bin_width(), 0.32679738562091504, 1e-14);
    EXPECT_EQ(rabi_peak_bin(s, 0), 3u);
    EXPECT_NEAR(rabi_peak(s, 0), 0.9803921568627451, 1e-14);
    const double expected[] = {0, 0.017379, 0.026278, 0.094471, 0.067619, 0.029351};
    for (int k = 0; k < 6; k++) {
        EXPECT_NEAR(s.amplitudes[0][k], expected[k], 2e-6) << k;
    }
    // The collective Rabi frequency lies within one bin of the peak.
    double rabi = rabi_frequency(TCParams::identical(3, 4, 2, 1)) / (2 * std::numbers::pi);
    EXPECT_NEAR(rabi, 1.1026577908435842, 1e-12);
    EXPECT_LT(std::abs(rabi_peak(s, 0) - rabi), s.bin_width());
}

TEST(Fft, GridErrors) {
    std::vector<double> t{0, 0.1, 0.3}, x{1, 2, 3};
    EXPECT_THROW(fft_spectrum(t, {x}, {"c"}), std::invalid_argument);
    std::vector<double> one{0};
    EXPECT_THROW(fft_spectrum(one, {{1}}, {"c"}), std::invalid_argument);
    std::vector<double> u{0, 0.1, 0.2};
    EXPECT_THROW(fft_spectrum(u, {{1, 2}}, {"c"}), std::invalid_argument);
}

TEST(TimeSeries, Validation) {
    TimeSeries s = exact_series(5);
    s.validate();
    EXPECT_EQ(s.channel_count(), 4u);
    EXPECT_DOUBLE_EQ(s.channel(0)[0], 1);
    s.times[2] = s.times[1];
    EXPECT_THROW(s.validate(), std::invalid_argument);
}
