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

#include <unsupported/Eigen/FFT>
#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <stdexcept>

#include "cqed/rng.h"

namespace cqed {

namespace {

void check_distribution(std::span<const double> p) {
    double sum = 0;
    for (double v : p) {
        if (!(v >= -1e-12)) {
            throw std::invalid_argument("hellinger: negative probability");
        }
        sum += v;
    }
    if (std::abs(sum - 1) > 1e-9) {
        throw std::invalid_argument("hellinger: distribution does not sum to 1");
    }
}

}  // namespace

void TimeSeries::validate() const {
    if (times.size() != pops.size()) {
        throw std::invalid_argument("time series: times and populations differ in length");
    }
    for (size_t i = 1; i < times.size(); i++) {
        if (!(times[i] > times[i - 1])) {
            throw std::invalid_argument("time series: times must be strictly increasing");
        }
    }
}

size_t TimeSeries::channel_count() const {
    return pops.empty() ? 0 : pops[0].p_emitters.size() + 1;
}

std::vector<double> TimeSeries::channel(size_t c) const {
    std::vector<double> out;
    out.reserve(pops.size());
    for (const PopulationDistribution &p : pops) {
        out.push_back(c < p.p_emitters.size() ? p.p_emitters[c] : p.p_cav_env);
    }
    return out;
}

double hellinger(std::span<const double> p, std::span<const double> q) {
    if (p.size() != q.size()) {
        throw std::invalid_argument("hellinger: length mismatch");
    }
    check_distribution(p);
    check_distribution(q);
    double s = 0;
    for (size_t i = 0; i < p.size(); i++) {
        double d = std::sqrt(std::max(p[i], 0.0)) - std::sqrt(std::max(q[i], 0.0));
        s += d * d;
    }
    return std::min(1.0, std::sqrt(s / 2));
}

double hellinger(const PopulationDistribution &p, const PopulationDistribution &q) {
    std::vector<double> a = p.as_vector(), b = q.as_vector();
    return hellinger(a, b);
}

double mean_hellinger(const TimeSeries &sim, const TimeSeries &exact) {
    sim.validate();
    exact.validate();
    if (sim.size() != exact.size() || sim.size() == 0) {
        throw std::invalid_argument("mean_hellinger: time grids differ");
    }
    double total = 0;
    for (size_t i = 0; i < sim.size(); i++) {
        if (std::abs(sim.times[i] - exact.times[i]) > 1e-9) {
            throw std::invalid_argument("mean_hellinger: time grids differ");
        }
        total += hellinger(sim.pops[i], exact.pops[i]);
    }
    return total / (double)sim.size();
}

std::vector<double> embed_populations(const PopulationDistribution &p, const std::vector<Role> &roles) {
    std::vector<double> out(size_t{1} << roles.size(), 0.0);
    for (size_t l = 0; l < roles.size(); l++) {
        const Role &r = roles[l];
        double v = r.kind == Role::Kind::CavityEnv ? p.p_cav_env : p.p_emitters.at(r.emitter - 1);
        out[size_t{1} << l] = v;
    }
    return out;
}

std::vector<double> empirical_distribution(const Counts &counts) {
    if (counts.total == 0) {
        throw std::invalid_argument("empirical_distribution: no shots");
    }
    std::vector<double> out(size_t{1} << counts.width, 0.0);
    for (const auto &[k, n] : counts.histogram) {
        out.at(k) = (double)n / (double)counts.total;
    }
    return out;
}

Interval bootstrap_ci(std::span<const Counts> data, const CountsStatistic &statistic, int replicates, double level,
                      uint64_t seed) {
    if (data.empty()) {
        throw std::invalid_argument("bootstrap_ci: empty data");
    }
    for (const Counts &c : data) {
        if (c.total == 0) {
            throw std::invalid_argument("bootstrap_ci: every step needs at least one shot");
        }
    }
    if (replicates < 1 || !(level > 0 && level < 1)) {
        throw std::invalid_argument("bootstrap_ci: invalid replicates or level");
    }
    // Support of each step, for resampling.
    std::vector<std::vector<uint64_t>> keys(data.size());
    std::vector<std::vector<double>> weights(data.size());
    for (size_t s = 0; s < data.size(); s++) {
        for (const auto &[k, n] : data[s].histogram) {
            keys[s].push_back(k);
            weights[s].push_back((double)n);
        }
    }
    std::vector<double> stats(replicates);
    std::vector<Counts> sample(data.size());
    for (int r = 0; r < replicates; r++) {
        Rng rng(derive_seed(seed, {(uint64_t)r}));
        for (size_t s = 0; s < data.size(); s++) {
            std::vector<uint64_t> draw = sample_multinomial(weights[s], data[s].total, rng);
            Counts c;
            c.width = data[s].width;
            for (size_t i = 0; i < draw.size(); i++) {
                c.add(keys[s][i], draw[i]);
            }
            sample[s] = std::move(c);
        }
        stats[r] = statistic(sample);
    }
    std::sort(stats.begin(), stats.end());
    auto quantile = [&](double q) {
        double pos = q * (replicates - 1);
        size_t i = (size_t)std::floor(pos);
        size_t j = std::min(i + 1, stats.size() - 1);
        double f = pos - (double)i;
        return stats[i] * (1 - f) + stats[j] * f;
    };
    Interval out;
    double alpha = (1 - level) / 2;
    out.lo = quantile(alpha);
    out.hi = quantile(1 - alpha);
    out.point = statistic(data);
    return out;
}

Spectrum fft_spectrum(std::span<const double> times, const std::vector<std::vector<double>> &channels,
                      const std::vector<std::string> &names) {
    const size_t n = times.size();
    if (n < 2) {
        throw std::invalid_argument("fft_spectrum: need at least two samples");
    }
    const double dt = times[1] - times[0];
    if (!(dt > 0)) {
        throw std::invalid_argument("fft_spectrum: times must increase");
    }
    for (size_t i = 1; i < n; i++) {
        if (std::abs((times[i] - times[i - 1]) - dt) > 1e-9 * std::max(1.0, std::abs(dt))) {
            throw std::invalid_argument("fft_spectrum: time grid is not uniform");
        }
    }
    Spectrum spec;
    spec.channels = names;
    const size_t bins = n / 2 + 1;
    for (size_t k = 0; k < bins; k++) {
        spec.frequencies.push_back((double)k / ((double)n * dt));
    }
    Eigen::FFT<double> fft;
    for (const std::vector<double> &ch : channels) {
        if (ch.size() != n) {
            throw std::invalid_argument("fft_spectrum: channel length differs from time grid");
        }
        double mean = 0;
        for (double v : ch) {
            mean += v;
        }
        mean /= (double)n;
        std::vector<double> x(n);
        for (size_t i = 0; i < n; i++) {
            x[i] = ch[i] - mean;
        }
        std::vector<std::complex<double>> out;
        fft.fwd(out, x);
        std::vector<double> amp(bins);
        for (size_t k = 0; k < bins; k++) {
            amp[k] = std::abs(out[k]) / (double)n;
        }
        amp[0] = std::abs(amp[0]) < 1e-12 ? 0.0 : amp[0];
        spec.amplitudes.push_back(std::move(amp));
    }
    return spec;
}

Spectrum fft_spectrum(const TimeSeries &series) {
    series.validate();
    std::vector<std::vector<double>> channels;
    std::vector<std::string> names;
    const size_t nc = series.channel_count();
    for (size_t c = 0; c < nc; c++) {
        channels.push_back(series.channel(c));
        names.push_back(c + 1 < nc ? "e" + std::to_string(c + 1) : "cav");
    }
    return fft_spectrum(series.times, channels, names);
}

size_t rabi_peak_bin(const Spectrum &spec, size_t channel) {
    if (spec.frequencies.size() < 2 || channel >= spec.amplitudes.size()) {
        throw std::invalid_argument("rabi_peak: empty spectrum");
    }
    const std::vector<double> &a = spec.amplitudes[channel];
    auto it = std::max_element(a.begin() + 1, a.end());
    if (*it <= 1e-12) {
        throw std::invalid_argument("rabi_peak: flat spectrum has no peak");
    }
    return (size_t)(it - a.begin());
}

double rabi_peak(const Spectrum &spec, size_t channel) {
    return spec.frequencies[rabi_peak_bin(spec, channel)];
}

}  // namespace cqed
