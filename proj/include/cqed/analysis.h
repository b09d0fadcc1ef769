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

#ifndef CQED_ANALYSIS_H
#define CQED_ANALYSIS_H

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "cqed/circuit.h"
#include "cqed/model.h"

namespace cqed {

/// Populations on an ordered time grid (ns).
struct TimeSeries {
    std::vector<double> times;
    std::vector<PopulationDistribution> pops;

    void validate() const;
    size_t size() const {
        return times.size();
    }
    /// Population channel c over time (emitters 0..N-1, then cavity/environment).
    std::vector<double> channel(size_t c) const;
    size_t channel_count() const;
};

/// H(p, q) = sqrt(sum (sqrt p_i - sqrt q_i)^2 / 2).
double hellinger(std::span<const double> p, std::span<const double> q);
double hellinger(const PopulationDistribution &p, const PopulationDistribution &q);

/// Mean of H(t) over the shared sample grid.
double mean_hellinger(const TimeSeries &sim, const TimeSeries &exact);

/// Embeds populations into the full 2^(N+1) outcome space on the
/// Hamming-weight-1 states selected by `roles`.
std::vector<double> embed_populations(const PopulationDistribution &p, const std::vector<Role> &roles);

/// Empirical distribution over all 2^width outcomes.
std::vector<double> empirical_distribution(const Counts &counts);

struct Interval {
    double lo = 0;
    double hi = 0;
    double point = 0;
    double width() const {
        return hi - lo;
    }
    bool contains(double x) const {
        return x >= lo && x <= hi;
    }
    bool overlaps(const Interval &o) const {
        return lo <= o.hi && o.lo <= hi;
    }
};

/// Statistic over one set of per-step counts.
using CountsStatistic = std::function<double(std::span<const Counts>)>;

/// Percentile bootstrap: each replicate resamples every step's shots from its
/// own empirical distribution (multinomial with the same total).
Interval bootstrap_ci(std::span<const Counts> data, const CountsStatistic &statistic, int replicates = 1000,
                      double level = 0.95, uint64_t seed = 0);

/// One-sided amplitude spectrum of mean-subtracted channels.
struct Spectrum {
    /// Cycles per ns.
    std::vector<double> frequencies;
    std::vector<std::string> channels;
    /// amplitudes[c][k] = |X_k| / n for channel c.
    std::vector<std::vector<double>> amplitudes;

    double bin_width() const {
        return frequencies.size() > 1 ? frequencies[1] - frequencies[0] : 0;
    }
};

/// Discrete Fourier magnitude per population channel. The grid must be uniform.
Spectrum fft_spectrum(const TimeSeries &series);
Spectrum fft_spectrum(std::span<const double> times, const std::vector<std::vector<double>> &channels,
                      const std::vector<std::string> &names);

/// Index of the largest non-zero-frequency bin of a channel. Throws on an
/// empty or flat spectrum.
size_t rabi_peak_bin(const Spectrum &spec, size_t channel = 0);
/// Frequency (cycles/ns) of rabi_peak_bin.
double rabi_peak(const Spectrum &spec, size_t channel = 0);

}  // namespace cqed

#endif
