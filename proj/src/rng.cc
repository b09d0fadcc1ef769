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

#include "cqed/rng.h"

#include <algorithm>

namespace cqed {

namespace {

uint64_t splitmix64(uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

}  // namespace

uint64_t derive_seed(uint64_t base, std::initializer_list<uint64_t> path) {
    uint64_t h = splitmix64(base);
    for (uint64_t p : path) {
        h = splitmix64(h ^ splitmix64(p + 0x632BE59BD9B4E019ULL));
    }
    return h;
}

std::vector<uint64_t> sample_multinomial(std::span<const double> probs, uint64_t shots, Rng &rng) {
    std::vector<uint64_t> out(probs.size(), 0);
    double remaining_mass = 0;
    for (double p : probs) {
        remaining_mass += std::max(p, 0.0);
    }
    uint64_t remaining = shots;
    for (size_t k = 0; k < probs.size() && remaining > 0; k++) {
        double p = std::max(probs[k], 0.0);
        if (p <= 0) {
            continue;
        }
        if (k + 1 == probs.size() || p >= remaining_mass) {
            out[k] = remaining;
            remaining = 0;
            break;
        }
        double q = std::clamp(p / remaining_mass, 0.0, 1.0);
        std::binomial_distribution<uint64_t> dist(remaining, q);
        uint64_t c = dist(rng);
        out[k] = c;
        remaining -= c;
        remaining_mass -= p;
    }
    if (remaining > 0) {
        // Rounding left the tail with no mass; give the leftover to the last nonzero outcome.
        for (size_t k = probs.size(); k-- > 0;) {
            if (probs[k] > 0) {
                out[k] += remaining;
                break;
            }
        }
    }
    return out;
}

}  // namespace cqed
