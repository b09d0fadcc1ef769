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

#ifndef CQED_RNG_H
#define CQED_RNG_H

#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <vector>

namespace cqed {

using Rng = std::mt19937_64;

/// Derives an independent 64-bit seed from a base seed and a path of stream
/// indices (step, variant, batch, ...). Pure function of its inputs.
uint64_t derive_seed(uint64_t base, std::initializer_list<uint64_t> path);

/// Draws a multinomial sample of `shots` trials over `probs` using sequential
/// conditional binomials. Negative entries are treated as zero; the vector does
/// not need to be normalized.
std::vector<uint64_t> sample_multinomial(std::span<const double> probs, uint64_t shots, Rng &rng);

}  // namespace cqed

#endif
