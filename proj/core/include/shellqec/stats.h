// Copyright 2026 The shellqec Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SHELLQEC_STATS_H
#define SHELLQEC_STATS_H

#include <cstdint>
#include <random>

namespace shellqec {

using Rng = std::mt19937_64;

/// Mixes two 64-bit words into a seed (splitmix64 finalizer on a combined word).
uint64_t mix_seed(uint64_t a, uint64_t b);
inline uint64_t mix_seed(uint64_t a, uint64_t b, uint64_t c) { return mix_seed(mix_seed(a, b), c); }

/// A binomial proportion with its Wilson score interval.
struct RateEstimate {
    int64_t hits = 0;
    int64_t trials = 0;
    double rate = 0;
    double lo = 0;
    double hi = 0;
};

/// Wilson score interval; z defaults to the two-sided 95% quantile.
RateEstimate wilson_interval(int64_t hits, int64_t trials, double z = 1.959963984540054);

/// True when the two intervals do not overlap.
inline bool intervals_disjoint(const RateEstimate &a, const RateEstimate &b) { return a.hi < b.lo || b.hi < a.lo; }

}  // namespace shellqec

#endif  // SHELLQEC_STATS_H
