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

#include "shellqec/stats.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace shellqec {

uint64_t mix_seed(uint64_t a, uint64_t b) {
    uint64_t z = a * 0x9E3779B97F4A7C15ULL + b + 0x632BE59BD9B4E019ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

RateEstimate wilson_interval(int64_t hits, int64_t trials, double z) {
    if (trials <= 0 || hits < 0 || hits > trials) {
        throw std::invalid_argument("wilson_interval needs 0 <= hits <= trials and trials > 0");
    }
    RateEstimate r;
    r.hits = hits;
    r.trials = trials;
    double n = (double)trials;
    double p = (double)hits / n;
    r.rate = p;
    double z2 = z * z;
    double denom = 1 + z2 / n;
    double center = (p + z2 / (2 * n)) / denom;
    double half = z * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n)) / denom;
    r.lo = std::max(0.0, center - half);
    r.hi = std::min(1.0, center + half);
    if (hits == 0) {
        r.lo = 0;
    }
    if (hits == trials) {
        r.hi = 1;
    }
    return r;
}

}  // namespace shellqec
