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

#ifndef SHELLQEC_BLOSSOM_H
#define SHELLQEC_BLOSSOM_H

#include <cstdint>
#include <vector>

namespace shellqec {

struct WeightedEdge {
    int i = 0;
    int j = 0;
    int64_t weight = 0;
};

struct BlossomResult {
    std::vector<int> mate;         ///< partner of each vertex, or -1
    std::vector<int64_t> dual2;    ///< twice the vertex dual variables
    int64_t total_weight = 0;
};

/// Maximum-weight matching on a general graph with integer weights (Edmonds' blossom
/// algorithm with primal-dual updates, O(n^3)). With max_cardinality set, only
/// maximum-cardinality matchings are considered.
BlossomResult max_weight_matching(int num_vertices, const std::vector<WeightedEdge> &edges,
                                  bool max_cardinality = false);

}  // namespace shellqec

#endif  // SHELLQEC_BLOSSOM_H
