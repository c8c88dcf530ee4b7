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

#ifndef SHELLQEC_DECODER_H
#define SHELLQEC_DECODER_H

#include <cstdint>
#include <vector>

#include "shellqec/detectors.h"

namespace shellqec {

constexpr int kBoundary = -1;

struct MatchedPair {
    int a = 0;           ///< detector id
    int b = kBoundary;   ///< detector id, or kBoundary
    int64_t weight = 0;  ///< shortest-path length in the detector graph
    uint8_t obs = 0;     ///< observable parity along that path
};

struct Matching {
    std::vector<MatchedPair> pairs;  ///< sorted by (a, b) with a < b for event pairs
    int64_t weight = 0;
    uint8_t obs_flip = 0;
};

struct DecoderOptions {
    int search_radius = 4;  ///< in units of the lightest edge weight
    int landmarks = 8;
};

struct DecoderStats {
    int64_t shots = 0;
    int64_t repairs = 0;  ///< pairs added after the dual certificate failed
};

/// Exact minimum-weight perfect matching decoder on a detector graph, where every event may
/// also be matched to its nearest boundary.
///
/// Each event pair is worth b_i + b_j - d_ij relative to sending both events to the boundary,
/// so decoding is a maximum-weight matching on those gains. Only pairs found by a short local
/// search enter the matching problem; the optimal dual solution then certifies that no other
/// pair could improve it, with lower bounds on d_ij from landmark distances. Pairs that fail
/// the certificate are added with their exact distance and the problem is solved again.
class Decoder {
   public:
    explicit Decoder(const DetectorGraph &graph, DecoderOptions options = {});

    /// `events` are detector ids (any order, no repeats). Not thread safe.
    Matching decode(const std::vector<int> &events) const;

    int64_t boundary_distance(int node) const { return bdist_[node]; }
    uint8_t boundary_obs(int node) const { return bobs_[node]; }
    /// Exact shortest path length and its observable parity; boundary nodes are not traversed.
    std::pair<int64_t, uint8_t> distance(int a, int b) const;
    /// Graph edges along the shortest paths chosen by a matching.
    std::vector<int> correction_edges(const Matching &matching) const;

    const DetectorGraph &graph() const { return graph_; }
    const DecoderStats &stats() const { return stats_; }

   private:
    // Dijkstra from `source` up to `radius`; fills dist_/obs_ for touched nodes.
    void search(int source, int64_t radius) const;
    void clear_search() const;
    int64_t lower_bound(int a, int b) const;

    const DetectorGraph &graph_;
    DecoderOptions options_;
    int64_t radius_ = 0;
    std::vector<int64_t> bdist_;
    std::vector<uint8_t> bobs_;
    std::vector<std::vector<int64_t>> landmark_dist_;

    mutable std::vector<int64_t> dist_;
    mutable std::vector<uint8_t> obs_;
    mutable std::vector<int> parent_edge_;
    mutable std::vector<int> touched_;
    mutable std::vector<int> event_index_;
    mutable DecoderStats stats_;
};

/// Exhaustive minimum over all pairings with boundary assignments (at most 12 events).
Matching brute_force_match(const Decoder &decoder, const std::vector<int> &events);

bool is_logical_failure(const Matching &matching, const MeasurementRecord &record);
bool is_logical_failure(const Matching &matching, uint8_t observable_flip);

}  // namespace shellqec

#endif  // SHELLQEC_DECODER_H
