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

#include "shellqec/decoder.h"

#include <algorithm>
#include <functional>
#include <limits>
#include <numeric>
#include <queue>
#include <stdexcept>

#include "shellqec/blossom.h"

namespace shellqec {

namespace {

constexpr int64_t kInf = std::numeric_limits<int64_t>::max() / 4;

using HeapItem = std::pair<int64_t, int>;
using MinHeap = std::priority_queue<HeapItem, std::vector<HeapItem>, std::greater<HeapItem>>;

// Full single- or multi-source Dijkstra; boundary nodes are only entered when `through_boundary`.
void full_dijkstra(const DetectorGraph &g, const std::vector<int> &sources, bool through_boundary,
                   std::vector<int64_t> &dist, std::vector<uint8_t> *obs) {
    dist.assign(g.num_nodes, kInf);
    if (obs) {
        obs->assign(g.num_nodes, 0);
    }
    MinHeap heap;
    for (int s : sources) {
        dist[s] = 0;
        heap.push({0, s});
    }
    while (!heap.empty()) {
        auto [du, u] = heap.top();
        heap.pop();
        if (du != dist[u]) {
            continue;
        }
        if (g.is_boundary(u) && !through_boundary && du > 0) {
            continue;
        }
        for (int i = g.adj_offsets[u]; i < g.adj_offsets[u + 1]; i++) {
            auto [v, k] = g.adj[i];
            if (g.is_boundary(v) && g.is_boundary(u)) {
                continue;
            }
            int64_t nd = du + g.edges[k].weight;
            if (nd < dist[v]) {
                dist[v] = nd;
                if (obs) {
                    (*obs)[v] = (*obs)[u] ^ g.edges[k].obs;
                }
                heap.push({nd, v});
            }
        }
    }
}

}  // namespace

Decoder::Decoder(const DetectorGraph &graph, DecoderOptions options) : graph_(graph), options_(options) {
    int64_t min_w = kInf;
    for (const GraphEdge &e : graph_.edges) {
        min_w = std::min<int64_t>(min_w, e.weight);
    }
    if (min_w == kInf || min_w < 1) {
        min_w = 1;
    }
    radius_ = (int64_t)options_.search_radius * min_w;

    full_dijkstra(graph_, graph_.boundary_nodes, false, bdist_, &bobs_);

    // Landmarks spread out by farthest-point selection over detector nodes.
    if (graph_.num_detectors > 0) {
        std::vector<int64_t> closest(graph_.num_nodes, kInf);
        int next = 0;
        for (int l = 0; l < options_.landmarks; l++) {
            std::vector<int64_t> dist;
            full_dijkstra(graph_, {next}, false, dist, nullptr);
            landmark_dist_.push_back(dist);
            int64_t best = -1;
            for (int v = 0; v < graph_.num_detectors; v++) {
                closest[v] = std::min(closest[v], dist[v]);
                if (closest[v] < kInf && closest[v] > best) {
                    best = closest[v];
                    next = v;
                }
            }
            if (best <= 0) {
                break;
            }
        }
    }

    dist_.assign(graph_.num_nodes, kInf);
    obs_.assign(graph_.num_nodes, 0);
    parent_edge_.assign(graph_.num_nodes, -1);
    event_index_.assign(graph_.num_nodes, -1);
}

void Decoder::clear_search() const {
    for (int v : touched_) {
        dist_[v] = kInf;
        obs_[v] = 0;
        parent_edge_[v] = -1;
    }
    touched_.clear();
}

void Decoder::search(int source, int64_t radius) const {
    clear_search();
    if (graph_.unit_weights) {
        dist_[source] = 0;
        touched_.push_back(source);
        for (size_t head = 0; head < touched_.size(); head++) {
            int u = touched_[head];
            if (graph_.is_boundary(u) || dist_[u] >= radius) {
                continue;
            }
            for (int i = graph_.adj_offsets[u]; i < graph_.adj_offsets[u + 1]; i++) {
                auto [v, k] = graph_.adj[i];
                if (dist_[v] == kInf) {
                    dist_[v] = dist_[u] + 1;
                    obs_[v] = obs_[u] ^ graph_.edges[k].obs;
                    parent_edge_[v] = k;
                    touched_.push_back(v);
                }
            }
        }
        return;
    }
    MinHeap heap;
    dist_[source] = 0;
    touched_.push_back(source);
    heap.push({0, source});
    while (!heap.empty()) {
        auto [du, u] = heap.top();
        heap.pop();
        if (du != dist_[u] || graph_.is_boundary(u)) {
            continue;
        }
        for (int i = graph_.adj_offsets[u]; i < graph_.adj_offsets[u + 1]; i++) {
            auto [v, k] = graph_.adj[i];
            int64_t nd = du + graph_.edges[k].weight;
            if (nd <= radius && nd < dist_[v]) {
                if (dist_[v] == kInf) {
                    touched_.push_back(v);
                }
                dist_[v] = nd;
                obs_[v] = obs_[u] ^ graph_.edges[k].obs;
                parent_edge_[v] = k;
                heap.push({nd, v});
            }
        }
    }
}

int64_t Decoder::lower_bound(int a, int b) const {
    int64_t lb = std::max<int64_t>(radius_ + 1, std::abs(bdist_[a] - bdist_[b]));
    for (const std::vector<int64_t> &ld : landmark_dist_) {
        if (ld[a] < kInf && ld[b] < kInf) {
            lb = std::max(lb, std::abs(ld[a] - ld[b]));
        }
    }
    return lb;
}

std::pair<int64_t, uint8_t> Decoder::distance(int a, int b) const {
    search(a, kInf - 1);
    auto r = std::make_pair(dist_[b], obs_[b]);
    clear_search();
    return r;
}

namespace {

struct PairInfo {
    int i, j;
    int64_t dist;
    uint8_t obs;
};

}  // namespace

Matching Decoder::decode(const std::vector<int> &events) const {
    stats_.shots++;
    Matching result;
    int n = (int)events.size();
    if (n == 0) {
        return result;
    }
    std::vector<int> ev = events;
    std::sort(ev.begin(), ev.end());
    for (int i = 0; i < n; i++) {
        if (ev[i] < 0 || ev[i] >= graph_.num_detectors || (i > 0 && ev[i] == ev[i - 1])) {
            for (int k = 0; k < i; k++) {
                event_index_[ev[k]] = -1;
            }
            throw std::invalid_argument("event " + std::to_string(ev[i]) + " is not a distinct detector of the graph");
        }
        event_index_[ev[i]] = i;
    }
    std::vector<int64_t> b(n);
    for (int i = 0; i < n; i++) {
        b[i] = bdist_[ev[i]];
    }

    std::vector<PairInfo> pairs;
    for (int i = 0; i < n; i++) {
        search(ev[i], radius_);
        for (int v : touched_) {
            int j = event_index_[v];
            if (j > i) {
                int64_t gain = b[i] + b[j] - dist_[v];
                if (gain > 0) {
                    pairs.push_back({i, j, dist_[v], obs_[v]});
                }
            }
        }
    }
    clear_search();

    std::vector<int> mate(n, -1);
    std::vector<int64_t> dual2(n, 0);
    std::vector<int64_t> searched(n, radius_);
    while (true) {
        // Solve each connected component of candidate pairs on its own.
        std::vector<int> comp(n);
        std::iota(comp.begin(), comp.end(), 0);
        std::function<int(int)> find = [&](int x) { return comp[x] == x ? x : comp[x] = find(comp[x]); };
        for (const PairInfo &p : pairs) {
            comp[find(p.i)] = find(p.j);
        }
        std::vector<std::vector<int>> members(n);
        for (int i = 0; i < n; i++) {
            members[find(i)].push_back(i);
        }
        std::vector<std::vector<int>> comp_pairs(n);
        for (int k = 0; k < (int)pairs.size(); k++) {
            comp_pairs[find(pairs[k].i)].push_back(k);
        }
        std::vector<int> local(n, -1);
        std::fill(mate.begin(), mate.end(), -1);
        std::fill(dual2.begin(), dual2.end(), 0);
        for (int root = 0; root < n; root++) {
            if (comp_pairs[root].empty()) {
                continue;
            }
            const std::vector<int> &mem = members[root];
            for (int x = 0; x < (int)mem.size(); x++) {
                local[mem[x]] = x;
            }
            std::vector<WeightedEdge> edges;
            for (int k : comp_pairs[root]) {
                const PairInfo &p = pairs[k];
                edges.push_back({local[p.i], local[p.j], b[p.i] + b[p.j] - p.dist});
            }
            BlossomResult r = max_weight_matching((int)mem.size(), edges);
            for (int x = 0; x < (int)mem.size(); x++) {
                mate[mem[x]] = r.mate[x] >= 0 ? mem[r.mate[x]] : -1;
                dual2[mem[x]] = r.dual2[x];
            }
        }

        // Certificate: every pair left out of the problem has non-negative reduced gain.
        // A violation needs d_ij <= reach, so one bounded search per event settles it.
        std::vector<std::vector<uint8_t>> known(n);
        for (const PairInfo &p : pairs) {
            if (known[p.i].empty()) {
                known[p.i].assign(n, 0);
            }
            known[p.i][p.j] = 1;
        }
        bool repaired = false;
        std::vector<std::pair<int, int64_t>> suspects;
        for (int i = 0; i < n; i++) {
            suspects.clear();
            int64_t needed = -1;
            for (int j = i + 1; j < n; j++) {
                if (!known[i].empty() && known[i][j]) {
                    continue;
                }
                int64_t reach = (2 * (b[i] + b[j]) - (dual2[i] + dual2[j]) - 1);
                reach = reach < 0 ? -1 : reach / 2;
                if (reach <= std::max(searched[i], searched[j]) || reach < lower_bound(ev[i], ev[j])) {
                    continue;
                }
                suspects.emplace_back(j, reach);
                needed = std::max(needed, reach);
            }
            if (suspects.empty()) {
                continue;
            }
            search(ev[i], needed);
            searched[i] = std::max(searched[i], needed);
            // Record every useful pair inside the searched ball so the radius stays a valid bound.
            for (int v : touched_) {
                int j = event_index_[v];
                if (j < 0 || j == i) {
                    continue;
                }
                int lo = std::min(i, j), hi = std::max(i, j);
                if (known[lo].empty()) {
                    known[lo].assign(n, 0);
                }
                int64_t gain = b[i] + b[j] - dist_[v];
                if (known[lo][hi] || gain <= 0) {
                    continue;
                }
                known[lo][hi] = 1;
                pairs.push_back({lo, hi, dist_[v], obs_[v]});
                if (2 * gain > dual2[i] + dual2[j]) {
                    repaired = true;
                    stats_.repairs++;
                }
            }
            clear_search();
        }
        if (!repaired) {
            break;
        }
    }

    std::vector<std::vector<const PairInfo *>> by_first(n);
    for (const PairInfo &p : pairs) {
        by_first[p.i].push_back(&p);
    }
    for (int i = 0; i < n; i++) {
        if (mate[i] < 0) {
            result.pairs.push_back({ev[i], kBoundary, b[i], bobs_[ev[i]]});
        } else if (mate[i] > i) {
            const PairInfo *best = nullptr;
            for (const PairInfo *p : by_first[i]) {
                if (p->j == mate[i] && (best == nullptr || p->dist < best->dist)) {
                    best = p;
                }
            }
            result.pairs.push_back({ev[i], ev[mate[i]], best->dist, best->obs});
        }
    }
    for (const MatchedPair &p : result.pairs) {
        result.weight += p.weight;
        result.obs_flip ^= p.obs;
    }
    for (int i = 0; i < n; i++) {
        event_index_[ev[i]] = -1;
    }
    return result;
}

std::vector<int> Decoder::correction_edges(const Matching &matching) const {
    std::vector<int> out;
    for (const MatchedPair &p : matching.pairs) {
        search(p.a, kInf - 1);
        int target = p.b;
        if (target == kBoundary) {
            // Nearest boundary node; ties go to the first one.
            int64_t best = kInf;
            for (int bn : graph_.boundary_nodes) {
                if (dist_[bn] < best) {
                    best = dist_[bn];
                    target = bn;
                }
            }
        }
        if (target == kBoundary || dist_[target] >= kInf) {
            continue;
        }
        for (int v = target; v != p.a;) {
            int k = parent_edge_[v];
            out.push_back(k);
            v = graph_.edges[k].u == v ? graph_.edges[k].v : graph_.edges[k].u;
        }
    }
    clear_search();
    return out;
}

Matching brute_force_match(const Decoder &decoder, const std::vector<int> &events) {
    int n = (int)events.size();
    if (n > 12) {
        throw std::invalid_argument("brute_force_match supports at most 12 events");
    }
    std::vector<int> ev = events;
    std::sort(ev.begin(), ev.end());
    std::vector<std::vector<std::pair<int64_t, uint8_t>>> d(n, std::vector<std::pair<int64_t, uint8_t>>(n));
    for (int i = 0; i < n; i++) {
        for (int j = i + 1; j < n; j++) {
            d[i][j] = d[j][i] = decoder.distance(ev[i], ev[j]);
        }
    }
    std::vector<int> mate(n, -2), best_mate;
    int64_t best = kInf;
    std::function<void(int64_t)> rec = [&](int64_t acc) {
        if (acc >= best) {
            return;
        }
        int i = 0;
        while (i < n && mate[i] != -2) {
            i++;
        }
        if (i == n) {
            best = acc;
            best_mate = mate;
            return;
        }
        mate[i] = -1;
        rec(acc + decoder.boundary_distance(ev[i]));
        for (int j = i + 1; j < n; j++) {
            if (mate[j] == -2 && d[i][j].first < kInf) {
                mate[i] = j;
                mate[j] = i;
                rec(acc + d[i][j].first);
                mate[j] = -2;
            }
        }
        mate[i] = -2;
    };
    rec(0);
    Matching m;
    for (int i = 0; i < n; i++) {
        if (best_mate[i] == -1) {
            m.pairs.push_back({ev[i], kBoundary, decoder.boundary_distance(ev[i]), decoder.boundary_obs(ev[i])});
        } else if (best_mate[i] > i) {
            int j = best_mate[i];
            m.pairs.push_back({ev[i], ev[j], d[i][j].first, d[i][j].second});
        }
    }
    for (const MatchedPair &p : m.pairs) {
        m.weight += p.weight;
        m.obs_flip ^= p.obs;
    }
    return m;
}

bool is_logical_failure(const Matching &matching, uint8_t observable_flip) {
    return matching.obs_flip != observable_flip;
}

bool is_logical_failure(const Matching &matching, const MeasurementRecord &record) {
    return is_logical_failure(matching, record.observable_flip);
}

}  // namespace shellqec
