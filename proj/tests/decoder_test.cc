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

#include <gtest/gtest.h>

#include <algorithm>
#include <functional>
#include <limits>
#include <queue>
#include <random>
#include <set>

#include "shellqec/blossom.h"
#include "shellqec/defects.h"
#include "shellqec/detectors.h"
#include "shellqec/schedule.h"

using namespace shellqec;

namespace {

constexpr int64_t kFar = std::numeric_limits<int64_t>::max() / 4;

// Plain Dijkstra over the edge list, kept separate from the decoder's own search.
std::vector<int64_t> dijkstra(const DetectorGraph &g, int source) {
    std::vector<std::vector<std::pair<int, int64_t>>> adj(g.num_nodes);
    for (const GraphEdge &e : g.edges) {
        adj[e.u].push_back({e.v, e.weight});
        adj[e.v].push_back({e.u, e.weight});
    }
    std::vector<int64_t> dist(g.num_nodes, kFar);
    using Item = std::pair<int64_t, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
    dist[source] = 0;
    pq.push({0, source});
    while (!pq.empty()) {
        auto [du, u] = pq.top();
        pq.pop();
        if (du > dist[u] || (u != source && g.is_boundary(u))) {
            continue;
        }
        for (auto [v, w] : adj[u]) {
            if (du + w < dist[v]) {
                dist[v] = du + w;
                pq.push({dist[v], v});
            }
        }
    }
    return dist;
}

// Minimum total weight over every way to pair events with each other or with a boundary.
int64_t oracle_weight(const DetectorGraph &g, const std::vector<int> &events) {
    int n = (int)events.size();
    std::vector<std::vector<int64_t>> d(n, std::vector<int64_t>(n));
    std::vector<int64_t> b(n);
    for (int i = 0; i < n; i++) {
        std::vector<int64_t> dist = dijkstra(g, events[i]);
        for (int j = 0; j < n; j++) {
            d[i][j] = dist[events[j]];
        }
        b[i] = kFar;
        for (int bn : g.boundary_nodes) {
            b[i] = std::min(b[i], dist[bn]);
        }
    }
    std::vector<uint8_t> used(n, 0);
    std::function<int64_t()> best = [&]() -> int64_t {
        int i = 0;
        while (i < n && used[i]) {
            i++;
        }
        if (i == n) {
            return 0;
        }
        used[i] = 1;
        int64_t out = b[i] >= kFar ? kFar : b[i] + best();
        for (int j = i + 1; j < n; j++) {
            if (!used[j] && d[i][j] < kFar) {
                used[j] = 1;
                out = std::min(out, d[i][j] + best());
                used[j] = 0;
            }
        }
        used[i] = 0;
        return out;
    };
    return best();
}

int64_t oracle_max_matching(int n, const std::vector<WeightedEdge> &edges) {
    std::vector<uint8_t> used(n, 0);
    std::function<int64_t(size_t)> rec = [&](size_t k) -> int64_t {
        if (k == edges.size()) {
            return 0;
        }
        int64_t out = rec(k + 1);
        const WeightedEdge &e = edges[k];
        if (!used[e.i] && !used[e.j]) {
            used[e.i] = used[e.j] = 1;
            out = std::max(out, e.weight + rec(k + 1));
            used[e.i] = used[e.j] = 0;
        }
        return out;
    };
    return rec(0);
}

// A path of detectors 0..n-1 with a boundary node hanging off each end.
DetectorGraph path_graph(int n) {
    DetectorGraph g;
    g.num_detectors = n;
    g.num_nodes = n + 2;
    g.boundary_nodes = {n, n + 1};
    g.edges.push_back({0, n, 0.1, 1, 1, 1, {}});
    for (int i = 0; i + 1 < n; i++) {
        g.edges.push_back({i, i + 1, 0.1, 1, 0, 1, {}});
    }
    g.edges.push_back({n - 1, n + 1, 0.1, 1, 0, 1, {}});
    g.finalize();
    return g;
}

struct Model {
    std::unique_ptr<ShellSchedule> schedule;
    SectorCircuit circuit;
    std::vector<Detector> dets;
    DetectorGraph graph;
};

std::unique_ptr<Model> make_model(int d, std::vector<CellCoord> cells, int T, Sector sector, WeightMode mode,
                                  double eps = 0.01) {
    auto m = std::make_unique<Model>();
    auto L = std::make_shared<const CodeLayout>(d);
    std::sort(cells.begin(), cells.end());
    ClusterDecomposition dc = decompose(DefectMap{d, cells, 0}, 9);
    m->schedule = std::make_unique<ShellSchedule>(build_schedule(L, build_punctures(dc, *L), T, 9, {true}));
    m->circuit = compile_sector(*m->schedule, sector);
    m->dets = build_detectors(m->circuit, {false});
    GraphOptions opts;
    opts.mode = mode;
    NoiseParams noise = NoiseParams::uniform(eps);
    noise.init_error = eps / 2;
    m->graph = build_graph(m->circuit, m->dets, noise, opts);
    return m;
}

}  // namespace

TEST(Blossom, MatchesExhaustiveSearch) {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 400; trial++) {
        int n = 2 + (int)(rng() % 7);
        std::vector<WeightedEdge> edges;
        for (int i = 0; i < n; i++) {
            for (int j = i + 1; j < n; j++) {
                if (rng() % 3 != 0) {
                    edges.push_back({i, j, (int64_t)(rng() % 20)});
                }
            }
        }
        BlossomResult r = max_weight_matching(n, edges);
        ASSERT_EQ(r.total_weight, oracle_max_matching(n, edges)) << "trial " << trial;
        int64_t sum = 0;
        for (const WeightedEdge &e : edges) {
            if (r.mate[e.i] == e.j) {
                ASSERT_EQ(r.mate[e.j], e.i);
                sum += e.weight;
            }
        }
        EXPECT_EQ(sum, r.total_weight);
    }
}

TEST(Blossom, EmptyInput) {
    BlossomResult r = max_weight_matching(3, {});
    EXPECT_EQ(r.mate, (std::vector<int>{-1, -1, -1}));
    EXPECT_EQ(r.total_weight, 0);
}

TEST(Decoder, EmptySyndrome) {
    DetectorGraph g = path_graph(10);
    Decoder dec(g);
    Matching m = dec.decode({});
    EXPECT_TRUE(m.pairs.empty());
    EXPECT_EQ(m.weight, 0);
    EXPECT_EQ(brute_force_match(dec, {}).weight, 0);
}

TEST(Decoder, PairsCloseEventsOnAPath) {
    DetectorGraph g = path_graph(10);
    Decoder dec(g);
    Matching m = dec.decode({3, 6});
    ASSERT_EQ(m.pairs.size(), 1u);
    EXPECT_EQ(m.pairs[0].a, 3);
    EXPECT_EQ(m.pairs[0].b, 6);
    EXPECT_EQ(m.weight, 3);
    EXPECT_EQ(m.obs_flip, 0);

    Matching ends = dec.decode({1, 8});
    EXPECT_EQ(ends.weight, 4);
    EXPECT_EQ(ends.pairs.size(), 2u);
    EXPECT_EQ(ends.obs_flip, 1);
}

TEST(Decoder, RejectsForeignEvents) {
    DetectorGraph g = path_graph(5);
    Decoder dec(g);
    EXPECT_THROW(dec.decode({5}), std::invalid_argument);
    EXPECT_THROW(dec.decode({2, 2}), std::invalid_argument);
    EXPECT_EQ(dec.decode({1, 2}).weight, 1);
}

TEST(Decoder, BruteForceSmallCases) {
    auto m = make_model(5, {}, 5, Sector::X, WeightMode::Uniform);
    Decoder dec(m->graph);
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 100; trial++) {
        int a = (int)(rng() % m->graph.num_detectors), b = (int)(rng() % m->graph.num_detectors);
        if (a == b) {
            continue;
        }
        std::vector<int64_t> da = dijkstra(m->graph, a), db = dijkstra(m->graph, b);
        int64_t ba = std::min(da[m->graph.boundary_nodes[0]], da[m->graph.boundary_nodes[1]]);
        int64_t bb = std::min(db[m->graph.boundary_nodes[0]], db[m->graph.boundary_nodes[1]]);
        EXPECT_EQ(brute_force_match(dec, {a, b}).weight, std::min(da[b], ba + bb));
    }
    for (int trial = 0; trial < 100; trial++) {
        std::set<int> s;
        while (s.size() < 4) {
            s.insert((int)(rng() % m->graph.num_detectors));
        }
        std::vector<int> ev(s.begin(), s.end());
        EXPECT_EQ(brute_force_match(dec, ev).weight, oracle_weight(m->graph, ev));
    }
    EXPECT_THROW(brute_force_match(dec, std::vector<int>(13, 0)), std::invalid_argument);
}

TEST(Decoder, ExactOnRandomSyndromes) {
    std::mt19937_64 rng(99);
    int instances = 0;
    for (int d : {5, 7, 9}) {
        for (bool holed : {false, true}) {
            for (WeightMode mode : {WeightMode::Uniform, WeightMode::Likelihood}) {
                for (Sector sector : {Sector::X, Sector::Z}) {
                    std::vector<CellCoord> cells;
                    if (holed) {
                        cells.push_back({d / 2, d / 2});
                    }
                    auto m = make_model(d, cells, d, sector, mode);
                    Decoder dec(m->graph);
                    FaultPropagator prop(m->circuit, m->dets);
                    std::vector<Fault> faults = prop.all_faults();
                    for (int trial = 0; trial < 25; trial++) {
                        std::vector<int> ev;
                        if (trial % 2 == 0) {
                            std::set<int> s;
                            int k = 1 + (int)(rng() % 8);
                            while ((int)s.size() < k) {
                                s.insert((int)(rng() % m->graph.num_detectors));
                            }
                            ev.assign(s.begin(), s.end());
                        } else {
                            // Clustered syndromes from a handful of nearby faults.
                            for (int k = 0; k < 4; k++) {
                                std::vector<int> fx = prop.effect(faults[rng() % faults.size()]).detectors;
                                std::vector<int> next;
                                std::set_symmetric_difference(ev.begin(), ev.end(), fx.begin(), fx.end(),
                                                              std::back_inserter(next));
                                ev = next;
                            }
                        }
                        if (ev.size() > 8) {
                            continue;
                        }
                        int64_t want = oracle_weight(m->graph, ev);
                        ASSERT_EQ(dec.decode(ev).weight, want);
                        ASSERT_EQ(brute_force_match(dec, ev).weight, want);
                        instances++;
                    }
                }
            }
        }
    }
    EXPECT_GT(instances, 500);
}

TEST(Decoder, EverySingleFaultIsCorrected) {
    std::vector<std::pair<int, std::vector<CellCoord>>> cases = {{5, {}}, {7, {}}, {15, {{7, 7}}}, {15, {{0, 7}}}};
    for (const auto &[d, cells] : cases) {
        for (Sector sector : {Sector::X, Sector::Z}) {
            auto m = make_model(d, cells, cells.empty() ? d : 6, sector, WeightMode::Uniform);
            Decoder dec(m->graph);
            FaultPropagator prop(m->circuit, m->dets);
            for (const Fault &f : prop.all_faults()) {
                FaultEffect e = prop.effect(f);
                ASSERT_FALSE(is_logical_failure(dec.decode(e.detectors), e.obs)) << describe(f, m->circuit);
            }
        }
    }
}

TEST(Decoder, LowWeightFaultSetsNeverFail) {
    // Without defects every nontrivial error needs at least d faults, so fewer than d/2 are always corrected.
    std::mt19937_64 rng(7);
    for (int d : {5, 7}) {
        for (Sector sector : {Sector::X, Sector::Z}) {
            auto m = make_model(d, {}, d, sector, WeightMode::Uniform);
            Decoder dec(m->graph);
            FaultPropagator prop(m->circuit, m->dets);
            std::vector<Fault> faults = prop.all_faults();
            for (int trial = 0; trial < 2000; trial++) {
                int k = 1 + (int)(rng() % ((d - 1) / 2));
                std::vector<int> ev;
                uint8_t obs = 0;
                for (int i = 0; i < k; i++) {
                    FaultEffect e = prop.effect(faults[rng() % faults.size()]);
                    std::vector<int> next;
                    std::set_symmetric_difference(ev.begin(), ev.end(), e.detectors.begin(), e.detectors.end(),
                                                  std::back_inserter(next));
                    ev = next;
                    obs ^= e.obs;
                }
                ASSERT_FALSE(is_logical_failure(dec.decode(ev), obs));
            }
        }
    }
}

TEST(Decoder, LogicalStringIsAFailure) {
    for (Sector sector : {Sector::X, Sector::Z}) {
        auto m = make_model(7, {}, 7, sector, WeightMode::Uniform);
        Decoder dec(m->graph);
        FrameSimulator sim(m->circuit, NoiseParams{});
        MeasurementRecord clean = sim.run_with_faults({});
        EXPECT_FALSE(is_logical_failure(dec.decode(extract_events(clean, m->dets)), clean));

        // The undetectable error string is the logical of the type opposite to the measured checks.
        Pauli flips = detecting_type(sector) == Pauli::Z ? Pauli::X : Pauli::Z;
        std::vector<Fault> string;
        for (int q : logical_representative(m->schedule->code(), flips, {}).qubits) {
            string.push_back({FaultKind::Data, m->circuit.T - 1, q});
        }
        MeasurementRecord hit = sim.run_with_faults(string);
        std::vector<int> ev = extract_events(hit, m->dets);
        EXPECT_TRUE(ev.empty());
        EXPECT_TRUE(is_logical_failure(dec.decode(ev), hit));
    }
}

TEST(Decoder, CorrectionCancelsTheSyndrome) {
    std::mt19937_64 rng(21);
    for (Sector sector : {Sector::X, Sector::Z}) {
        auto m = make_model(9, {}, 9, sector, WeightMode::Uniform, 0.02);
        Decoder dec(m->graph);
        SimOptions opts;
        opts.diagnostics = true;
        FrameSimulator sim(m->circuit, NoiseParams::uniform(0.02), opts);
        for (uint64_t seed = 0; seed < 50; seed++) {
            MeasurementRecord r = sim.run(seed);
            std::vector<int> ev = extract_events(r, m->dets);
            Matching match = dec.decode(ev);
            std::vector<int> toggled(m->graph.num_nodes, 0);
            uint8_t obs = 0;
            for (int k : dec.correction_edges(match)) {
                const GraphEdge &e = m->graph.edges[k];
                toggled[e.u] ^= 1;
                toggled[e.v] ^= 1;
                obs ^= e.obs;
            }
            std::vector<int> residual;
            for (int v = 0; v < m->graph.num_detectors; v++) {
                if (toggled[v]) {
                    residual.push_back(v);
                }
            }
            EXPECT_EQ(residual, ev);
            EXPECT_EQ(obs, match.obs_flip);
        }
    }
}

TEST(Decoder, DistanceAgreesWithDijkstra) {
    auto m = make_model(7, {{3, 3}}, 4, Sector::Z, WeightMode::Likelihood);
    Decoder dec(m->graph);
    std::mt19937_64 rng(1);
    for (int trial = 0; trial < 50; trial++) {
        int a = (int)(rng() % m->graph.num_detectors), b = (int)(rng() % m->graph.num_detectors);
        std::vector<int64_t> da = dijkstra(m->graph, a);
        EXPECT_EQ(dec.distance(a, b).first, da[b]);
        int64_t ba = std::min(da[m->graph.boundary_nodes[0]], da[m->graph.boundary_nodes[1]]);
        EXPECT_EQ(dec.boundary_distance(a), ba);
    }
}
