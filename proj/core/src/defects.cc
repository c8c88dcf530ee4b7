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

#include "shellqec/defects.h"

#include <algorithm>
#include <fstream>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "json.hpp"

namespace shellqec {

int rect_distance(const CellRect &a, const CellRect &b) {
    int gx = std::max({0, b.x0 - a.x1, a.x0 - b.x1});
    int gy = std::max({0, b.y0 - a.y1, a.y0 - b.y1});
    return std::max(gx, gy);
}

int64_t int_pow(int64_t Q, int j) {
    const int64_t cap = std::numeric_limits<int64_t>::max() / 4;
    int64_t r = 1;
    for (int k = 0; k < j; k++) {
        if (r > cap / std::max<int64_t>(Q, 1)) {
            return cap;
        }
        r *= Q;
    }
    return r;
}

int level_for_size(int64_t size, int Q) {
    int j = 0;
    while (int_pow(Q, j) < size) {
        j++;
    }
    return j;
}

DefectMap sample_defects(int d, double f, uint64_t seed) {
    if (!(f >= 0 && f <= 1)) {
        throw std::invalid_argument("defect rate must lie in [0, 1]");
    }
    DefectMap map;
    map.d = d;
    map.f = f;
    Rng rng(seed);
    std::bernoulli_distribution coin(f);
    for (int y = 0; y < d; y++) {
        for (int x = 0; x < d; x++) {
            if (coin(rng)) {
                map.defective.push_back({x, y});
            }
        }
    }
    return map;
}

namespace {

Cluster make_cluster(std::vector<CellCoord> cells, int Q) {
    Cluster c;
    std::sort(cells.begin(), cells.end());
    c.cells = std::move(cells);
    c.bbox = {c.cells[0].x, c.cells[0].y, c.cells[0].x, c.cells[0].y};
    for (const CellCoord &p : c.cells) {
        c.bbox.x0 = std::min(c.bbox.x0, p.x);
        c.bbox.x1 = std::max(c.bbox.x1, p.x);
        c.bbox.y0 = std::min(c.bbox.y0, p.y);
        c.bbox.y1 = std::max(c.bbox.y1, p.y);
    }
    c.side = std::max(c.bbox.width(), c.bbox.height());
    c.corner = {c.bbox.x0, c.bbox.y0};
    c.level = level_for_size(c.side, Q);
    return c;
}

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int a) {
        while (parent[a] != a) {
            parent[a] = parent[parent[a]];
            a = parent[a];
        }
        return a;
    }
    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a != b) {
            parent[std::max(a, b)] = std::min(a, b);
        }
    }
};

}  // namespace

int cluster_separation(const Cluster &a, const Cluster &b) {
    int best = std::numeric_limits<int>::max();
    for (const CellCoord &p : a.cells) {
        for (const CellCoord &q : b.cells) {
            best = std::min(best, inf_distance(p, q));
        }
    }
    return best;
}

ClusterDecomposition decompose(const DefectMap &map, int Q) {
    if (Q < 2) {
        throw std::invalid_argument("decomposition base Q must be at least 2");
    }
    ClusterDecomposition out;
    out.d = map.d;
    out.Q = Q;

    std::vector<CellCoord> cells = map.defective;
    std::sort(cells.begin(), cells.end());
    cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
    if (cells.empty()) {
        return out;
    }

    // 8-connected components. Cells are sorted, so a neighbour lookup is a binary search.
    int n = (int)cells.size();
    UnionFind uf(n);
    for (int i = 0; i < n; i++) {
        for (auto [dx, dy] : {std::pair{1, 0}, {-1, 1}, {0, 1}, {1, 1}}) {
            CellCoord nb{cells[i].x + dx, cells[i].y + dy};
            auto it = std::lower_bound(cells.begin(), cells.end(), nb);
            if (it != cells.end() && *it == nb) {
                uf.unite(i, (int)(it - cells.begin()));
            }
        }
    }
    std::vector<std::vector<CellCoord>> groups(n);
    for (int i = 0; i < n; i++) {
        groups[uf.find(i)].push_back(cells[i]);
    }

    std::vector<Cluster> pool;
    for (auto &g : groups) {
        if (!g.empty()) {
            pool.push_back(make_cluster(std::move(g), Q));
        }
    }
    std::vector<bool> alive(pool.size(), true);

    auto violates = [&](const Cluster &a, const Cluster &b) {
        int j = std::min(a.level, b.level);
        double threshold = (double)int_pow(Q, j + 1) / 3.0;
        if (rect_distance(a.bbox, b.bbox) >= threshold) {
            return false;
        }
        return cluster_separation(a, b) < threshold;
    };

    // Violating pairs keyed by the smallest cells of both clusters (smaller one first).
    using Key = std::tuple<int, int, int, int, int, int>;
    auto key = [&](int a, int b) {
        CellCoord ma = pool[a].cells[0];
        CellCoord mb = pool[b].cells[0];
        if (mb < ma) {
            std::swap(a, b);
            std::swap(ma, mb);
        }
        return Key{ma.y, ma.x, mb.y, mb.x, a, b};
    };
    std::set<Key> pending;
    for (size_t a = 0; a < pool.size(); a++) {
        for (size_t b = a + 1; b < pool.size(); b++) {
            if (violates(pool[a], pool[b])) {
                pending.insert(key((int)a, (int)b));
            }
        }
    }
    while (!pending.empty()) {
        Key k = *pending.begin();
        int a = std::get<4>(k);
        int b = std::get<5>(k);
        for (auto it = pending.begin(); it != pending.end();) {
            int u = std::get<4>(*it);
            int v = std::get<5>(*it);
            if (u == a || u == b || v == a || v == b) {
                it = pending.erase(it);
            } else {
                ++it;
            }
        }
        std::vector<CellCoord> merged = pool[a].cells;
        merged.insert(merged.end(), pool[b].cells.begin(), pool[b].cells.end());
        alive[a] = false;
        alive[b] = false;
        pool.push_back(make_cluster(std::move(merged), Q));
        alive.push_back(true);
        int c = (int)pool.size() - 1;
        for (int o = 0; o < c; o++) {
            if (alive[o] && violates(pool[o], pool[c])) {
                pending.insert(key(o, c));
            }
        }
    }

    for (size_t i = 0; i < pool.size(); i++) {
        if (alive[i]) {
            out.clusters.push_back(std::move(pool[i]));
        }
    }
    std::sort(out.clusters.begin(), out.clusters.end(), [](const Cluster &a, const Cluster &b) {
        return a.cells[0] < b.cells[0];
    });
    for (const Cluster &c : out.clusters) {
        out.m = std::max(out.m, c.level);
    }
    return out;
}

bool is_operable(const ClusterDecomposition &decomp, int d) {
    if (decomp.m < 0) {
        return true;
    }
    return (double)int_pow(decomp.Q, decomp.m) <= (double)d / 5.0 - 3.0;
}

RateEstimate estimate_discard_rate(int d, double f, int Q, int64_t shots, uint64_t seed) {
    int64_t discards = 0;
    for (int64_t s = 0; s < shots; s++) {
        DefectMap map = sample_defects(d, f, mix_seed(seed, (uint64_t)s));
        if (!is_operable(decompose(map, Q), d)) {
            discards++;
        }
    }
    return wilson_interval(discards, shots);
}

std::string defect_map_to_json(const DefectMap &map) {
    nlohmann::ordered_json j;
    j["d"] = map.d;
    j["cells"] = nlohmann::ordered_json::array();
    for (const CellCoord &c : map.defective) {
        j["cells"].push_back({c.x, c.y});
    }
    return j.dump();
}

DefectMap defect_map_from_json(const std::string &text) {
    nlohmann::json j = nlohmann::json::parse(text);
    DefectMap map;
    map.d = j.at("d").get<int>();
    if (map.d < 1) {
        throw std::invalid_argument("defect map has invalid size");
    }
    for (const auto &cell : j.at("cells")) {
        CellCoord c{cell.at(0).get<int>(), cell.at(1).get<int>()};
        if (c.x < 0 || c.y < 0 || c.x >= map.d || c.y >= map.d) {
            throw std::invalid_argument("defect cell outside the array");
        }
        map.defective.push_back(c);
    }
    std::sort(map.defective.begin(), map.defective.end());
    map.defective.erase(std::unique(map.defective.begin(), map.defective.end()), map.defective.end());
    if (map.d > 0) {
        map.f = (double)map.defective.size() / ((double)map.d * map.d);
    }
    return map;
}

DefectMap read_defect_map(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open defect map '" + path + "'");
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return defect_map_from_json(buffer.str());
}

void write_defect_map(const DefectMap &map, const std::string &path) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write defect map '" + path + "'");
    }
    out << defect_map_to_json(map) << "\n";
}

}  // namespace shellqec
