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

#include "shellqec/lattice.h"

#include <algorithm>
#include <deque>
#include <set>

namespace shellqec {

const char *to_string(Sector s) { return s == Sector::X ? "X" : "Z"; }

Sector parse_sector(const std::string &text) {
    if (text == "X" || text == "x") {
        return Sector::X;
    }
    if (text == "Z" || text == "z") {
        return Sector::Z;
    }
    throw std::invalid_argument("sector must be X or Z, got '" + text + "'");
}

CodeLayout::CodeLayout(int d) : d_(d) {
    if (d < 3 || d % 2 == 0) {
        throw std::invalid_argument("code distance must be odd and at least 3, got " + std::to_string(d));
    }
    qubits_.resize(d * d + (d - 1) * (d - 1));
    for (int y = 0; y < d; y++) {
        for (int x = 0; x < d; x++) {
            qubits_[h_edge(x, y)] = {true, x, y, {x, y}};
        }
    }
    for (int y = 0; y + 1 < d; y++) {
        for (int x = 0; x + 1 < d; x++) {
            qubits_[v_edge(x, y)] = {false, x, y, {x, y + 1}};
        }
    }

    stars_.resize(d * (d - 1));
    for (int y = 0; y < d; y++) {
        for (int x = 0; x + 1 < d; x++) {
            Check &c = stars_[star_at(x, y)];
            c.type = Pauli::X;
            c.x = x;
            c.y = y;
            c.cell = {x, y};
            c.qubits = vertex_edges(x, y);
            std::sort(c.qubits.begin(), c.qubits.end());
        }
    }
    plaquettes_.resize(d * (d - 1));
    for (int r = 0; r + 1 < d; r++) {
        for (int x = 0; x < d; x++) {
            Check &c = plaquettes_[plaquette_at(x, r)];
            c.type = Pauli::Z;
            c.x = x;
            c.y = r;
            c.cell = {x, r + 1};
            c.qubits = face_edges(x, r);
            std::sort(c.qubits.begin(), c.qubits.end());
        }
    }
}

int CodeLayout::h_edge(int x, int y) const {
    if (x < 0 || y < 0 || x >= d_ || y >= d_) {
        return -1;
    }
    return y * d_ + x;
}

int CodeLayout::v_edge(int x, int y) const {
    if (x < 0 || y < 0 || x >= d_ - 1 || y >= d_ - 1) {
        return -1;
    }
    return d_ * d_ + y * (d_ - 1) + x;
}

int CodeLayout::star_at(int x, int y) const {
    if (x < 0 || y < 0 || x >= d_ - 1 || y >= d_) {
        return -1;
    }
    return y * (d_ - 1) + x;
}

int CodeLayout::plaquette_at(int x, int r) const {
    if (x < 0 || r < 0 || x >= d_ || r >= d_ - 1) {
        return -1;
    }
    return r * d_ + x;
}

std::pair<CellCoord, CellCoord> CodeLayout::endpoints(int q) const {
    const QubitGeometry &g = qubits_[q];
    if (g.horizontal) {
        return {{g.x - 1, g.y}, {g.x, g.y}};
    }
    return {{g.x, g.y}, {g.x, g.y + 1}};
}

std::vector<int> CodeLayout::face_edges(int x, int r) const {
    std::vector<int> out;
    for (int q : {h_edge(x, r), h_edge(x, r + 1), v_edge(x - 1, r), v_edge(x, r)}) {
        if (q >= 0) {
            out.push_back(q);
        }
    }
    return out;
}

std::vector<int> CodeLayout::vertex_edges(int x, int y) const {
    std::vector<int> out;
    for (int q : {h_edge(x, y), h_edge(x + 1, y), v_edge(x, y - 1), v_edge(x, y)}) {
        if (q >= 0) {
            out.push_back(q);
        }
    }
    return out;
}

namespace {

struct PathGraph {
    // Node coordinates used for tie-breaking; virtual terminals get out-of-range rows/cols.
    std::vector<CellCoord> coord;
    std::vector<std::vector<std::pair<int, int>>> adj;  // (neighbor, qubit)
    int source = -1;
    int sink = -1;

    int add_node(CellCoord c) {
        coord.push_back(c);
        adj.emplace_back();
        return (int)coord.size() - 1;
    }
    void connect(int a, int b, int q) {
        adj[a].push_back({b, q});
        adj[b].push_back({a, q});
    }
};

std::vector<int> shortest_path_qubits(const PathGraph &g) {
    std::vector<int> dist(g.coord.size(), -1);
    std::deque<int> queue{g.sink};
    dist[g.sink] = 0;
    while (!queue.empty()) {
        int u = queue.front();
        queue.pop_front();
        for (auto [v, q] : g.adj[u]) {
            (void)q;
            if (dist[v] < 0) {
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
        }
    }
    if (dist[g.source] < 0) {
        throw DisconnectedError("forbidden cells disconnect the logical boundaries");
    }
    std::vector<int> path;
    int u = g.source;
    while (u != g.sink) {
        int best = -1;
        int best_q = -1;
        for (auto [v, q] : g.adj[u]) {
            if (dist[v] != dist[u] - 1) {
                continue;
            }
            if (best < 0 || g.coord[v] < g.coord[best] || (g.coord[v] == g.coord[best] && q < best_q)) {
                best = v;
                best_q = q;
            }
        }
        path.push_back(best_q);
        u = best;
    }
    return path;
}

}  // namespace

LogicalRep logical_representative(
    const CodeLayout &layout, Pauli type, const std::vector<CellCoord> &forbidden) {
    int d = layout.d();
    std::set<CellCoord> blocked(forbidden.begin(), forbidden.end());
    auto allowed = [&](CellCoord c) { return blocked.count(c) == 0; };
    auto qubit_ok = [&](int q) { return q >= 0 && allowed(layout.qubit(q).cell); };

    PathGraph g;
    if (type == Pauli::Z) {
        // Nodes are vertices; terminals are the virtual west and east columns.
        std::vector<int> node(layout.num_stars(), -1);
        for (int s = 0; s < layout.num_stars(); s++) {
            const Check &c = layout.star(s);
            if (allowed(c.cell)) {
                node[s] = g.add_node({c.x, c.y});
            }
        }
        g.source = g.add_node({-1, d});
        g.sink = g.add_node({d, d});
        auto vertex_node = [&](int x, int y) -> int {
            if (x < 0) {
                return g.source;
            }
            if (x >= d - 1) {
                return g.sink;
            }
            return node[layout.star_at(x, y)];
        };
        for (int q = 0; q < layout.num_qubits(); q++) {
            if (!qubit_ok(q)) {
                continue;
            }
            auto [a, b] = layout.endpoints(q);
            int na = vertex_node(a.x, a.y);
            int nb = vertex_node(b.x, b.y);
            if (na >= 0 && nb >= 0) {
                g.connect(na, nb, q);
            }
        }
    } else {
        // Nodes are faces; terminals are the virtual rows above and below the array.
        std::vector<int> node(layout.num_plaquettes(), -1);
        for (int p = 0; p < layout.num_plaquettes(); p++) {
            const Check &c = layout.plaquette(p);
            if (allowed(c.cell)) {
                node[p] = g.add_node({c.x, c.y});
            }
        }
        g.source = g.add_node({d, -1});
        g.sink = g.add_node({d, d});
        auto face_node = [&](int x, int r) -> int {
            if (r < 0) {
                return g.source;
            }
            if (r >= d - 1) {
                return g.sink;
            }
            return node[layout.plaquette_at(x, r)];
        };
        for (int q = 0; q < layout.num_qubits(); q++) {
            if (!qubit_ok(q)) {
                continue;
            }
            const QubitGeometry &geo = layout.qubit(q);
            int na, nb;
            if (geo.horizontal) {
                na = face_node(geo.x, geo.y - 1);
                nb = face_node(geo.x, geo.y);
            } else {
                na = face_node(geo.x, geo.y);
                nb = face_node(geo.x + 1, geo.y);
            }
            if (na >= 0 && nb >= 0) {
                g.connect(na, nb, q);
            }
        }
    }
    LogicalRep rep;
    rep.type = type;
    rep.qubits = shortest_path_qubits(g);
    return rep;
}

}  // namespace shellqec
