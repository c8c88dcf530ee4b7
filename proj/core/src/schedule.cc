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

#include "shellqec/schedule.h"

#include <algorithm>
#include <array>
#include <map>
#include <set>
#include <tuple>

#include "json.hpp"

namespace shellqec {

Phase Puncture::phase_at(int t) const {
    if (t < t_open || t >= t_close) {
        return Phase::None;
    }
    if (wall == WallKind::Rough) {
        return Phase::A;
    }
    if (wall == WallKind::Smooth) {
        return Phase::B;
    }
    return ((t - t_open) / period) % 2 == 0 ? Phase::A : Phase::B;
}

namespace {

CellRect clip(const CellRect &r, int d) {
    return {std::max(r.x0, 0), std::max(r.y0, 0), std::min(r.x1, d - 1), std::min(r.y1, d - 1)};
}

// Corners of face (x, r) as vertex coordinates.
std::array<CellCoord, 4> face_corners(int x, int r) {
    return {CellCoord{x - 1, r}, CellCoord{x, r}, CellCoord{x - 1, r + 1}, CellCoord{x, r + 1}};
}

int corners_in(const CellRect &hole, int x, int r) {
    int n = 0;
    for (const CellCoord &c : face_corners(x, r)) {
        n += hole.contains(c);
    }
    return n;
}

}  // namespace

Puncture make_puncture(const CodeLayout &layout, CellRect q, int level, int Q) {
    int d = layout.d();
    Puncture p;
    p.level = level;
    p.period = int_pow(Q, level);
    // A hole needs a full ring of plaquettes and stars around it; otherwise it becomes part of
    // the nearest array boundary, keeping the boundary type of that side.
    bool near_we = q.x0 < 2 || q.x1 > d - 3;
    bool near_ns = q.y0 < 2 || q.y1 > d - 3;
    if (near_we || near_ns) {
        p.wall = near_we ? WallKind::Rough : WallKind::Smooth;
        if (q.x0 < 2 && near_we) {
            q.x0 = 0;
        }
        if (q.x1 > d - 3 && near_we) {
            q.x1 = d - 1;
        }
        if (q.y0 < 2) {
            q.y0 = 0;
        }
        if (q.y1 > d - 3) {
            q.y1 = d - 1;
        }
    }
    p.quarantine = q;
    p.support = clip(q.dilated(1), d);
    p.hole = {q.x0 - 1, q.y0 - 1, q.x1, q.y1};

    for (int e = 0; e < layout.num_qubits(); e++) {
        auto [a, b] = layout.endpoints(e);
        int inside = p.hole.contains(a) + p.hole.contains(b);
        if (inside == 2) {
            p.interior_qubits.push_back(e);
        } else if (inside == 1) {
            p.boundary_qubits.push_back(e);
        }
    }
    for (int f = 0; f < layout.num_plaquettes(); f++) {
        const Check &c = layout.plaquette(f);
        int n = corners_in(p.hole, c.x, c.y);
        if (n > 0 && n < 4) {
            p.boundary_plaquettes.push_back(f);
        }
    }
    return p;
}

std::vector<Puncture> build_punctures(const ClusterDecomposition &decomp, const CodeLayout &layout) {
    int d = layout.d();
    if (decomp.d != 0 && decomp.d != d) {
        throw std::invalid_argument("decomposition and layout sizes differ");
    }
    std::vector<Puncture> out;
    for (const Cluster &c : decomp.clusters) {
        Puncture p = make_puncture(layout, quarantine_rect(c), c.level, decomp.Q);
        p.id = (int)out.size();
        out.push_back(std::move(p));
    }
    for (size_t i = 0; i < out.size(); i++) {
        // Footprint: the support plus the stars one further cell out.
        CellRect footprint = out[i].quarantine.dilated(2);
        for (size_t k = 0; k < decomp.clusters.size(); k++) {
            if (k == i) {
                continue;
            }
            for (const CellCoord &cell : decomp.clusters[k].cells) {
                if (footprint.contains(cell)) {
                    throw InoperableError("puncture " + std::to_string(i) + " reaches another defect cluster");
                }
            }
        }
        for (size_t k = i + 1; k < out.size(); k++) {
            if (rect_distance(out[i].quarantine, out[k].quarantine) < 3) {
                throw InoperableError("punctures " + std::to_string(i) + " and " + std::to_string(k) + " are too close");
            }
        }
    }
    std::vector<CellCoord> forbidden;
    for (const Puncture &p : out) {
        for (int y = p.support.y0; y <= p.support.y1; y++) {
            for (int x = p.support.x0; x <= p.support.x1; x++) {
                forbidden.push_back({x, y});
            }
        }
    }
    try {
        logical_representative(layout, Pauli::Z, forbidden);
        logical_representative(layout, Pauli::X, forbidden);
    } catch (const DisconnectedError &) {
        throw InoperableError("punctures disconnect the logical boundaries");
    }
    return out;
}

int default_rounds(int d, int Q, int m) {
    if (m < 0) {
        return d;
    }
    int64_t block = 2 * int_pow(Q, m);
    int64_t t = ((d + block - 1) / block) * block;
    return (int)t;
}

namespace {

struct Interner {
    ShellSchedule &schedule;
    std::map<std::tuple<int, int, std::vector<int>>, int> ids;

    int get(Pauli type, OpKind kind, int site, CellCoord cell, std::vector<int> qubits) {
        auto key = std::make_tuple((int)kind, site, qubits);
        auto it = ids.find(key);
        if (it != ids.end()) {
            return it->second;
        }
        OperatorSpec op;
        op.id = (int)schedule.operators.size();
        op.type = type;
        op.kind = kind;
        op.site = site;
        op.cell = cell;
        op.qubits = std::move(qubits);
        schedule.operators.push_back(op);
        ids.emplace(std::move(key), op.id);
        return op.id;
    }
};

}  // namespace

ShellSchedule build_schedule(
    std::shared_ptr<const CodeLayout> layout, std::vector<Puncture> punctures, int T, int Q, ScheduleOptions options) {
    if (T < 1) {
        throw std::invalid_argument("schedule needs at least one round");
    }
    ShellSchedule s;
    s.layout = layout;
    s.Q = Q;
    s.T = T;
    s.punctures = std::move(punctures);
    const CodeLayout &L = *layout;
    int nq = L.num_qubits();

    int64_t longest = 0;
    for (const Puncture &p : s.punctures) {
        if (!p.walled() && !p.dynamic) {
            longest = std::max(longest, 2 * p.period);
        }
    }
    if (!options.allow_short && T < longest) {
        throw std::invalid_argument(
            "T=" + std::to_string(T) + " is shorter than one full period (" + std::to_string(longest) +
            " rounds); shells would never close");
    }

    s.initially_active.assign(nq, 1);
    for (const Puncture &p : s.punctures) {
        if (p.t_open > 0) {
            continue;
        }
        for (int q : p.interior_qubits) {
            s.initially_active[q] = 0;
        }
        if (p.wall == WallKind::Smooth) {
            for (int q : p.boundary_qubits) {
                s.initially_active[q] = 0;
            }
        }
    }

    Interner interner{s, {}};
    size_t np = s.punctures.size();
    std::vector<Phase> prev(np, Phase::None);
    std::vector<uint8_t> removed(nq);
    s.rounds.resize(T);
    for (int t = 0; t < T; t++) {
        RoundDirective &rd = s.rounds[t];
        rd.phases.resize(np);
        std::fill(removed.begin(), removed.end(), 0);
        std::vector<const Puncture *> open_holes;
        for (size_t i = 0; i < np; i++) {
            const Puncture &p = s.punctures[i];
            Phase ph = p.phase_at(t);
            Phase pv = t == 0 ? Phase::None : prev[i];
            rd.phases[i] = ph;
            if (ph != Phase::None) {
                open_holes.push_back(&p);
                for (int q : p.interior_qubits) {
                    removed[q] = 1;
                }
                if (ph == Phase::B) {
                    for (int q : p.boundary_qubits) {
                        removed[q] = 1;
                    }
                }
            }
            if (p.walled()) {
                continue;
            }
            if (pv == Phase::None && ph == Phase::A) {
                if (t == 0) {
                    rd.init_plus.insert(rd.init_plus.end(), p.boundary_qubits.begin(), p.boundary_qubits.end());
                } else {
                    rd.deactivated.insert(rd.deactivated.end(), p.interior_qubits.begin(), p.interior_qubits.end());
                }
            } else if (pv == Phase::A && ph == Phase::B) {
                rd.readout_x.insert(rd.readout_x.end(), p.boundary_qubits.begin(), p.boundary_qubits.end());
            } else if (pv == Phase::B && ph == Phase::A) {
                rd.init_plus.insert(rd.init_plus.end(), p.boundary_qubits.begin(), p.boundary_qubits.end());
            } else if (pv != Phase::None && ph == Phase::None) {
                rd.init_plus.insert(rd.init_plus.end(), p.interior_qubits.begin(), p.interior_qubits.end());
                if (pv == Phase::B) {
                    rd.init_plus.insert(rd.init_plus.end(), p.boundary_qubits.begin(), p.boundary_qubits.end());
                }
            }
        }
        std::sort(rd.init_plus.begin(), rd.init_plus.end());
        std::sort(rd.readout_x.begin(), rd.readout_x.end());
        std::sort(rd.deactivated.begin(), rd.deactivated.end());

        for (int st = 0; st < L.num_stars(); st++) {
            const Check &c = L.star(st);
            bool hidden = std::any_of(open_holes.begin(), open_holes.end(), [&](const Puncture *p) {
                return p->hole_contains(c.x, c.y);
            });
            if (hidden) {
                continue;
            }
            std::vector<int> support;
            for (int q : c.qubits) {
                if (!removed[q]) {
                    support.push_back(q);
                }
            }
            if (!support.empty()) {
                rd.measured.push_back(interner.get(Pauli::X, OpKind::Star, st, c.cell, std::move(support)));
            }
        }
        for (int f = 0; f < L.num_plaquettes(); f++) {
            const Check &c = L.plaquette(f);
            bool hidden = false;
            for (const Puncture *p : open_holes) {
                int n = corners_in(p->hole, c.x, c.y);
                if (n == 4 || (n > 0 && p->phase_at(t) == Phase::B)) {
                    hidden = true;
                }
            }
            if (hidden) {
                continue;
            }
            std::vector<int> support;
            for (int q : c.qubits) {
                if (!removed[q]) {
                    support.push_back(q);
                }
            }
            if (!support.empty()) {
                rd.measured.push_back(interner.get(Pauli::Z, OpKind::Plaquette, f, c.cell, std::move(support)));
            }
        }
        for (int q : rd.readout_x) {
            rd.measured.push_back(interner.get(Pauli::X, OpKind::Readout, q, L.qubit(q).cell, {q}));
        }
        std::sort(rd.measured.begin(), rd.measured.end());
        prev = rd.phases;
    }
    return s;
}

std::vector<CellCoord> ShellSchedule::forbidden_cells() const {
    std::set<CellCoord> cells;
    for (const Puncture &p : punctures) {
        for (int y = p.support.y0; y <= p.support.y1; y++) {
            for (int x = p.support.x0; x <= p.support.x1; x++) {
                cells.insert({x, y});
            }
        }
    }
    return {cells.begin(), cells.end()};
}

std::string ShellSchedule::to_json() const {
    using nlohmann::ordered_json;
    ordered_json j;
    j["d"] = layout->d();
    j["Q"] = Q;
    j["T"] = T;
    auto ps = ordered_json::array();
    for (const Puncture &p : punctures) {
        const char *wall = p.wall == WallKind::Rough ? "rough" : p.wall == WallKind::Smooth ? "smooth" : "none";
        ps.push_back({{"id", p.id},
                      {"level", p.level},
                      {"period", p.period},
                      {"quarantine", {p.quarantine.x0, p.quarantine.y0, p.quarantine.x1, p.quarantine.y1}},
                      {"wall", wall},
                      {"dynamic", p.dynamic},
                      {"t_open", p.t_open},
                      {"t_close", p.t_close == INT_MAX ? -1 : p.t_close},
                      {"boundary_qubits", p.boundary_qubits},
                      {"boundary_plaquettes", p.boundary_plaquettes}});
    }
    j["punctures"] = ps;
    auto ops = ordered_json::array();
    for (const OperatorSpec &op : operators) {
        const char *kind = op.kind == OpKind::Star ? "star" : op.kind == OpKind::Plaquette ? "plaquette" : "readout";
        ops.push_back({{"id", op.id}, {"type", op.type == Pauli::X ? "X" : "Z"}, {"kind", kind}, {"site", op.site}, {"qubits", op.qubits}});
    }
    j["operators"] = ops;
    auto rs = ordered_json::array();
    for (int t = 0; t < T; t++) {
        const RoundDirective &rd = rounds[t];
        rs.push_back({{"round", t},
                      {"measured", rd.measured},
                      {"init_plus", rd.init_plus},
                      {"readout_x", rd.readout_x},
                      {"deactivated", rd.deactivated}});
    }
    j["rounds"] = rs;
    return j.dump();
}

std::vector<Shell> enumerate_shells(const ShellSchedule &schedule) {
    std::vector<Shell> out;
    for (const Puncture &p : schedule.punctures) {
        if (p.walled()) {
            continue;
        }
        int end = std::min(p.t_close, schedule.T);
        for (int64_t a = p.t_open; a < end; a += p.period) {
            Shell sh;
            sh.puncture = p.id;
            sh.level = p.level;
            sh.box = p.support;
            sh.t_begin = (int)a;
            sh.t_end = (int)std::min<int64_t>(a + p.period, end);
            sh.type = p.phase_at((int)a) == Phase::A ? ShellType::ZDetecting : ShellType::XDetecting;
            sh.time_boundary = (a == 0) || (sh.t_end - sh.t_begin < p.period) || (sh.t_end == schedule.T);
            out.push_back(sh);
        }
    }
    return out;
}

int same_type_shell_distance(const Shell &a, const Shell &b) {
    if (a.type != b.type) {
        throw std::invalid_argument("shell distance is only defined for shells of the same type");
    }
    int spatial = rect_distance(a.box, b.box);
    int temporal = 0;
    if (a.t_end <= b.t_begin) {
        temporal = b.t_begin - a.t_end + 1;
    } else if (b.t_end <= a.t_begin) {
        temporal = a.t_begin - b.t_end + 1;
    }
    return std::max(spatial, temporal);
}

ShellSchedule edit_schedule_for_burst(const ShellSchedule &schedule, CellRect region, int t_open, int t_close) {
    if (t_open == t_close) {
        return schedule;
    }
    const CodeLayout &L = schedule.code();
    if (t_open < 0 || t_open > t_close || t_close > schedule.T) {
        throw std::invalid_argument("burst window must satisfy 0 <= t_open < t_close <= T");
    }
    if (region.empty() || !L.in_array({region.x0, region.y0}) || !L.in_array({region.x1, region.y1})) {
        throw std::invalid_argument("burst region must lie inside the array");
    }
    int side = std::max(region.width(), region.height());
    Puncture p = make_puncture(L, region, level_for_size(side, schedule.Q), schedule.Q);
    if (p.walled()) {
        throw InoperableError("burst region is too close to the array boundary for a dynamic puncture");
    }
    for (const Puncture &o : schedule.punctures) {
        bool overlap_in_time = o.t_open < t_close && t_open < o.t_close;
        if (overlap_in_time && rect_distance(o.quarantine, p.quarantine) < 3) {
            throw std::invalid_argument("burst region overlaps an existing puncture");
        }
    }
    p.dynamic = true;
    p.t_open = t_open;
    p.t_close = t_close >= schedule.T ? INT_MAX : t_close;
    p.id = (int)schedule.punctures.size();
    std::vector<Puncture> ps = schedule.punctures;
    ps.push_back(p);
    return build_schedule(schedule.layout, std::move(ps), schedule.T, schedule.Q, {true});
}

}  // namespace shellqec
