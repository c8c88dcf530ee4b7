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

#include "shellqec/detectors.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <unordered_map>

namespace shellqec {

const char *to_string(DetectorKind kind) {
    switch (kind) {
        case DetectorKind::BulkComparison:
            return "bulk-comparison";
        case DetectorKind::ShellParity:
            return "shell-parity";
        case DetectorKind::InferredDeformation:
            return "inferred-deformation";
        case DetectorKind::SpaceBoundary:
            return "space-boundary";
        case DetectorKind::TimeBoundary:
            return "time-boundary";
    }
    return "?";
}

namespace {

enum EventType : uint8_t { kInit, kDeactivate, kReadout };

struct QubitEvent {
    int round;
    EventType type;
};

// Preparations, deactivations and readouts of every qubit, in round order.
std::vector<std::vector<QubitEvent>> qubit_events(const ShellSchedule &s, bool initial_prep) {
    int nq = s.code().num_qubits();
    std::vector<std::vector<QubitEvent>> ev(nq);
    if (initial_prep) {
        for (int q = 0; q < nq; q++) {
            if (s.initially_active[q]) {
                ev[q].push_back({0, kInit});
            }
        }
    }
    for (int t = 0; t < s.T; t++) {
        const RoundDirective &rd = s.rounds[t];
        for (int q : rd.init_plus) {
            ev[q].push_back({t, kInit});
        }
        for (int q : rd.deactivated) {
            ev[q].push_back({t, kDeactivate});
        }
        for (int q : rd.readout_x) {
            ev[q].push_back({t, kReadout});
        }
    }
    return ev;
}

bool quiet(const std::vector<QubitEvent> &ev, int a, int b) {
    for (const QubitEvent &e : ev) {
        if (e.round > a && e.round <= b) {
            return false;
        }
    }
    return true;
}

// Round of the last event at or before b if it is a preparation after a, else -1.
int prepared_after(const std::vector<QubitEvent> &ev, int a, int b) {
    const QubitEvent *last = nullptr;
    for (const QubitEvent &e : ev) {
        if (e.round <= b) {
            last = &e;
        }
    }
    if (last == nullptr || last->type != kInit || last->round <= a) {
        return -1;
    }
    return last->round;
}

// Round of a readout that is the first event after a and happens no later than b, else -1.
int read_out_after(const std::vector<QubitEvent> &ev, int a, int b) {
    for (const QubitEvent &e : ev) {
        if (e.round > a) {
            return (e.type == kReadout && e.round <= b) ? e.round : -1;
        }
    }
    return -1;
}

int corners_in(const CellRect &hole, int x, int r) {
    return hole.contains({x - 1, r}) + hole.contains({x, r}) + hole.contains({x - 1, r + 1}) + hole.contains({x, r + 1});
}

std::vector<int> sorted_xor(std::vector<int> v) {
    std::sort(v.begin(), v.end());
    std::vector<int> out;
    for (size_t i = 0; i < v.size();) {
        size_t j = i;
        while (j < v.size() && v[j] == v[i]) {
            j++;
        }
        if ((j - i) % 2 == 1) {
            out.push_back(v[i]);
        }
        i = j;
    }
    return out;
}

struct Builder {
    const SectorCircuit &c;
    const ShellSchedule &s;
    const CodeLayout &L;
    std::vector<Detector> out;
    std::unordered_map<int64_t, int> lookup;  // (kind, site, round) -> measurement
    std::vector<int> linked;                  // measurement -> earlier measurement it is compared with
    std::vector<uint8_t> individual;          // measurement has its own detector from its own round

    Builder(const SectorCircuit &circuit)
        : c(circuit), s(*circuit.schedule), L(circuit.schedule->code()) {
        linked.assign(c.meas.size(), -1);
        individual.assign(c.meas.size(), 0);
        for (int m = 0; m < c.num_measurements(); m++) {
            const SectorMeasurement &sm = c.meas[m];
            if (sm.op < 0) {
                continue;
            }
            const OperatorSpec &op = s.operators[sm.op];
            lookup[key(op.kind, op.site, sm.round)] = m;
        }
    }

    int64_t key(OpKind kind, int site, int t) const {
        return (((int64_t)kind * (int64_t)(L.num_qubits() + 1) + site) * (int64_t)(s.T + 2)) + t;
    }

    int at(OpKind kind, int site, int t) const {
        auto it = lookup.find(key(kind, site, t));
        return it == lookup.end() ? -1 : it->second;
    }

    std::vector<int> at_all(OpKind kind, const std::vector<int> &sites, int t) const {
        std::vector<int> ms;
        for (int site : sites) {
            int m = at(kind, site, t);
            if (m >= 0) {
                ms.push_back(m);
            }
        }
        return ms;
    }

    std::vector<int> support(int m) const { return {c.support_begin(m), c.support_end(m)}; }

    void add(DetectorKind kind, std::vector<int> meas, CellCoord cell, int round, int puncture = -1) {
        meas = sorted_xor(std::move(meas));
        if (meas.empty()) {
            return;
        }
        Detector d;
        d.id = (int)out.size();
        d.kind = kind;
        d.meas = std::move(meas);
        d.cell = cell;
        d.round = round;
        d.puncture = puncture;
        out.push_back(std::move(d));
    }

    // Drops measurement pairs that already have their own comparison detector.
    void drop_linked(std::vector<int> &now, std::vector<int> &before) const {
        std::vector<int> keep_now;
        for (int m : now) {
            auto it = std::find(before.begin(), before.end(), linked[m]);
            if (linked[m] >= 0 && it != before.end()) {
                before.erase(it);
            } else {
                keep_now.push_back(m);
            }
        }
        now = std::move(keep_now);
    }
};

bool on_array_boundary(const CodeLayout &L, const OperatorSpec &op) {
    if (op.kind == OpKind::Plaquette) {
        int x = L.plaquette(op.site).x;
        return x == 0 || x == L.d() - 1;
    }
    if (op.kind == OpKind::Star) {
        int y = L.star(op.site).y;
        return y == 0 || y == L.d() - 1;
    }
    return false;
}

void check_detectors(Builder &b) {
    const SectorCircuit &c = b.c;
    const ShellSchedule &s = b.s;
    bool sector_z = c.sector == Sector::Z;
    auto events = qubit_events(s, sector_z);

    std::map<std::pair<int, int>, std::vector<int>> sequences;  // (kind, site) -> measurements
    for (int m = 0; m < c.num_measurements(); m++) {
        const SectorMeasurement &sm = c.meas[m];
        if (sm.op < 0 || s.operators[sm.op].kind == OpKind::Readout) {
            continue;
        }
        const OperatorSpec &op = s.operators[sm.op];
        sequences[{(int)op.kind, op.site}].push_back(m);
    }

    for (const auto &[site_key, seq] : sequences) {
        int prev = -1;
        for (int m : seq) {
            const SectorMeasurement &sm = c.meas[m];
            const OperatorSpec &op = s.operators[sm.op];
            int t = sm.round;
            int tp = prev >= 0 ? c.meas[prev].round : -1;
            std::vector<int> S = b.support(m);
            bool done = false;
            if (prev >= 0) {
                std::vector<int> Sp = b.support(prev);
                std::vector<int> extra;
                bool valid = true;
                if (!sector_z) {
                    valid = c.meas[prev].op == sm.op;
                    for (int q : S) {
                        valid = valid && quiet(events[q], tp, t);
                    }
                } else {
                    for (int q : Sp) {
                        bool kept = std::binary_search(S.begin(), S.end(), q);
                        if (kept) {
                            valid = valid && quiet(events[q], tp, t);
                        } else {
                            int r = read_out_after(events[q], tp, t);
                            int rm = r >= 0 ? b.at(OpKind::Readout, q, r) : -1;
                            valid = valid && rm >= 0;
                            extra.push_back(rm);
                        }
                    }
                    for (int q : S) {
                        if (!std::binary_search(Sp.begin(), Sp.end(), q)) {
                            valid = valid && prepared_after(events[q], tp, t) >= 0;
                        }
                    }
                }
                if (valid) {
                    DetectorKind kind = DetectorKind::BulkComparison;
                    if (S != Sp) {
                        kind = DetectorKind::InferredDeformation;
                    } else if (S.size() < 4 && on_array_boundary(b.L, op)) {
                        kind = DetectorKind::SpaceBoundary;
                    }
                    extra.push_back(prev);
                    extra.push_back(m);
                    b.add(kind, extra, op.cell, t);
                    b.linked[m] = prev;
                    done = true;
                }
            }
            if (!done) {
                bool fresh = true;
                if (sector_z) {
                    for (int q : S) {
                        fresh = fresh && prepared_after(events[q], tp, t) >= 0;
                    }
                } else {
                    fresh = t == 0;
                    for (int q : S) {
                        for (const QubitEvent &e : events[q]) {
                            fresh = fresh && !(e.round == 0 && e.type == kInit);
                        }
                    }
                }
                if (fresh) {
                    b.add(t == 0 ? DetectorKind::TimeBoundary : DetectorKind::InferredDeformation, {m}, op.cell, t);
                    b.individual[m] = 1;
                }
            }
            prev = m;
        }
    }

    // Checks measured in the last round are closed by the transversal readout.
    if (s.T >= 1) {
        const SectorRound &r = c.rounds[s.T - 1];
        for (int m = r.meas_begin; m < r.meas_end; m++) {
            const SectorMeasurement &sm = c.meas[m];
            if (s.operators[sm.op].kind == OpKind::Readout) {
                continue;
            }
            std::vector<int> parts{m};
            bool ok = true;
            for (int q : b.support(m)) {
                int f = c.final_readout(q);
                ok = ok && f >= 0;
                parts.push_back(f);
            }
            if (ok) {
                b.add(DetectorKind::TimeBoundary, parts, s.operators[sm.op].cell, s.T);
            }
        }
    }
}

CellCoord center_of(const CellRect &r) { return {(r.x0 + r.x1) / 2, (r.y0 + r.y1) / 2}; }

void shell_detectors(Builder &b) {
    const SectorCircuit &c = b.c;
    const ShellSchedule &s = b.s;
    const CodeLayout &L = b.L;
    int T = s.T;
    for (const Puncture &p : s.punctures) {
        if (p.walled()) {
            continue;
        }
        CellCoord cell = center_of(p.quarantine);
        auto phase = [&](int t) { return (t < 0 || t >= T) ? Phase::None : p.phase_at(t); };

        if (c.sector == Sector::X) {
            std::vector<int> block;
            for (int f = 0; f < L.num_plaquettes(); f++) {
                if (corners_in(p.hole, L.plaquette(f).x, L.plaquette(f).y) > 0) {
                    block.push_back(f);
                }
            }
            std::vector<int> last_ring;
            for (int t = 0; t < T; t++) {
                Phase ph = phase(t), pv = phase(t - 1);
                if (ph == Phase::A && pv != Phase::A) {
                    std::vector<int> now = b.at_all(OpKind::Plaquette, p.boundary_plaquettes, t);
                    if (pv == Phase::None && t == 0) {
                        b.add(DetectorKind::TimeBoundary, now, cell, t, p.id);
                    } else if (pv == Phase::None) {
                        std::vector<int> before = b.at_all(OpKind::Plaquette, block, t - 1);
                        b.drop_linked(now, before);
                        now.insert(now.end(), before.begin(), before.end());
                        b.add(DetectorKind::InferredDeformation, now, cell, t, p.id);
                    } else {
                        now.insert(now.end(), last_ring.begin(), last_ring.end());
                        b.add(DetectorKind::ShellParity, now, cell, t, p.id);
                    }
                }
                if (ph == Phase::None && pv != Phase::None) {
                    std::vector<int> now = b.at_all(OpKind::Plaquette, block, t);
                    std::vector<int> before = last_ring;
                    b.drop_linked(now, before);
                    now.insert(now.end(), before.begin(), before.end());
                    b.add(DetectorKind::ShellParity, now, cell, t, p.id);
                }
                if (ph == Phase::A) {
                    last_ring = b.at_all(OpKind::Plaquette, p.boundary_plaquettes, t);
                }
            }
            if (phase(T - 1) == Phase::B) {
                std::vector<int> loop;
                for (int m : last_ring) {
                    for (int q : b.support(m)) {
                        loop.push_back(q);
                    }
                }
                loop = sorted_xor(std::move(loop));
                std::vector<int> parts = last_ring;
                for (int q : loop) {
                    int f = c.final_readout(q);
                    if (f < 0) {
                        throw SoundnessError("outer loop qubit is not read out at the end");
                    }
                    parts.push_back(f);
                }
                b.add(DetectorKind::ShellParity, parts, cell, T, p.id);
            }
        } else {
            std::vector<int> hole_stars;
            for (int st = 0; st < L.num_stars(); st++) {
                if (p.hole_contains(L.star(st).x, L.star(st).y)) {
                    hole_stars.push_back(st);
                }
            }
            std::vector<int> green;
            for (int t = 0; t < T; t++) {
                Phase ph = phase(t), pv = phase(t - 1);
                if (ph == Phase::A && pv != Phase::A) {
                    green.clear();
                    if (pv == Phase::None && t > 0) {
                        green = b.at_all(OpKind::Star, hole_stars, t - 1);
                    }
                }
                if (pv == Phase::A && ph == Phase::B) {
                    std::vector<int> parts = green;
                    for (int q : p.boundary_qubits) {
                        int m = b.at(OpKind::Readout, q, t);
                        if (m < 0) {
                            throw SoundnessError("missing boundary readout at phase change");
                        }
                        parts.push_back(m);
                    }
                    b.add(DetectorKind::ShellParity, parts, cell, t, p.id);
                }
                if (pv == Phase::A && ph == Phase::None) {
                    std::vector<int> parts = green;
                    for (int m : b.at_all(OpKind::Star, hole_stars, t)) {
                        if (!b.individual[m]) {
                            parts.push_back(m);
                        }
                    }
                    b.add(DetectorKind::ShellParity, parts, cell, t, p.id);
                }
            }
            if (phase(T - 1) == Phase::A) {
                std::vector<int> parts = green;
                for (int q : p.boundary_qubits) {
                    int f = c.final_readout(q);
                    if (f < 0) {
                        throw SoundnessError("boundary qubit is not read out at the end");
                    }
                    parts.push_back(f);
                }
                b.add(DetectorKind::ShellParity, parts, cell, T, p.id);
            }
        }
    }
}

}  // namespace

std::vector<Detector> build_detectors(const SectorCircuit &circuit, const DetectorOptions &options) {
    Builder b(circuit);
    check_detectors(b);
    shell_detectors(b);
    if (options.verify) {
        verify_detectors(circuit, b.out, options.verify_trials, options.verify_seed);
    }
    return std::move(b.out);
}

void set_references(std::vector<Detector> &detectors, const MeasurementRecord &reference) {
    for (Detector &d : detectors) {
        uint8_t v = 0;
        for (int m : d.meas) {
            v ^= reference.bits[m];
        }
        d.reference = v;
    }
}

std::vector<int> extract_events(const MeasurementRecord &record, const std::vector<Detector> &detectors) {
    std::vector<int> events;
    for (const Detector &d : detectors) {
        uint8_t v = d.reference;
        for (int m : d.meas) {
            v ^= record.bits[m];
        }
        if (v) {
            events.push_back(d.id);
        }
    }
    return events;
}

namespace {

// Stabilizer rows of the tracked Pauli type, kept in echelon form with distinct lowest bits.
class CssTableau {
   public:
    explicit CssTableau(int n) : words_((n + 63) / 64), row_of_pivot_(n, -1) {}

    using Bits = std::vector<uint64_t>;

    Bits make(const int *begin, const int *end) const {
        Bits b(words_, 0);
        for (const int *p = begin; p != end; ++p) {
            b[*p >> 6] ^= uint64_t{1} << (*p & 63);
        }
        return b;
    }

    // Outcome of measuring `op`; random outcomes are drawn when it is not in the span,
    // unless `prepare` asks for the +1 eigenstate.
    uint8_t measure(Bits op, Rng &rng, bool prepare = false) {
        uint8_t sign = 0;
        int p;
        while ((p = lowest(op)) >= 0) {
            int r = row_of_pivot_[p];
            if (r < 0) {
                uint8_t outcome = prepare ? 0 : (uint8_t)(rng() & 1);
                insert(std::move(op), outcome ^ sign, p);
                return outcome;
            }
            xor_into(op, rows_[r]);
            sign ^= signs_[r];
        }
        return sign;
    }

    // Removes the stabilizers that anticommute with an operator of the other type.
    void disturb(const Bits &anti) {
        int best = -1;
        for (size_t r = 0; r < rows_.size(); r++) {
            if (alive_[r] && odd_overlap(rows_[r], anti) && (best < 0 || pivots_[r] > pivots_[best])) {
                best = (int)r;
            }
        }
        if (best < 0) {
            return;
        }
        for (size_t r = 0; r < rows_.size(); r++) {
            if ((int)r != best && alive_[r] && odd_overlap(rows_[r], anti)) {
                xor_into(rows_[r], rows_[best]);
                signs_[r] ^= signs_[best];
            }
        }
        alive_[best] = 0;
        row_of_pivot_[pivots_[best]] = -1;
    }

   private:
    int lowest(const Bits &b) const {
        for (int w = 0; w < words_; w++) {
            if (b[w]) {
                return w * 64 + __builtin_ctzll(b[w]);
            }
        }
        return -1;
    }
    static void xor_into(Bits &a, const Bits &b) {
        for (size_t w = 0; w < a.size(); w++) {
            a[w] ^= b[w];
        }
    }
    static bool odd_overlap(const Bits &a, const Bits &b) {
        int c = 0;
        for (size_t w = 0; w < a.size(); w++) {
            c += __builtin_popcountll(a[w] & b[w]);
        }
        return c & 1;
    }
    void insert(Bits b, uint8_t sign, int pivot) {
        row_of_pivot_[pivot] = (int)rows_.size();
        rows_.push_back(std::move(b));
        signs_.push_back(sign);
        pivots_.push_back(pivot);
        alive_.push_back(1);
    }

    int words_;
    std::vector<int> row_of_pivot_;
    std::vector<Bits> rows_;
    std::vector<uint8_t> signs_;
    std::vector<int> pivots_;
    std::vector<uint8_t> alive_;
};

}  // namespace

void verify_detectors(const SectorCircuit &circuit, const std::vector<Detector> &detectors, int trials, uint64_t seed) {
    const ShellSchedule &s = *circuit.schedule;
    int nq = s.code().num_qubits();
    Pauli tracked = detecting_type(circuit.sector);
    bool sector_z = circuit.sector == Sector::Z;
    for (int trial = 0; trial < trials; trial++) {
        Rng rng(mix_seed(seed, (uint64_t)trial));
        CssTableau tab(nq);
        std::vector<uint8_t> bits(circuit.meas.size(), 0);
        std::vector<uint8_t> prepared_now(nq, 0);
        for (int q : s.rounds.empty() ? std::vector<int>{} : s.rounds[0].init_plus) {
            prepared_now[q] = 1;
        }
        for (int q = 0; q < nq; q++) {
            if (s.initially_active[q] && (sector_z || !prepared_now[q])) {
                tab.measure(tab.make(&q, &q + 1), rng, true);
            }
        }
        for (int t = 0; t <= s.T; t++) {
            if (t < s.T) {
                const RoundDirective &rd = s.rounds[t];
                for (int q : rd.init_plus) {
                    CssTableau::Bits single = tab.make(&q, &q + 1);
                    tab.disturb(single);
                    if (sector_z) {
                        tab.measure(single, rng, true);
                    }
                }
                for (int q : rd.deactivated) {
                    tab.disturb(tab.make(&q, &q + 1));
                }
            }
            const SectorRound &r = circuit.rounds[t];
            int next = r.meas_begin;
            if (t < s.T) {
                for (int id : s.rounds[t].measured) {
                    const OperatorSpec &op = s.operators[id];
                    CssTableau::Bits b = tab.make(op.qubits.data(), op.qubits.data() + op.qubits.size());
                    if (op.type == tracked) {
                        bits[next++] = tab.measure(std::move(b), rng);
                    } else {
                        tab.disturb(b);
                    }
                }
            }
            for (; next < r.meas_end; next++) {
                bits[next] = tab.measure(tab.make(circuit.support_begin(next), circuit.support_end(next)), rng);
            }
        }
        for (const Detector &d : detectors) {
            uint8_t v = 0;
            for (int m : d.meas) {
                v ^= bits[m];
            }
            if (v) {
                std::ostringstream msg;
                msg << "detector " << d.id << " (" << to_string(d.kind) << ", round " << d.round << ", cell " << d.cell.x
                    << "," << d.cell.y << ") is not deterministic";
                throw SoundnessError(msg.str());
            }
        }
        uint8_t obs = 0;
        for (int q : circuit.observable) {
            obs ^= bits[circuit.final_readout(q)];
        }
        if (obs) {
            throw SoundnessError("logical observable is not deterministic");
        }
    }
}

FaultPropagator::FaultPropagator(const SectorCircuit &circuit, const std::vector<Detector> &detectors)
    : circuit_(circuit) {
    const ShellSchedule &s = *circuit.schedule;
    int nq = s.code().num_qubits();
    int nm = circuit.num_measurements();

    qubit_meas_offsets_.assign(nq + 1, 0);
    for (int m = 0; m < nm; m++) {
        for (const int *p = circuit.support_begin(m); p != circuit.support_end(m); ++p) {
            qubit_meas_offsets_[*p + 1]++;
        }
    }
    for (int q = 0; q < nq; q++) {
        qubit_meas_offsets_[q + 1] += qubit_meas_offsets_[q];
    }
    qubit_meas_.resize(qubit_meas_offsets_[nq]);
    std::vector<int> fill(qubit_meas_offsets_.begin(), qubit_meas_offsets_.end() - 1);
    for (int m = 0; m < nm; m++) {
        for (const int *p = circuit.support_begin(m); p != circuit.support_end(m); ++p) {
            qubit_meas_[fill[*p]++] = m;
        }
    }

    meas_det_offsets_.assign(nm + 1, 0);
    for (const Detector &d : detectors) {
        for (int m : d.meas) {
            meas_det_offsets_[m + 1]++;
        }
    }
    for (int m = 0; m < nm; m++) {
        meas_det_offsets_[m + 1] += meas_det_offsets_[m];
    }
    meas_det_.resize(meas_det_offsets_[nm]);
    fill.assign(meas_det_offsets_.begin(), meas_det_offsets_.end() - 1);
    for (const Detector &d : detectors) {
        for (int m : d.meas) {
            meas_det_[fill[m]++] = d.id;
        }
    }

    resets_.assign(nq, {});
    readouts_.assign(nq, {});
    for (int t = 0; t < circuit.T; t++) {
        for (int q : circuit.rounds[t].resets) {
            resets_[q].push_back(t);
        }
        for (int q : s.rounds[t].readout_x) {
            readouts_[q].push_back(t);
        }
    }
    on_observable_.assign(nq, 0);
    for (int q : circuit.observable) {
        on_observable_[q] ^= 1;
    }
}

std::vector<int> FaultPropagator::flipped_measurements(const Fault &fault) const {
    if (fault.kind == FaultKind::Measurement) {
        return {fault.index};
    }
    // A frame flip persists until the qubit is prepared again.
    int q = fault.index;
    int end = circuit_.T + 1;
    auto it = std::upper_bound(resets_[q].begin(), resets_[q].end(), fault.round);
    if (it != resets_[q].end()) {
        end = *it;
    }
    std::vector<int> out;
    for (int i = qubit_meas_offsets_[q]; i < qubit_meas_offsets_[q + 1]; i++) {
        int m = qubit_meas_[i];
        int r = circuit_.meas[m].round;
        if (r >= fault.round && r < end) {
            out.push_back(m);
        }
    }
    return out;
}

FaultEffect FaultPropagator::effect(const Fault &fault) const {
    FaultEffect e;
    std::vector<int> dets;
    for (int m : flipped_measurements(fault)) {
        for (int i = meas_det_offsets_[m]; i < meas_det_offsets_[m + 1]; i++) {
            dets.push_back(meas_det_[i]);
        }
    }
    e.detectors = sorted_xor(std::move(dets));
    if (fault.kind != FaultKind::Measurement) {
        int q = fault.index;
        auto it = std::upper_bound(resets_[q].begin(), resets_[q].end(), fault.round);
        if (it == resets_[q].end()) {
            e.obs = on_observable_[q];
        }
    }
    return e;
}

std::vector<Fault> FaultPropagator::all_faults() const {
    std::vector<Fault> faults;
    for (int t = 0; t < circuit_.T; t++) {
        const SectorRound &r = circuit_.rounds[t];
        for (int q : r.init_noisy) {
            faults.push_back({FaultKind::Init, t, q});
        }
        for (int q : r.data_qubits) {
            faults.push_back({FaultKind::Data, t, q});
        }
        for (int m = r.meas_begin; m < r.meas_end; m++) {
            if (circuit_.meas[m].noisy) {
                faults.push_back({FaultKind::Measurement, t, m});
            }
        }
    }
    return faults;
}

namespace {

double fault_probability(const Fault &f, const NoiseParams &noise) {
    switch (f.kind) {
        case FaultKind::Data:
            return noise.eps;
        case FaultKind::Measurement:
            return noise.q;
        case FaultKind::Init:
            return noise.init_error;
    }
    return 0;
}

// Position used to pick the nearer boundary for faults that flip a single detector.
std::pair<double, double> fault_position(const Fault &f, const SectorCircuit &c) {
    const CodeLayout &L = c.schedule->code();
    auto qubit_mid = [&](int q) {
        auto [a, b] = L.endpoints(q);
        return std::pair<double, double>{(a.x + b.x) / 2.0, (a.y + b.y) / 2.0};
    };
    if (f.kind != FaultKind::Measurement) {
        return qubit_mid(f.index);
    }
    double x = 0, y = 0;
    int n = 0;
    for (const int *p = c.support_begin(f.index); p != c.support_end(f.index); ++p, ++n) {
        auto [qx, qy] = qubit_mid(*p);
        x += qx;
        y += qy;
    }
    return n ? std::pair<double, double>{x / n, y / n} : std::pair<double, double>{0, 0};
}

}  // namespace

DetectorGraph build_graph(const SectorCircuit &circuit, const std::vector<Detector> &detectors,
                          const NoiseParams &noise, const GraphOptions &options) {
    int d = circuit.schedule->code().d();
    DetectorGraph g;
    g.num_detectors = (int)detectors.size();
    g.num_nodes = g.num_detectors + 2;
    g.boundary_nodes = {g.num_detectors, g.num_detectors + 1};
    g.mode = options.mode;
    g.unit_weights = options.mode == WeightMode::Uniform;

    FaultPropagator prop(circuit, detectors);
    std::map<std::pair<int, int>, int> index;
    for (const Fault &f : prop.all_faults()) {
        double p = fault_probability(f, noise);
        if (p <= 0) {
            continue;
        }
        g.total_faults++;
        FaultEffect e = prop.effect(f);
        int u, v;
        if (e.detectors.size() == 2) {
            u = e.detectors[0];
            v = e.detectors[1];
        } else if (e.detectors.size() == 1) {
            auto [x, y] = fault_position(f, circuit);
            // Sector X strings end on the north/south sides, sector Z strings on the west/east sides.
            bool first = circuit.sector == Sector::X ? y <= (d - 1) / 2.0 : x <= (d - 2) / 2.0;
            u = e.detectors[0];
            v = first ? g.boundary_nodes[0] : g.boundary_nodes[1];
        } else if (e.detectors.empty() && !e.obs) {
            g.benign_faults++;
            continue;
        } else {
            std::ostringstream msg;
            msg << describe(f, circuit) << " flips " << e.detectors.size() << " detectors"
                << (e.obs ? " and the observable" : "");
            throw SoundnessError(msg.str());
        }
        auto [it, fresh] = index.emplace(std::make_pair(u, v), (int)g.edges.size());
        if (fresh) {
            GraphEdge edge;
            edge.u = u;
            edge.v = v;
            edge.p = p;
            edge.obs = e.obs;
            edge.fault_count = 1;
            edge.fault = f;
            g.edges.push_back(edge);
            continue;
        }
        GraphEdge &edge = g.edges[it->second];
        if (edge.obs != e.obs) {
            throw SoundnessError("parallel faults disagree on the observable: " + describe(edge.fault, circuit) +
                                 " vs " + describe(f, circuit));
        }
        edge.p = edge.p * (1 - p) + p * (1 - edge.p);
        edge.fault_count++;
    }
    for (GraphEdge &e : g.edges) {
        if (options.mode == WeightMode::Uniform) {
            e.weight = 1;
        } else {
            double w = options.weight_scale * std::log((1 - e.p) / e.p);
            e.weight = (int32_t)std::max(0.0, std::round(w));
        }
    }
    g.finalize();
    return g;
}

void DetectorGraph::finalize() {
    adj_offsets.assign(num_nodes + 1, 0);
    for (const GraphEdge &e : edges) {
        adj_offsets[e.u + 1]++;
        adj_offsets[e.v + 1]++;
    }
    for (int i = 0; i < num_nodes; i++) {
        adj_offsets[i + 1] += adj_offsets[i];
    }
    adj.resize(adj_offsets[num_nodes]);
    std::vector<int> fill(adj_offsets.begin(), adj_offsets.end() - 1);
    for (int k = 0; k < (int)edges.size(); k++) {
        adj[fill[edges[k].u]++] = {edges[k].v, k};
        adj[fill[edges[k].v]++] = {edges[k].u, k};
    }
    unit_weights = true;
    for (const GraphEdge &e : edges) {
        unit_weights = unit_weights && e.weight == 1;
    }
}

std::string DetectorGraph::dump() const {
    std::ostringstream out;
    out.precision(17);
    for (const GraphEdge &e : edges) {
        out << e.u << ' ' << e.v << ' ' << e.weight << ' ' << e.p << ' ' << e.fault_count << '\n';
    }
    return out.str();
}

}  // namespace shellqec
