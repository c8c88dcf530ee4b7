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

#include "shellqec/sim.h"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace shellqec {

void NoiseParams::validate() const {
    auto check = [](double p, const char *name) {
        if (!(p >= 0 && p <= 1)) {
            throw std::invalid_argument(std::string(name) + " must lie in [0, 1]");
        }
    };
    check(eps, "eps");
    check(q, "q");
    check(init_error, "init_error");
    for (const Burst &b : bursts) {
        check(b.eps, "burst eps");
    }
}

SectorCircuit compile_sector(const ShellSchedule &schedule, Sector sector) {
    const CodeLayout &L = schedule.code();
    int nq = L.num_qubits();
    Pauli tracked = detecting_type(sector);

    SectorCircuit c;
    c.schedule = &schedule;
    c.sector = sector;
    c.T = schedule.T;
    c.rounds.resize(schedule.T + 1);
    c.support_offsets.push_back(0);

    std::vector<uint8_t> active = schedule.initially_active;
    std::vector<uint8_t> fresh(nq, 0);
    for (int t = 0; t < schedule.T; t++) {
        const RoundDirective &rd = schedule.rounds[t];
        SectorRound &sr = c.rounds[t];
        for (int q : rd.init_plus) {
            active[q] = 1;
            fresh[q] = 1;
            sr.resets.push_back(q);
            if (sector == Sector::Z && t > 0) {
                sr.init_noisy.push_back(q);
            }
        }
        for (int q : rd.deactivated) {
            active[q] = 0;
        }
        for (int q = 0; q < nq; q++) {
            if (active[q] && !fresh[q]) {
                sr.data_qubits.push_back(q);
            }
        }
        for (int q : rd.init_plus) {
            fresh[q] = 0;
        }
        sr.meas_begin = (int)c.meas.size();
        for (int id : rd.measured) {
            const OperatorSpec &op = schedule.operators[id];
            if (op.type != tracked) {
                continue;
            }
            SectorMeasurement m;
            m.round = t;
            m.op = id;
            m.qubit = op.kind == OpKind::Readout ? op.site : -1;
            m.noisy = true;
            m.toggles = op.kind != OpKind::Readout;
            c.meas.push_back(m);
            c.support.insert(c.support.end(), op.qubits.begin(), op.qubits.end());
            c.support_offsets.push_back((int)c.support.size());
        }
        sr.meas_end = (int)c.meas.size();
        for (int q : rd.readout_x) {
            active[q] = 0;
            sr.dropped.push_back(q);
        }
    }

    SectorRound &last = c.rounds[schedule.T];
    last.meas_begin = (int)c.meas.size();
    c.final_of_qubit_.assign(nq, -1);
    for (int q = 0; q < nq; q++) {
        if (!active[q]) {
            continue;
        }
        c.final_of_qubit_[q] = (int)c.meas.size();
        c.meas.push_back({schedule.T, -1, q, false, false});
        c.support.push_back(q);
        c.support_offsets.push_back((int)c.support.size());
    }
    last.meas_end = (int)c.meas.size();
    c.active_at_end = active;

    c.observable = logical_representative(L, observable_type(sector), schedule.forbidden_cells()).qubits;
    for (int q : c.observable) {
        if (!active[q]) {
            throw std::logic_error("logical string uses a qubit that is not read out at the end");
        }
    }
    return c;
}

int SectorCircuit::find(int t, int op) const {
    if (t < 0 || t >= (int)rounds.size()) {
        return -1;
    }
    const SectorRound &r = rounds[t];
    auto first = meas.begin() + r.meas_begin;
    auto last = meas.begin() + r.meas_end;
    auto it = std::lower_bound(first, last, op, [](const SectorMeasurement &m, int v) { return m.op < v; });
    if (it != last && it->op == op) {
        return (int)(it - meas.begin());
    }
    return -1;
}

int SectorCircuit::final_readout(int q) const { return final_of_qubit_[q]; }

std::string describe(const Fault &fault, const SectorCircuit &circuit) {
    std::ostringstream out;
    switch (fault.kind) {
        case FaultKind::Data:
            out << "data flip on qubit " << fault.index << " at round " << fault.round;
            break;
        case FaultKind::Init:
            out << "preparation error on qubit " << fault.index << " at round " << fault.round;
            break;
        case FaultKind::Measurement: {
            const SectorMeasurement &m = circuit.meas[fault.index];
            out << "outcome flip of measurement " << fault.index << " (operator " << m.op << ") at round " << m.round;
            break;
        }
    }
    return out.str();
}

namespace {

// Calls fn(i) for each index in [0, n) selected independently with probability p.
template <typename Fn>
void for_each_hit(Rng &rng, double p, size_t n, Fn &&fn) {
    if (p <= 0 || n == 0) {
        return;
    }
    if (p >= 1) {
        for (size_t i = 0; i < n; i++) {
            fn(i);
        }
        return;
    }
    double log_q = std::log1p(-p);
    size_t i = 0;
    while (true) {
        double u = 1.0 - (double)(rng() >> 11) * 0x1.0p-53;  // (0, 1]
        double gap = std::floor(std::log(u) / log_q);
        if (gap >= (double)(n - i)) {
            return;
        }
        i += (size_t)gap;
        fn(i);
        i++;
        if (i >= n) {
            return;
        }
    }
}

}  // namespace

FrameSimulator::FrameSimulator(const SectorCircuit &circuit, NoiseParams noise, SimOptions options)
    : circuit_(circuit), noise_(std::move(noise)), options_(std::move(options)) {
    noise_.validate();
    const CodeLayout &L = circuit_.schedule->code();
    for (const Burst &b : noise_.bursts) {
        std::vector<uint8_t> mask(L.num_qubits(), 0);
        for (int q = 0; q < L.num_qubits(); q++) {
            mask[q] = b.region.contains(L.qubit(q).cell);
        }
        burst_mask_.push_back(std::move(mask));
    }
}

MeasurementRecord FrameSimulator::run(uint64_t seed) { return simulate(seed, nullptr); }

MeasurementRecord FrameSimulator::run_with_faults(const std::vector<Fault> &faults) { return simulate(0, &faults); }

MeasurementRecord FrameSimulator::simulate(uint64_t seed, const std::vector<Fault> *faults) {
    const SectorCircuit &c = circuit_;
    int nq = c.schedule->code().num_qubits();
    std::vector<uint8_t> frame(nq, 0);
    MeasurementRecord rec;
    rec.sector = c.sector;
    rec.bits.assign(c.meas.size(), 0);
    bool noisy = faults == nullptr;
    bool diag = options_.diagnostics || faults != nullptr;

    std::vector<int> stuck_onset(c.schedule->operators.size(), -1);
    std::vector<uint8_t> stuck_value(c.schedule->operators.size(), 0);
    for (const StuckDevice &s : options_.stuck) {
        stuck_onset.at(s.op) = s.onset;
    }

    std::vector<int> burst_qubits;
    for (int t = 0; t <= c.T; t++) {
        const SectorRound &r = c.rounds[t];
        Rng rng(mix_seed(seed, (uint64_t)t));
        for (int q : r.resets) {
            frame[q] = 0;
        }
        if (noisy) {
            for_each_hit(rng, noise_.init_error, r.init_noisy.size(), [&](size_t i) {
                int q = r.init_noisy[i];
                frame[q] ^= 1;
                if (diag) {
                    rec.faults.push_back({FaultKind::Init, t, q});
                }
            });
            // Qubits inside an active burst use the burst rate instead of the base rate.
            int active_burst = -1;
            for (size_t b = 0; b < noise_.bursts.size(); b++) {
                if (t >= noise_.bursts[b].t_start && t < noise_.bursts[b].t_end) {
                    active_burst = (int)b;
                    break;
                }
            }
            if (active_burst < 0) {
                for_each_hit(rng, noise_.eps, r.data_qubits.size(), [&](size_t i) {
                    int q = r.data_qubits[i];
                    frame[q] ^= 1;
                    if (diag) {
                        rec.faults.push_back({FaultKind::Data, t, q});
                    }
                });
            } else {
                const std::vector<uint8_t> &mask = burst_mask_[active_burst];
                double pb = noise_.bursts[active_burst].eps;
                // Draw the two populations in a fixed order so results depend only on the seed.
                burst_qubits.clear();
                std::vector<int> normal;
                normal.reserve(r.data_qubits.size());
                for (int q : r.data_qubits) {
                    (mask[q] ? burst_qubits : normal).push_back(q);
                }
                auto flip = [&](int q) {
                    frame[q] ^= 1;
                    if (diag) {
                        rec.faults.push_back({FaultKind::Data, t, q});
                    }
                };
                for_each_hit(rng, noise_.eps, normal.size(), [&](size_t i) { flip(normal[i]); });
                for_each_hit(rng, pb, burst_qubits.size(), [&](size_t i) { flip(burst_qubits[i]); });
            }
        } else {
            for (const Fault &f : *faults) {
                if (f.round == t && f.kind != FaultKind::Measurement) {
                    frame[f.index] ^= 1;
                }
            }
        }

        for (int m = r.meas_begin; m < r.meas_end; m++) {
            uint8_t bit = 0;
            for (const int *p = c.support_begin(m); p != c.support_end(m); ++p) {
                bit ^= frame[*p];
            }
            rec.bits[m] = bit;
        }
        if (noisy) {
            for_each_hit(rng, noise_.q, (size_t)(r.meas_end - r.meas_begin), [&](size_t i) {
                int m = r.meas_begin + (int)i;
                if (c.meas[m].noisy) {
                    rec.bits[m] ^= 1;
                    if (diag) {
                        rec.faults.push_back({FaultKind::Measurement, t, m});
                    }
                }
            });
        } else {
            for (const Fault &f : *faults) {
                if (f.kind == FaultKind::Measurement && c.meas[f.index].round == t) {
                    rec.bits[f.index] ^= 1;
                }
            }
        }
        for (int m = r.meas_begin; m < r.meas_end; m++) {
            const SectorMeasurement &sm = c.meas[m];
            if (options_.toggling && sm.toggles) {
                rec.bits[m] ^= (uint8_t)(t & 1);
            }
            if (sm.op >= 0 && stuck_onset[sm.op] >= 0) {
                if (t >= stuck_onset[sm.op]) {
                    rec.bits[m] = stuck_value[sm.op];
                } else {
                    stuck_value[sm.op] = rec.bits[m];
                }
            }
        }
    }
    for (int q : c.observable) {
        rec.observable_flip ^= frame[q];
    }
    if (diag) {
        rec.frame = std::move(frame);
    }
    if (faults != nullptr) {
        rec.faults = *faults;
    }
    return rec;
}

MeasurementRecord run_shot(
    const ShellSchedule &schedule, const NoiseParams &noise, Sector sector, uint64_t seed, const SimOptions &options) {
    SectorCircuit circuit = compile_sector(schedule, sector);
    FrameSimulator sim(circuit, noise, options);
    return sim.run(seed);
}

MeasurementRecord run_noiseless_reference(const ShellSchedule &schedule, Sector sector, bool toggling) {
    SectorCircuit circuit = compile_sector(schedule, sector);
    SimOptions options;
    options.toggling = toggling;
    FrameSimulator sim(circuit, NoiseParams{}, options);
    return sim.run(0);
}

std::string dump_record(const MeasurementRecord &record, const SectorCircuit &circuit) {
    static const char *digits = "0123456789abcdef";
    std::string out;
    for (const SectorRound &r : circuit.rounds) {
        int n = r.meas_end - r.meas_begin;
        for (int i = 0; i < n; i += 4) {
            int nibble = 0;
            for (int k = 0; k < 4; k++) {
                nibble <<= 1;
                if (i + k < n) {
                    nibble |= record.bits[r.meas_begin + i + k];
                }
            }
            out.push_back(digits[nibble]);
        }
        out.push_back('\n');
    }
    return out;
}

}  // namespace shellqec
