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

#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "shellqec/defects.h"
#include "shellqec/schedule.h"

using namespace shellqec;

namespace {

ShellSchedule make_schedule(int d, std::vector<CellCoord> cells, int T, int Q = 9, bool allow_short = false) {
    auto L = std::make_shared<const CodeLayout>(d);
    std::sort(cells.begin(), cells.end());
    ClusterDecomposition dc = decompose(DefectMap{d, cells, 0}, Q);
    return build_schedule(L, build_punctures(dc, *L), T, Q, {allow_short});
}

std::vector<int> events_of(const SectorCircuit &c, const std::vector<Detector> &dets, const std::vector<Fault> &faults) {
    FrameSimulator sim(c, NoiseParams{});
    return extract_events(sim.run_with_faults(faults), dets);
}

std::vector<int> sym_diff(const std::vector<int> &a, const std::vector<int> &b) {
    std::vector<int> out;
    std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

// A few schedules covering the detector rules: bulk only, static holes of two levels, walls, and a burst.
std::vector<ShellSchedule> assorted_schedules() {
    std::vector<ShellSchedule> out;
    out.push_back(make_schedule(7, {}, 7));
    out.push_back(make_schedule(15, {{7, 7}}, 6));
    out.push_back(make_schedule(15, {{7, 7}, {8, 8}}, 4, 9, true));
    out.push_back(make_schedule(15, {{0, 7}, {7, 14}}, 5));
    ShellSchedule base = make_schedule(15, {}, 12);
    out.push_back(edit_schedule_for_burst(base, {6, 6, 8, 8}, 3, 9));
    out.push_back(edit_schedule_for_burst(base, {5, 5, 8, 8}, 4, 12));
    return out;
}

}  // namespace

TEST(Detectors, DefectFreeCount) {
    for (int d : {5, 7}) {
        for (int T : {3, 6}) {
            ShellSchedule s = make_schedule(d, {}, T);
            for (Sector sector : {Sector::X, Sector::Z}) {
                SectorCircuit c = compile_sector(s, sector);
                // One detector per check per round, plus the closing comparison against the final readout.
                EXPECT_EQ((int)build_detectors(c).size(), d * (d - 1) * (T + 1));
            }
        }
    }
}

TEST(Detectors, OneShellDetectorPerPhaseBlock) {
    for (int T : {4, 6}) {
        ShellSchedule s = make_schedule(21, {{10, 10}}, T);
        int shell_detectors = 0;
        for (Sector sector : {Sector::X, Sector::Z}) {
            SectorCircuit c = compile_sector(s, sector);
            for (const Detector &det : build_detectors(c)) {
                shell_detectors += det.kind == DetectorKind::ShellParity;
            }
        }
        EXPECT_EQ(shell_detectors, (int)enumerate_shells(s).size());
        EXPECT_EQ(shell_detectors, T);
    }
}

TEST(Detectors, NoiselessRunsHaveNoEvents) {
    std::vector<ShellSchedule> schedules = assorted_schedules();
    for (uint64_t seed = 1; seed <= 12; seed++) {
        int d = 23 + 2 * (int)(seed % 4);
        auto L = std::make_shared<const CodeLayout>(d);
        ClusterDecomposition dc = decompose(sample_defects(d, 0.01, seed), 9);
        try {
            schedules.push_back(build_schedule(L, build_punctures(dc, *L), default_rounds(d, 9, std::max(dc.m, 0)), 9));
        } catch (const InoperableError &) {
        }
    }
    EXPECT_GT(schedules.size(), 10u);
    for (const ShellSchedule &s : schedules) {
        for (Sector sector : {Sector::X, Sector::Z}) {
            SectorCircuit c = compile_sector(s, sector);
            std::vector<Detector> dets = build_detectors(c, {false});
            EXPECT_TRUE(extract_events(run_noiseless_reference(s, sector), dets).empty());
        }
    }
}

TEST(Detectors, EveryFaultFlipsOneOrTwoDetectors) {
    for (const ShellSchedule &s : assorted_schedules()) {
        for (Sector sector : {Sector::X, Sector::Z}) {
            SectorCircuit c = compile_sector(s, sector);
            std::vector<Detector> dets = build_detectors(c);
            FaultPropagator prop(c, dets);
            for (const Fault &f : prop.all_faults()) {
                FaultEffect e = prop.effect(f);
                ASSERT_LE(e.detectors.size(), 2u) << describe(f, c);
                if (e.detectors.empty()) {
                    ASSERT_EQ(e.obs, 0) << describe(f, c);
                }
            }
            EXPECT_NO_THROW(build_graph(c, dets, NoiseParams::uniform(0.01)));
        }
    }
}

TEST(Detectors, PropagatorAgreesWithSimulation) {
    for (const ShellSchedule &s : assorted_schedules()) {
        for (Sector sector : {Sector::X, Sector::Z}) {
            SectorCircuit c = compile_sector(s, sector);
            std::vector<Detector> dets = build_detectors(c);
            FaultPropagator prop(c, dets);
            FrameSimulator sim(c, NoiseParams{});
            std::vector<Fault> faults = prop.all_faults();
            for (size_t i = 0; i < faults.size(); i += 7) {
                MeasurementRecord r = sim.run_with_faults({faults[i]});
                FaultEffect e = prop.effect(faults[i]);
                ASSERT_EQ(extract_events(r, dets), e.detectors) << describe(faults[i], c);
                ASSERT_EQ(r.observable_flip, e.obs) << describe(faults[i], c);
            }
        }
    }
}

TEST(Detectors, VerifierAcceptsBuiltSetsAndRejectsCorruption) {
    ShellSchedule s = make_schedule(15, {{7, 7}}, 6);
    for (Sector sector : {Sector::X, Sector::Z}) {
        SectorCircuit c = compile_sector(s, sector);
        std::vector<Detector> dets = build_detectors(c);
        EXPECT_NO_THROW(verify_detectors(c, dets, 3, 11));
        std::vector<Detector> broken = dets;
        // Shell parities combine individually random outcomes, so dropping one constituent breaks them.
        auto it = std::find_if(broken.begin(), broken.end(), [](const Detector &det) {
            return det.kind == DetectorKind::ShellParity && det.meas.size() > 2;
        });
        ASSERT_NE(it, broken.end());
        it->meas.erase(it->meas.begin());
        EXPECT_THROW(verify_detectors(c, broken, 3, 11), SoundnessError);
    }
}

TEST(Detectors, BulkDataFlipJoinsTheTwoAdjacentChecks) {
    ShellSchedule s = make_schedule(7, {}, 6);
    const CodeLayout &L = s.code();
    int q = L.v_edge(3, 3);
    int t = 3;
    for (Sector sector : {Sector::X, Sector::Z}) {
        SectorCircuit c = compile_sector(s, sector);
        std::vector<Detector> dets = build_detectors(c);
        FaultPropagator prop(c, dets);
        FaultEffect e = prop.effect({FaultKind::Data, t, q});
        ASSERT_EQ(e.detectors.size(), 2u);
        std::set<int> ops;
        for (int id : e.detectors) {
            const Detector &det = dets[id];
            EXPECT_EQ(det.kind, DetectorKind::BulkComparison);
            bool has_round_t = false;
            for (int m : det.meas) {
                has_round_t |= c.meas[m].round == t;
                ops.insert(c.meas[m].op);
            }
            EXPECT_TRUE(has_round_t);
            EXPECT_EQ(det.round, t);
        }
        EXPECT_EQ(ops.size(), 2u);
        EXPECT_EQ(events_of(c, dets, {{FaultKind::Data, t, q}}), e.detectors);
    }
}

TEST(Detectors, MeasurementFlipJoinsNeighbouringComparisons) {
    ShellSchedule s = make_schedule(7, {}, 6);
    const CodeLayout &L = s.code();
    SectorCircuit c = compile_sector(s, Sector::X);
    std::vector<Detector> dets = build_detectors(c);
    FaultPropagator prop(c, dets);
    int t = 2;
    int op = -1;
    for (const OperatorSpec &spec : s.operators) {
        if (spec.kind == OpKind::Plaquette && spec.site == L.plaquette_at(3, 2)) {
            op = spec.id;
        }
    }
    ASSERT_GE(op, 0);
    int m = c.find(t, op);
    FaultEffect e = prop.effect({FaultKind::Measurement, t, m});
    ASSERT_EQ(e.detectors.size(), 2u);
    std::set<int> rounds;
    for (int id : e.detectors) {
        for (int k : dets[id].meas) {
            EXPECT_EQ(c.meas[k].op, op);
            rounds.insert(c.meas[k].round);
        }
    }
    EXPECT_EQ(rounds, (std::set<int>{t - 1, t, t + 1}));
}

TEST(Detectors, ReadoutFlipTouchesTheShellDetector) {
    ShellSchedule s = make_schedule(21, {{10, 10}}, 4);
    SectorCircuit c = compile_sector(s, Sector::Z);
    std::vector<Detector> dets = build_detectors(c);
    FaultPropagator prop(c, dets);
    int readouts = 0;
    for (int m = 0; m < c.num_measurements(); m++) {
        if (c.meas[m].round >= c.T || s.operators[c.meas[m].op].kind != OpKind::Readout) {
            continue;
        }
        readouts++;
        FaultEffect e = prop.effect({FaultKind::Measurement, c.meas[m].round, m});
        bool shell = std::any_of(e.detectors.begin(), e.detectors.end(),
                                 [&](int id) { return dets[id].kind == DetectorKind::ShellParity; });
        EXPECT_TRUE(shell);
    }
    EXPECT_GT(readouts, 0);
}

TEST(Detectors, BoundaryFlipGivesOneEvent) {
    ShellSchedule s = make_schedule(7, {}, 4);
    const CodeLayout &L = s.code();
    SectorCircuit x = compile_sector(s, Sector::X);
    SectorCircuit z = compile_sector(s, Sector::Z);
    std::vector<Detector> dx = build_detectors(x), dz = build_detectors(z);
    EXPECT_EQ(events_of(x, dx, {{FaultKind::Data, 1, L.h_edge(3, 0)}}).size(), 1u);
    EXPECT_EQ(events_of(z, dz, {{FaultKind::Data, 1, L.h_edge(0, 3)}}).size(), 1u);
    EXPECT_EQ(events_of(x, dx, {{FaultKind::Data, 1, L.h_edge(3, 3)}}).size(), 2u);
}

TEST(Detectors, EventsAreLinearInFaults) {
    std::mt19937_64 rng(5);
    for (const ShellSchedule &s : assorted_schedules()) {
        for (Sector sector : {Sector::X, Sector::Z}) {
            SectorCircuit c = compile_sector(s, sector);
            std::vector<Detector> dets = build_detectors(c);
            FaultPropagator prop(c, dets);
            std::vector<Fault> all = prop.all_faults();
            for (int trial = 0; trial < 20; trial++) {
                std::vector<Fault> picked;
                std::vector<int> expected;
                for (int k = 0; k < 6; k++) {
                    Fault f = all[rng() % all.size()];
                    picked.push_back(f);
                    expected = sym_diff(expected, events_of(c, dets, {f}));
                }
                // Repeated picks cancel in both the record and the expectation.
                EXPECT_EQ(events_of(c, dets, picked), expected);
            }
        }
    }
}

TEST(Detectors, ShellDegreeWithinTerminationBound) {
    std::vector<ShellSchedule> schedules;
    schedules.push_back(make_schedule(21, {{10, 10}}, 6));
    schedules.push_back(make_schedule(31, {{15, 15}, {16, 16}}, 18));
    schedules.push_back(make_schedule(31, {{13, 13}, {17, 17}}, 18));
    for (const ShellSchedule &s : schedules) {
        for (Sector sector : {Sector::X, Sector::Z}) {
            SectorCircuit c = compile_sector(s, sector);
            std::vector<Detector> dets = build_detectors(c, {false});
            DetectorGraph g = build_graph(c, dets, NoiseParams::uniform(0.01));
            std::map<int, std::set<int>> neighbours;
            for (const GraphEdge &e : g.edges) {
                neighbours[e.u].insert(e.v);
                neighbours[e.v].insert(e.u);
            }
            for (const Detector &det : dets) {
                if (det.kind != DetectorKind::ShellParity) {
                    continue;
                }
                int64_t qj = int_pow(s.Q, s.punctures[det.puncture].level);
                EXPECT_LE((int64_t)neighbours[det.id].size(), 4 * qj * qj + 20 * qj + 16);
            }
        }
    }
}

TEST(Detectors, GraphMergesParallelFaultsAndDumps) {
    ShellSchedule s = make_schedule(5, {}, 3);
    SectorCircuit c = compile_sector(s, Sector::X);
    std::vector<Detector> dets = build_detectors(c);
    DetectorGraph g = build_graph(c, dets, NoiseParams::uniform(0.01));
    EXPECT_TRUE(g.unit_weights);
    EXPECT_EQ(g.num_nodes, g.num_detectors + 2);
    int64_t mapped = 0;
    std::set<std::pair<int, int>> seen;
    for (const GraphEdge &e : g.edges) {
        mapped += e.fault_count;
        EXPECT_TRUE(seen.insert({std::min(e.u, e.v), std::max(e.u, e.v)}).second);
        EXPECT_EQ(e.weight, 1);
        // Two parallel faults of probability p merge to 2p(1-p).
        if (e.fault_count == 2) {
            EXPECT_NEAR(e.p, 2 * 0.01 * 0.99, 1e-15);
        }
    }
    EXPECT_EQ(mapped + g.benign_faults, g.total_faults);

    std::istringstream in(g.dump());
    std::string line;
    size_t lines = 0;
    while (std::getline(in, line)) {
        std::istringstream fields(line);
        int u, v, w, n;
        double p;
        ASSERT_TRUE(fields >> u >> v >> w >> p >> n);
        lines++;
    }
    EXPECT_EQ(lines, g.edges.size());
}

TEST(Detectors, LikelihoodWeightsFollowProbabilities) {
    ShellSchedule s = make_schedule(5, {}, 3);
    SectorCircuit c = compile_sector(s, Sector::X);
    std::vector<Detector> dets = build_detectors(c);
    GraphOptions opts;
    opts.mode = WeightMode::Likelihood;
    DetectorGraph g = build_graph(c, dets, NoiseParams::uniform(0.01), opts);
    for (const GraphEdge &e : g.edges) {
        EXPECT_EQ(e.weight, (int32_t)std::lround(100.0 * std::log((1 - e.p) / e.p)));
    }
    EXPECT_FALSE(g.unit_weights);
}
