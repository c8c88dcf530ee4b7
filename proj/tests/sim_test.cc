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

#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "shellqec/defects.h"
#include "shellqec/schedule.h"

using namespace shellqec;

namespace {

ShellSchedule plain_schedule(int d, int T) {
    return build_schedule(std::make_shared<const CodeLayout>(d), {}, T, 9);
}

ShellSchedule punctured_schedule(int d, CellCoord defect, int T) {
    auto L = std::make_shared<const CodeLayout>(d);
    ClusterDecomposition dc = decompose(DefectMap{d, {defect}, 0}, 9);
    return build_schedule(L, build_punctures(dc, *L), T, 9);
}

double mean(const std::vector<double> &v) {
    double s = 0;
    for (double x : v) {
        s += x;
    }
    return s / (double)v.size();
}

double stddev_of_mean(const std::vector<double> &v) {
    double m = mean(v), s = 0;
    for (double x : v) {
        s += (x - m) * (x - m);
    }
    return std::sqrt(s / (double)(v.size() - 1) / (double)v.size());
}

}  // namespace

TEST(Sim, NoiselessRunsMatchTheReference) {
    ShellSchedule s = punctured_schedule(11, {5, 5}, 6);
    for (Sector sector : {Sector::X, Sector::Z}) {
        MeasurementRecord ref = run_noiseless_reference(s, sector);
        for (uint64_t seed : {1, 2, 99}) {
            EXPECT_EQ(run_shot(s, NoiseParams{}, sector, seed).bits, ref.bits);
        }
        EXPECT_EQ(run_noiseless_reference(s, sector).bits, ref.bits);
        EXPECT_EQ(ref.observable_flip, 0);
    }
}

TEST(Sim, DefectFreeNoiselessBitsAreZero) {
    ShellSchedule s = plain_schedule(7, 5);
    for (Sector sector : {Sector::X, Sector::Z}) {
        for (uint8_t b : run_noiseless_reference(s, sector).bits) {
            ASSERT_EQ(b, 0);
        }
    }
}

TEST(Sim, SingleBulkFlipChangesItsTwoChecksFromThatRoundOn) {
    ShellSchedule s = plain_schedule(7, 6);
    const CodeLayout &L = s.code();
    int q = L.h_edge(3, 3);
    int t0 = 2;
    for (Sector sector : {Sector::X, Sector::Z}) {
        SectorCircuit c = compile_sector(s, sector);
        FrameSimulator sim(c, NoiseParams{});
        MeasurementRecord ref = sim.run(0);
        MeasurementRecord hit = sim.run_with_faults({{FaultKind::Data, t0, q}});
        std::set<int> changed_ops;
        for (int m = 0; m < c.num_measurements(); m++) {
            if (ref.bits[m] == hit.bits[m]) {
                continue;
            }
            const SectorMeasurement &sm = c.meas[m];
            ASSERT_GE(sm.round, t0);
            if (sm.round < c.T) {
                changed_ops.insert(sm.op);
            } else {
                EXPECT_EQ(sm.qubit, q);
            }
        }
        EXPECT_EQ(changed_ops.size(), 2u);
        for (int op : changed_ops) {
            for (int t = t0; t < c.T; t++) {
                int m = c.find(t, op);
                ASSERT_GE(m, 0);
                EXPECT_NE(ref.bits[m], hit.bits[m]);
            }
            const std::vector<int> &qs = s.operators[op].qubits;
            EXPECT_TRUE(std::find(qs.begin(), qs.end(), q) != qs.end());
        }
    }
}

TEST(Sim, FlipFractionMatchesAnalyticExpectation) {
    // Every check of weight w at round t sees w qubits that each flipped an odd number of times
    // in t + 1 rounds, then one outcome flip; final readouts see T rounds of flips.
    int d = 11, T = 11;
    double eps = 0.01;
    ShellSchedule s = plain_schedule(d, T);
    const CodeLayout &L = s.code();
    for (Sector sector : {Sector::X, Sector::Z}) {
        const std::vector<Check> &checks = sector == Sector::X ? L.plaquettes() : L.stars();
        double expected = 0;
        int64_t count = 0;
        for (int t = 0; t < T; t++) {
            for (const Check &c : checks) {
                double bias = std::pow(1 - 2 * eps, (double)c.qubits.size() * (t + 1)) * (1 - 2 * eps);
                expected += (1 - bias) / 2;
                count++;
            }
        }
        int nq = d * d + (d - 1) * (d - 1);
        expected += nq * (1 - std::pow(1 - 2 * eps, T)) / 2;
        count += nq;
        expected /= (double)count;

        SectorCircuit c = compile_sector(s, sector);
        ASSERT_EQ(c.num_measurements(), count);
        FrameSimulator sim(c, NoiseParams::uniform(eps));
        std::vector<double> fractions;
        for (uint64_t shot = 0; shot < 1000; shot++) {
            MeasurementRecord r = sim.run(1000 + shot);
            int ones = 0;
            for (uint8_t b : r.bits) {
                ones += b;
            }
            fractions.push_back((double)ones / (double)count);
        }
        EXPECT_LT(std::abs(mean(fractions) - expected), 5 * stddev_of_mean(fractions));
    }
}

TEST(Sim, OutcomeFlipsAreBernoulli) {
    ShellSchedule s = plain_schedule(9, 9);
    SectorCircuit c = compile_sector(s, Sector::X);
    double q = 0.1;
    FrameSimulator sim(c, NoiseParams{0, q, 0, {}});
    std::vector<double> fractions;
    for (uint64_t shot = 0; shot < 300; shot++) {
        MeasurementRecord r = sim.run(shot);
        int ones = 0, noisy = 0;
        for (int m = 0; m < c.num_measurements(); m++) {
            if (c.meas[m].noisy) {
                ones += r.bits[m];
                noisy++;
            } else {
                ASSERT_EQ(r.bits[m], 0);
            }
        }
        fractions.push_back((double)ones / noisy);
    }
    EXPECT_LT(std::abs(mean(fractions) - q), 5 * stddev_of_mean(fractions));
}

TEST(Sim, RunsAreDeterministicPerSeed) {
    ShellSchedule s = punctured_schedule(11, {5, 5}, 6);
    NoiseParams noise = NoiseParams::uniform(0.05);
    for (Sector sector : {Sector::X, Sector::Z}) {
        MeasurementRecord a = run_shot(s, noise, sector, 42);
        MeasurementRecord b = run_shot(s, noise, sector, 42);
        MeasurementRecord c = run_shot(s, noise, sector, 43);
        EXPECT_EQ(a.bits, b.bits);
        EXPECT_EQ(a.observable_flip, b.observable_flip);
        EXPECT_NE(a.bits, c.bits);
    }
}

TEST(Sim, XSectorIgnoresPreparationNoise) {
    // Preparation errors only exist in the sector that tracks X flips.
    ShellSchedule s = punctured_schedule(11, {5, 5}, 6);
    NoiseParams base = NoiseParams::uniform(0.03);
    NoiseParams heavy = base;
    heavy.init_error = 0.4;
    for (uint64_t seed = 0; seed < 20; seed++) {
        EXPECT_EQ(run_shot(s, base, Sector::X, seed).bits, run_shot(s, heavy, Sector::X, seed).bits);
    }
    int differ = 0;
    for (uint64_t seed = 0; seed < 20; seed++) {
        differ += run_shot(s, base, Sector::Z, seed).bits != run_shot(s, heavy, Sector::Z, seed).bits;
    }
    EXPECT_GT(differ, 0);
}

TEST(Sim, TogglingReferenceAlternates) {
    ShellSchedule s = plain_schedule(5, 6);
    SectorCircuit c = compile_sector(s, Sector::X);
    MeasurementRecord r = run_noiseless_reference(s, Sector::X, true);
    for (int m = 0; m < c.num_measurements(); m++) {
        uint8_t want = c.meas[m].toggles ? (uint8_t)(c.meas[m].round & 1) : 0;
        EXPECT_EQ(r.bits[m], want);
    }
}

TEST(Sim, BurstFlipsStayInsideRegionAndWindow) {
    ShellSchedule s = plain_schedule(15, 12);
    NoiseParams noise;
    noise.bursts.push_back({{5, 5, 8, 8}, 3, 7, 0.5});
    SimOptions opts;
    opts.diagnostics = true;
    SectorCircuit c = compile_sector(s, Sector::X);
    FrameSimulator sim(c, noise, opts);
    int seen = 0;
    for (uint64_t seed = 0; seed < 20; seed++) {
        MeasurementRecord r = sim.run(seed);
        for (const Fault &f : r.faults) {
            ASSERT_EQ(f.kind, FaultKind::Data);
            EXPECT_GE(f.round, 3);
            EXPECT_LT(f.round, 7);
            EXPECT_TRUE((CellRect{5, 5, 8, 8}.contains(s.code().qubit(f.index).cell)));
            seen++;
        }
    }
    EXPECT_GT(seen, 0);
}

TEST(Sim, InjectedFaultsReproduceDiagnosticRun) {
    ShellSchedule s = punctured_schedule(11, {5, 5}, 6);
    SimOptions opts;
    opts.diagnostics = true;
    for (Sector sector : {Sector::X, Sector::Z}) {
        SectorCircuit c = compile_sector(s, sector);
        FrameSimulator sim(c, NoiseParams::uniform(0.02), opts);
        FrameSimulator replay(c, NoiseParams{});
        for (uint64_t seed = 0; seed < 10; seed++) {
            MeasurementRecord r = sim.run(seed);
            MeasurementRecord again = replay.run_with_faults(r.faults);
            EXPECT_EQ(again.bits, r.bits);
            EXPECT_EQ(again.observable_flip, r.observable_flip);
        }
    }
}

TEST(Sim, DumpHasOneLinePerRound) {
    ShellSchedule s = plain_schedule(5, 3);
    SectorCircuit c = compile_sector(s, Sector::X);
    std::string text = dump_record(run_noiseless_reference(s, Sector::X, true), c);
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 4);
    // Round 1 toggles every one of its 20 plaquettes: five hex digits of ones.
    std::string second = text.substr(text.find('\n') + 1, 5);
    EXPECT_EQ(second, "fffff");
}

TEST(Sim, NoiseValidation) {
    EXPECT_THROW((NoiseParams{1.5, 0, 0, {}}.validate()), std::invalid_argument);
    EXPECT_NO_THROW(NoiseParams::uniform(0.2).validate());
}
