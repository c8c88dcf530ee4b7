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

#include "shellqec/bounds.h"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <set>

#include "json.hpp"
#include "shellqec/defects.h"

using namespace shellqec;

namespace {

// Natural-log evaluation of the rho formula, a different route from the library's base-10 one.
long double ref_log10_rho(long double Q) {
    long double g = Q - 15;
    long double ln_rho = std::log(10.0L) + (2 * Q / g) * std::log(40.0L) + (60 * Q / (g * g)) * std::log(Q);
    return ln_rho / std::log(10.0L);
}

void expect_rel(double got, long double want, double tol = 1e-6) {
    EXPECT_LE(std::fabs((long double)got - want), tol * std::fabs(want)) << got << " vs " << (double)want;
}

std::set<std::pair<int, int>> oracle_good_points(const ClusterDecomposition &dc, int d, int Q) {
    std::set<std::pair<int, int>> good;
    for (int y = 0; y < d; y++) {
        for (int x = 0; x < d; x++) {
            bool ok = true;
            for (const Cluster &c : dc.clusters) {
                int64_t need = 2 * (int64_t)std::llround(std::pow((double)Q, c.level)) + 2;
                for (int v = c.bbox.y0 - 1; v <= c.bbox.y1 + 1 && ok; v++) {
                    for (int u = c.bbox.x0 - 1; u <= c.bbox.x1 + 1 && ok; u++) {
                        if (u < 0 || v < 0 || u >= d || v >= d) {
                            continue;
                        }
                        if (std::max(std::abs(u - x), std::abs(v - y)) < need) {
                            ok = false;
                        }
                    }
                }
            }
            if (ok) {
                good.insert({x, y});
            }
        }
    }
    return good;
}

}  // namespace

TEST(Bounds, TerminationBound) {
    for (int Q : {2, 9, 16, 33}) {
        TerminationBound b = termination_bound(0, Q);
        EXPECT_EQ(b.exact, 40);
        EXPECT_EQ(b.rounded, 40);
    }
    TerminationBound b = termination_bound(1, 9);
    EXPECT_EQ(b.exact, 520);
    EXPECT_EQ(b.rounded, 3240);
    for (int Q : {9, 16, 33}) {
        for (int j = 0; j <= 6; j++) {
            TerminationBound t = termination_bound(j, Q);
            EXPECT_LE(t.exact, t.rounded);
        }
    }
    EXPECT_THROW(termination_bound(-1, 9), std::invalid_argument);
}

TEST(Bounds, WalkBounds) {
    WalkBound w0 = walk_bounds(0, 10, 16);
    EXPECT_DOUBLE_EQ(w0.encounters, 20);
    EXPECT_DOUBLE_EQ(w0.augmented_length, 150);
    EXPECT_DOUBLE_EQ(walk_bounds(1, 10, 16).encounters, 18.75);
    WalkBound z = walk_bounds(2, 0, 16);
    EXPECT_EQ(z.encounters, 0);
    EXPECT_EQ(z.augmented_length, 0);
}

TEST(Bounds, ProofConstantsAtQ16) {
    ProofConstants pc = proof_constants(16);
    expect_rel(pc.eta, 1.0L - std::log(15.0L) / std::log(16.0L));
    EXPECT_NEAR(pc.eta, 0.02328, 5e-6);
    expect_rel(pc.log10_rho, ref_log10_rho(16));
    EXPECT_NEAR(pc.log10_rho, 1208.22, 0.005);
    EXPECT_NEAR(pc.log10_eps0, -2416.44, 0.01);
    EXPECT_DOUBLE_EQ(pc.log10_eps0, -2 * pc.log10_rho);
    EXPECT_EQ(pc.c, 1.2);
    for (int Q : {17, 20, 33, 100}) {
        expect_rel(log10_rho(Q), ref_log10_rho(Q));
    }
    EXPECT_THROW(proof_constants(15), std::invalid_argument);
}

TEST(Bounds, F0IsExactRational) {
    Rational f = f0_rational(9);
    EXPECT_EQ(f.num, 1u);
    EXPECT_EQ(f.den, 531441u);
    EXPECT_EQ(f0_rational(16).den, 48ull * 48 * 48 * 48);
}

TEST(Bounds, MinWalkLength) {
    EXPECT_DOUBLE_EQ(min_walk_length(225, 1), 1);
    EXPECT_DOUBLE_EQ(min_walk_length(31, -1), 31);
    EXPECT_DOUBLE_EQ(min_walk_length(15, 0), 1);
    EXPECT_THROW(min_walk_length(15, -2), std::invalid_argument);
}

TEST(Bounds, FailureBoundEdgeCases) {
    FailureBound zero = failure_bound(100, -std::numeric_limits<double>::infinity(), 16, 0);
    EXPECT_EQ(zero.log10_bound, -std::numeric_limits<double>::infinity());
    EXPECT_FALSE(zero.vacuous);

    double eps0 = proof_constants(16).log10_eps0;
    EXPECT_TRUE(failure_bound(100, eps0, 16, 0).vacuous);
    EXPECT_TRUE(failure_bound(100, eps0 + 1, 16, 0).vacuous);
}

TEST(Bounds, FailureBoundMatchesDirectFormulaAndDecreases) {
    double log10_eps = -2420;
    FailureBound fb = failure_bound(1e6, log10_eps, 16, 0);
    ASSERT_FALSE(fb.vacuous);
    EXPECT_TRUE(std::isfinite(fb.log10_bound));
    EXPECT_LT(fb.log10_bound, 0);

    long double x = ref_log10_rho(16) + 0.5L * log10_eps;
    long double k = 1.2L / (1 - std::pow(10.0L, x));
    long double L = 1e6L / 15;
    long double want = std::log10(k) + 3 * std::log10(1e6L) + L * x;
    expect_rel(fb.log10_bound, want);

    double prev = failure_bound(1e5, log10_eps, 16, 0).log10_bound;
    for (double d = 2e5; d <= 1e7; d *= 2) {
        double cur = failure_bound(d, log10_eps, 16, 0).log10_bound;
        EXPECT_LT(cur, prev);
        prev = cur;
    }
}

TEST(Bounds, InjectionSumSinglePanelAndZeroNoise) {
    double log10_eps = -2500;
    InjectionReport one = injection_bound(log10_eps, 16, 1);
    ASSERT_EQ(one.panels.size(), 1u);
    long double x = ref_log10_rho(16) + 0.5L * log10_eps;
    long double want = std::log10(64.0L) + (2.0L / 16) * x;
    expect_rel(one.log10_sum, want);

    InjectionReport none = injection_bound(-std::numeric_limits<double>::infinity(), 16, 3);
    EXPECT_EQ(none.log10_sum, -std::numeric_limits<double>::infinity());
    EXPECT_TRUE(injection_bound(0, 16, 2).vacuous);
}

TEST(Bounds, InjectionTermsDecreaseDeepBelowThreshold) {
    InjectionReport r = injection_bound(-1e5, 16, 5);
    ASSERT_EQ(r.panels.size(), 5u);
    for (size_t j = 1; j < r.panels.size(); j++) {
        EXPECT_LT(r.panels[j].log10_term, r.panels[j - 1].log10_term);
        long double qj = std::pow(16.0L, (long double)j);
        expect_rel(r.panels[j].log10_s, 2 * std::log10(4 * qj + 4));
        expect_rel(r.panels[j].L, std::pow(15.0L, -(long double)j) * 2 * std::pow(16.0L, (long double)j - 1));
    }
}

TEST(Bounds, GoodInjectionPointsEmptyMap) {
    CodeLayout layout(9);
    ClusterDecomposition dc = decompose(DefectMap{9, {}, 0}, 9);
    EXPECT_EQ(good_injection_points(dc, layout, 9).size(), 81u);
}

TEST(Bounds, GoodInjectionPointsMatchDoubleLoop) {
    CodeLayout center(21);
    ClusterDecomposition one = decompose(DefectMap{21, {{10, 10}}, 0}, 9);
    std::vector<CellCoord> got = good_injection_points(one, center, 9);
    for (CellCoord c : got) {
        EXPECT_GE(std::max(std::abs(c.x - 10), std::abs(c.y - 10)), 5);
    }
    EXPECT_EQ(got.size(), oracle_good_points(one, 21, 9).size());

    for (uint64_t seed = 1; seed <= 30; seed++) {
        int d = 41;
        int Q = seed % 2 ? 9 : 33;
        ClusterDecomposition dc = decompose(sample_defects(d, 0.004, seed), Q);
        CodeLayout layout(d);
        std::set<std::pair<int, int>> mine;
        for (CellCoord c : good_injection_points(dc, layout, Q)) {
            mine.insert({c.x, c.y});
        }
        EXPECT_EQ(mine, oracle_good_points(dc, d, Q)) << "seed " << seed;
    }
}

TEST(Bounds, GoodInjectionPointsOnEvenGrid) {
    ClusterDecomposition dc = decompose(sample_defects(40, 0.002, 3), 33);
    std::set<std::pair<int, int>> mine;
    for (CellCoord c : good_injection_points(dc, 33)) {
        mine.insert({c.x, c.y});
    }
    EXPECT_EQ(mine, oracle_good_points(dc, 40, 33));
    EXPECT_THROW(good_injection_points(dc, CodeLayout(41), 33), std::invalid_argument);
}

TEST(Bounds, DenseDefectsLeaveNoInjectionPoint) {
    CodeLayout layout(15);
    ClusterDecomposition dc = decompose(sample_defects(15, 1.0, 1), 9);
    EXPECT_TRUE(good_injection_points(dc, layout, 9).empty());
}

TEST(Bounds, ReportIsValidJson) {
    auto j = nlohmann::json::parse(bounds_report_json(16, 1000000, 0, -2420, 2));
    EXPECT_NEAR(j.at("log10_rho").get<double>(), 1208.22, 0.005);
    EXPECT_EQ(j.at("injection").at("panels").size(), 2u);
    auto small = nlohmann::json::parse(bounds_report_json(9, 100, 0, -3, 2));
    EXPECT_FALSE(small.contains("log10_rho"));
    EXPECT_EQ(small.at("f0").at("den").get<uint64_t>(), 531441u);
}
