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

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "json.hpp"

namespace shellqec {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void require_convergent(int Q) {
    if (Q <= 15) {
        throw std::invalid_argument("rho-dependent constants need Q > 15, got Q=" + std::to_string(Q));
    }
}

// log10(1 - 10^x) for x < 0, accurate when x is close to zero.
long double log10_one_minus_pow10(long double x) {
    return std::log10(-std::expm1(x * std::log(10.0L)));
}

double log10_sum(const std::vector<double> &terms) {
    double top = kNegInf;
    for (double t : terms) {
        top = std::max(top, t);
    }
    if (top == kNegInf) {
        return kNegInf;
    }
    long double acc = 0;
    for (double t : terms) {
        acc += std::pow(10.0L, (long double)t - top);
    }
    return (double)(top + std::log10(acc));
}

}  // namespace

TerminationBound termination_bound(int j, int Q) {
    if (j < 0 || Q < 2) {
        throw std::invalid_argument("termination_bound needs j >= 0 and Q >= 2");
    }
    long double qj = std::pow((long double)Q, (long double)j);
    return {4 * qj * qj + 20 * qj + 16, 40 * qj * qj};
}

WalkBound walk_bounds(int j, double length, int Q) {
    long double ratio = std::pow(15.0L / (long double)Q, (long double)j);
    return {(double)(2 * ratio * length), (double)(std::pow(15.0L, (long double)(j + 1)) * length)};
}

Rational f0_rational(int Q) {
    if (Q < 2) {
        throw std::invalid_argument("f0 needs Q >= 2");
    }
    uint64_t base = 3 * (uint64_t)Q;
    return {1, base * base * base * base};
}

double log10_rho(int Q) {
    require_convergent(Q);
    long double q = Q;
    long double gap = q - 15;
    return (double)(1.0L + (2 * q / gap) * std::log10(40.0L) + (60 * q / (gap * gap)) * std::log10(q));
}

ProofConstants proof_constants(int Q) {
    ProofConstants pc;
    pc.Q = Q;
    pc.log10_rho = log10_rho(Q);
    pc.log10_eps0 = -2 * pc.log10_rho;
    pc.eta = (double)(1.0L - std::log(15.0L) / std::log((long double)Q));
    pc.f0 = f0_rational(Q);
    return pc;
}

ProofConstants proof_constants(int Q, int d, int m, double log10_eps) {
    ProofConstants pc = proof_constants(Q);
    pc.L = min_walk_length(d, m);
    long double x = pc.log10_rho + 0.5L * log10_eps;
    if (x < 0) {
        pc.log10_k = (double)(std::log10((long double)pc.c) - log10_one_minus_pow10(x));
    }
    return pc;
}

double min_walk_length(double d, int m) {
    if (m < -1) {
        throw std::invalid_argument("cluster level m must be >= -1");
    }
    return (double)((long double)d / std::pow(15.0L, (long double)(m + 1)));
}

FailureBound failure_bound(double d, double log10_eps, int Q, int m, double v_scale) {
    FailureBound fb;
    fb.L = min_walk_length(d, m);
    long double lr = log10_rho(Q);
    if (log10_eps == kNegInf) {
        fb.log10_k = std::log10(1.2);
        fb.log10_bound = kNegInf;
        return fb;
    }
    long double x = lr + 0.5L * log10_eps;
    if (x >= 0) {
        fb.vacuous = true;
        fb.log10_k = std::numeric_limits<double>::infinity();
        fb.log10_bound = std::numeric_limits<double>::infinity();
        return fb;
    }
    long double lk = std::log10(1.2L) - log10_one_minus_pow10(x);
    fb.log10_k = (double)lk;
    fb.log10_bound = (double)(lk + 3 * std::log10((long double)d) + std::log10((long double)v_scale) + fb.L * x);
    return fb;
}

InjectionReport injection_bound(double log10_eps, int Q, int n) {
    if (n < 1) {
        throw std::invalid_argument("injection_bound needs at least one panel");
    }
    InjectionReport rep;
    rep.Q = Q;
    long double lr = log10_rho(Q);
    long double x = log10_eps == kNegInf ? (long double)kNegInf : lr + 0.5L * log10_eps;
    if (x >= 0) {
        rep.vacuous = true;
    }
    std::vector<double> terms;
    for (int j = 0; j < n; j++) {
        InjectionPanel p;
        p.j = j;
        long double qj = std::pow((long double)Q, (long double)j);
        p.log10_s = (double)(2 * std::log10(4 * qj + 4));
        p.L = (double)(std::pow(15.0L, -(long double)j) * 2 * std::pow((long double)Q, (long double)(j - 1)));
        p.log10_term = x == kNegInf ? kNegInf : (double)(p.log10_s + p.L * x);
        terms.push_back(p.log10_term);
        rep.panels.push_back(p);
    }
    rep.log10_sum = log10_sum(terms);
    if (rep.vacuous) {
        rep.log10_total = std::numeric_limits<double>::infinity();
    } else if (x == kNegInf) {
        rep.log10_total = kNegInf;
    } else {
        rep.log10_total = (double)(std::log10(1.2L) - log10_one_minus_pow10(x) + rep.log10_sum);
    }
    return rep;
}

std::vector<CellCoord> good_injection_points(const ClusterDecomposition &decomp, const CodeLayout &layout, int Q) {
    if (decomp.d != layout.d()) {
        throw std::invalid_argument("decomposition and layout sizes differ");
    }
    return good_injection_points(decomp, Q);
}

std::vector<CellCoord> good_injection_points(const ClusterDecomposition &decomp, int Q) {
    int d = decomp.d;
    std::vector<std::pair<CellRect, int64_t>> keep_out;
    for (const Cluster &c : decomp.clusters) {
        CellRect s = support_rect(c);
        s = {std::max(s.x0, 0), std::max(s.y0, 0), std::min(s.x1, d - 1), std::min(s.y1, d - 1)};
        keep_out.push_back({s, 2 * int_pow(Q, c.level) + 2});
    }
    std::vector<CellCoord> out;
    for (int y = 0; y < d; y++) {
        for (int x = 0; x < d; x++) {
            CellRect v{x, y, x, y};
            bool good = std::all_of(keep_out.begin(), keep_out.end(), [&](const auto &k) {
                return rect_distance(v, k.first) >= k.second;
            });
            if (good) {
                out.push_back({x, y});
            }
        }
    }
    return out;
}

std::string bounds_report_json(int Q, int d, int m, double log10_eps, int panels) {
    nlohmann::ordered_json j;
    j["Q"] = Q;
    j["d"] = d;
    j["m"] = m;
    j["log10_eps"] = log10_eps;
    Rational f0 = f0_rational(Q);
    j["f0"] = {{"num", f0.num}, {"den", f0.den}, {"value", f0.value()}};
    j["L"] = min_walk_length(d, m);
    auto terms = nlohmann::ordered_json::array();
    for (int level = 0; level <= std::max(m, 0); level++) {
        TerminationBound tb = termination_bound(level, Q);
        terms.push_back({{"j", level}, {"exact", (double)tb.exact}, {"rounded", (double)tb.rounded}});
    }
    j["termination"] = terms;
    if (Q > 15) {
        ProofConstants pc = proof_constants(Q, d, m, log10_eps);
        j["c"] = pc.c;
        j["valency"] = pc.valency;
        j["log10_rho"] = pc.log10_rho;
        j["log10_eps0"] = pc.log10_eps0;
        j["eta"] = pc.eta;
        FailureBound fb = failure_bound(d, log10_eps, Q, m);
        j["failure_bound"] = {{"vacuous", fb.vacuous}, {"log10_k", fb.vacuous ? nlohmann::ordered_json() : nlohmann::ordered_json(fb.log10_k)},
                              {"log10_bound", fb.vacuous ? nlohmann::ordered_json() : nlohmann::ordered_json(fb.log10_bound)}};
        InjectionReport ir = injection_bound(log10_eps, Q, panels);
        auto ps = nlohmann::ordered_json::array();
        for (const InjectionPanel &p : ir.panels) {
            ps.push_back({{"j", p.j}, {"log10_s", p.log10_s}, {"L", p.L}, {"log10_term", p.log10_term}});
        }
        j["injection"] = {{"vacuous", ir.vacuous}, {"panels", ps}, {"log10_sum", ir.log10_sum},
                          {"log10_total", ir.vacuous ? nlohmann::ordered_json() : nlohmann::ordered_json(ir.log10_total)}};
    } else {
        j["rho_note"] = "rho, eps0 and eta are only defined for Q > 15";
    }
    j["sigma_note"] = "the discard exponent sigma ~ 1/log Q has no computable constant";
    return j.dump(2);
}

}  // namespace shellqec
