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

#ifndef SHELLQEC_BOUNDS_H
#define SHELLQEC_BOUNDS_H

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "shellqec/defects.h"
#include "shellqec/lattice.h"

namespace shellqec {

struct TerminationBound {
    long double exact = 0;    ///< 4Q^{2j} + 20Q^j + 16
    long double rounded = 0;  ///< 40Q^{2j}
};
TerminationBound termination_bound(int j, int Q);

struct WalkBound {
    double encounters = 0;       ///< n_j = 2 * 15^j * l / Q^j
    double augmented_length = 0; ///< l'_j = 15^{j+1} * l
};
WalkBound walk_bounds(int j, double length, int Q);

struct Rational {
    uint64_t num = 0;
    uint64_t den = 1;
    double value() const { return (double)num / (double)den; }
};

/// f0 = (3Q)^-4 as an exact fraction.
Rational f0_rational(int Q);

struct ProofConstants {
    int Q = 0;
    double c = 1.2;
    int valency = 6;
    double log10_rho = 0;
    double log10_eps0 = 0;
    double eta = 0;
    Rational f0;
    // Context dependent members, filled when (d, m, eps) are supplied.
    std::optional<double> L;
    std::optional<double> log10_k;
};

/// Requires Q > 15 (the walk-counting series only converge there).
ProofConstants proof_constants(int Q);
ProofConstants proof_constants(int Q, int d, int m, double log10_eps);

double log10_rho(int Q);
/// L = d / 15^{m+1}; m = -1 gives d.
double min_walk_length(double d, int m);

struct FailureBound {
    bool vacuous = false;
    double log10_bound = 0;  ///< -inf when eps = 0
    double log10_k = 0;
    double L = 0;
};
/// log10 of k * V_scale * d^3 * (rho sqrt(eps))^L.
FailureBound failure_bound(double d, double log10_eps, int Q, int m, double v_scale = 1.0);

struct InjectionPanel {
    int j = 0;
    double log10_s = 0;  ///< s_j = (4Q^j + 4)^2
    double L = 0;        ///< L_j = 15^-j * 2Q^{j-1}
    double log10_term = 0;
};

struct InjectionReport {
    int Q = 0;
    bool vacuous = false;
    std::vector<InjectionPanel> panels;
    double log10_sum = 0;    ///< log10 of sum_j s_j (rho sqrt(eps))^{L_j}
    double log10_total = 0;  ///< including the factor k
    std::vector<CellCoord> good_points;
};

/// Panels j = 0 .. n-1.
InjectionReport injection_bound(double log10_eps, int Q, int n);

/// Cells at infinity-norm distance >= 2Q^j + 2 from every cell of every level-j support square.
std::vector<CellCoord> good_injection_points(const ClusterDecomposition &decomp, const CodeLayout &layout, int Q);
/// Same, on the decomposition's own d x d cell grid; d need not be odd.
std::vector<CellCoord> good_injection_points(const ClusterDecomposition &decomp, int Q);

/// JSON document with every constant for (Q, d, m, eps).
std::string bounds_report_json(int Q, int d, int m, double log10_eps, int panels);

}  // namespace shellqec

#endif  // SHELLQEC_BOUNDS_H
