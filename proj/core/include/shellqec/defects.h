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

#ifndef SHELLQEC_DEFECTS_H
#define SHELLQEC_DEFECTS_H

#include <cstdint>
#include <string>
#include <vector>

#include "shellqec/lattice.h"
#include "shellqec/stats.h"

namespace shellqec {

struct DefectMap {
    int d = 0;
    std::vector<CellCoord> defective;  ///< sorted row-major, no duplicates
    double f = 0;
};

/// Axis-aligned rectangle of cells, inclusive bounds.
struct CellRect {
    int x0 = 0, y0 = 0, x1 = -1, y1 = -1;

    int width() const { return x1 - x0 + 1; }
    int height() const { return y1 - y0 + 1; }
    bool empty() const { return x1 < x0 || y1 < y0; }
    bool contains(CellCoord c) const { return c.x >= x0 && c.x <= x1 && c.y >= y0 && c.y <= y1; }
    CellRect dilated(int r) const { return {x0 - r, y0 - r, x1 + r, y1 + r}; }
    bool operator==(const CellRect &) const = default;
};

/// Infinity-norm distance between two rectangles (0 when they overlap).
int rect_distance(const CellRect &a, const CellRect &b);

struct Cluster {
    std::vector<CellCoord> cells;  ///< sorted row-major
    int level = 0;
    CellRect bbox;      ///< tight bounding box
    CellCoord corner;   ///< corner of the bounding square
    int side = 0;       ///< side of the bounding square (max of bbox width and height)
};

struct ClusterDecomposition {
    int d = 0;
    int Q = 0;
    int m = -1;  ///< highest level present, -1 when there are no defects
    std::vector<Cluster> clusters;  ///< ordered by their smallest cell
};

/// Q^j saturated at INT64_MAX / 4.
int64_t int_pow(int64_t Q, int j);
/// Smallest j with size <= Q^j.
int level_for_size(int64_t size, int Q);

DefectMap sample_defects(int d, double f, uint64_t seed);

/// Hierarchical clustering: start from 8-connected components, then repeatedly merge the
/// first (in row-major order of smallest cells) pair whose separation is below Q^{j+1}/3,
/// j being the smaller of the two levels.
ClusterDecomposition decompose(const DefectMap &map, int Q);

/// Quarantine region of a cluster: its tight bounding box. A square of side `side` could
/// swallow a neighbouring cluster that the separation rule allows to sit three cells away.
inline CellRect quarantine_rect(const Cluster &cluster) { return cluster.bbox; }
/// Quarantine region dilated by one cell (not clipped to the array).
inline CellRect support_rect(const Cluster &cluster) { return cluster.bbox.dilated(1); }

/// Minimal infinity-norm distance between cells of two clusters.
int cluster_separation(const Cluster &a, const Cluster &b);

bool is_operable(const ClusterDecomposition &decomp, int d);

RateEstimate estimate_discard_rate(int d, double f, int Q, int64_t shots, uint64_t seed);

std::string defect_map_to_json(const DefectMap &map);
DefectMap defect_map_from_json(const std::string &text);
DefectMap read_defect_map(const std::string &path);
void write_defect_map(const DefectMap &map, const std::string &path);

}  // namespace shellqec

#endif  // SHELLQEC_DEFECTS_H
