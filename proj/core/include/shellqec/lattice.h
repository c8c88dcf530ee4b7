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

#ifndef SHELLQEC_LATTICE_H
#define SHELLQEC_LATTICE_H

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace shellqec {

/// Unit-cell coordinate. Rows grow southwards.
struct CellCoord {
    int x = 0;
    int y = 0;
    bool operator==(const CellCoord &other) const = default;
};

/// Row-major ordering: compares y first, then x.
inline bool operator<(const CellCoord &a, const CellCoord &b) {
    return a.y != b.y ? a.y < b.y : a.x < b.x;
}

inline int inf_distance(const CellCoord &a, const CellCoord &b) {
    int dx = a.x > b.x ? a.x - b.x : b.x - a.x;
    int dy = a.y > b.y ? a.y - b.y : b.y - a.y;
    return dx > dy ? dx : dy;
}

enum class Pauli : uint8_t { X, Z };

/// Which error type is simulated. Sector X tracks bit flips (seen by Z-type plaquettes,
/// memory in the Z basis); sector Z tracks phase flips (seen by X-type stars, memory in
/// the X basis).
enum class Sector : uint8_t { X, Z };

inline Pauli detecting_type(Sector s) { return s == Sector::X ? Pauli::Z : Pauli::X; }
/// Pauli type of the logical string whose parity a sector's errors can flip.
inline Pauli observable_type(Sector s) { return s == Sector::X ? Pauli::Z : Pauli::X; }
const char *to_string(Sector s);
Sector parse_sector(const std::string &text);

/// Geometry of a data qubit. Horizontal edge h(x, y) joins vertices (x-1, y) and (x, y);
/// vertical edge v(x, y) joins (x, y) and (x, y+1). Vertices with x = -1 or x = d-1 are
/// virtual points on the rough west/east boundaries.
struct QubitGeometry {
    bool horizontal = true;
    int x = 0;
    int y = 0;
    CellCoord cell;
};

struct Check {
    Pauli type = Pauli::X;
    int x = 0;  ///< vertex column (star) or face column (plaquette)
    int y = 0;  ///< vertex row (star) or face row (plaquette)
    CellCoord cell;
    std::vector<int> qubits;  ///< sorted ascending
};

/// Planar surface code of odd distance d with rough east/west and smooth north/south
/// boundaries. Cell (x, y) owns the vertex (x, y), the edge west of it h(x, y), the edge
/// north of it v(x, y-1) and the face north-west of the vertex, when these exist.
class CodeLayout {
   public:
    explicit CodeLayout(int d);

    int d() const { return d_; }
    int num_qubits() const { return (int)qubits_.size(); }
    int num_stars() const { return (int)stars_.size(); }
    int num_plaquettes() const { return (int)plaquettes_.size(); }

    /// Index of h(x, y) or v(x, y); -1 when the edge does not exist.
    int h_edge(int x, int y) const;
    int v_edge(int x, int y) const;
    /// Index of the star at vertex (x, y) / plaquette at face (x, r); -1 when absent.
    int star_at(int x, int y) const;
    int plaquette_at(int x, int r) const;

    const QubitGeometry &qubit(int q) const { return qubits_[q]; }
    const Check &star(int s) const { return stars_[s]; }
    const Check &plaquette(int p) const { return plaquettes_[p]; }
    const std::vector<Check> &stars() const { return stars_; }
    const std::vector<Check> &plaquettes() const { return plaquettes_; }

    /// Endpoints of a qubit's edge as vertex coordinates (possibly virtual).
    std::pair<CellCoord, CellCoord> endpoints(int q) const;
    /// The edges of face (x, r): h(x, r), h(x, r+1), v(x-1, r), v(x, r), skipping absent ones.
    std::vector<int> face_edges(int x, int r) const;
    /// The edges at vertex (x, y), including virtual vertices on the rough boundaries.
    std::vector<int> vertex_edges(int x, int y) const;

    bool in_array(CellCoord c) const { return c.x >= 0 && c.y >= 0 && c.x < d_ && c.y < d_; }

   private:
    int d_;
    std::vector<QubitGeometry> qubits_;
    std::vector<Check> stars_;
    std::vector<Check> plaquettes_;
};

struct LogicalRep {
    Pauli type = Pauli::Z;
    std::vector<int> qubits;  ///< in path order
    int round = 0;
};

class DisconnectedError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

/// Shortest boundary-to-boundary logical string avoiding every element owned by a forbidden
/// cell. A Z-type string runs west to east along lattice edges; an X-type string runs north
/// to south across faces. Ties are broken by preferring the next node with the smallest
/// (y, x). Throws DisconnectedError when the forbidden cells cut the two boundaries apart.
LogicalRep logical_representative(
    const CodeLayout &layout, Pauli type, const std::vector<CellCoord> &forbidden);

}  // namespace shellqec

#endif  // SHELLQEC_LATTICE_H
