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

#ifndef SHELLQEC_SCHEDULE_H
#define SHELLQEC_SCHEDULE_H

#include <climits>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "shellqec/defects.h"
#include "shellqec/lattice.h"

namespace shellqec {

/// Phase A: boundary qubits are in the code and the ring plaquettes are measured.
/// Phase B: boundary qubits are read out in X and the shrunken stars are measured.
enum class Phase : uint8_t { None, A, B };

enum class WallKind : uint8_t { None, Rough, Smooth };

class InoperableError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

struct Puncture {
    int id = 0;
    int level = 0;
    int64_t period = 1;  ///< Q^level rounds per phase block
    CellRect quarantine;
    CellRect support;     ///< quarantine dilated by one cell, clipped to the array
    CellRect hole;        ///< vertex block [x0-1, x1] x [y0-1, y1]; may include virtual vertices
    std::vector<int> boundary_qubits;      ///< edges with exactly one endpoint in the hole
    std::vector<int> boundary_plaquettes;  ///< faces touching the hole without lying inside it
    std::vector<int> interior_qubits;      ///< edges with both endpoints in the hole
    WallKind wall = WallKind::None;
    bool dynamic = false;
    int t_open = 0;
    int t_close = INT_MAX;

    bool walled() const { return wall != WallKind::None; }
    bool hole_contains(int vx, int vy) const { return hole.contains({vx, vy}); }
    Phase phase_at(int t) const;
};

enum class OpKind : uint8_t { Star, Plaquette, Readout };

/// A measured operator. Stars and plaquettes are identified by their site and their current
/// support (deformed checks get their own ids); readouts are single-qubit X measurements.
struct OperatorSpec {
    int id = 0;
    Pauli type = Pauli::X;
    OpKind kind = OpKind::Star;
    int site = 0;  ///< star index, plaquette index or qubit index
    CellCoord cell;
    std::vector<int> qubits;
};

struct RoundDirective {
    std::vector<int> measured;     ///< operator ids, ascending (includes readouts)
    std::vector<int> init_plus;    ///< qubits prepared in |+> at the start of the round
    std::vector<int> readout_x;    ///< qubits destructively measured in X this round
    std::vector<int> deactivated;  ///< qubits switched off without a readout (dynamic opening)
    std::vector<Phase> phases;     ///< per puncture
};

class ShellSchedule {
   public:
    std::shared_ptr<const CodeLayout> layout;
    int Q = 0;
    int T = 0;
    std::vector<Puncture> punctures;
    std::vector<OperatorSpec> operators;
    std::vector<RoundDirective> rounds;
    std::vector<uint8_t> initially_active;  ///< per qubit, state at the start of round 0

    const CodeLayout &code() const { return *layout; }
    /// Cells owned by any puncture support at any time; logical strings avoid these.
    std::vector<CellCoord> forbidden_cells() const;
    std::string to_json() const;
};

/// One puncture per cluster. Throws InoperableError when punctures crowd each other, touch
/// another cluster, or a wall cuts the logical boundaries apart.
std::vector<Puncture> build_punctures(const ClusterDecomposition &decomp, const CodeLayout &layout);

/// Builds a dynamic or static puncture around a cell region.
Puncture make_puncture(const CodeLayout &layout, CellRect quarantine, int level, int Q);

struct ScheduleOptions {
    bool allow_short = false;  ///< permit T shorter than one full period of the largest puncture
};

ShellSchedule build_schedule(
    std::shared_ptr<const CodeLayout> layout, std::vector<Puncture> punctures, int T, int Q,
    ScheduleOptions options = {});

/// Smallest multiple of 2Q^m that is at least d (d when there are no defects).
int default_rounds(int d, int Q, int m);

enum class ShellType : uint8_t { ZDetecting, XDetecting };

struct Shell {
    int puncture = 0;
    ShellType type = ShellType::ZDetecting;
    int t_begin = 0;
    int t_end = 0;  ///< exclusive
    CellRect box;
    int level = 0;
    bool time_boundary = false;

    int diagonal_width() const { return box.width() + box.height() + (t_end - t_begin); }
};

std::vector<Shell> enumerate_shells(const ShellSchedule &schedule);

/// Infinity-norm distance between two same-type shells in the space-time cell lattice.
int same_type_shell_distance(const Shell &a, const Shell &b);

/// Adds a dynamic puncture over `region` active in [t_open, t_close).
ShellSchedule edit_schedule_for_burst(const ShellSchedule &schedule, CellRect region, int t_open, int t_close);

}  // namespace shellqec

#endif  // SHELLQEC_SCHEDULE_H
