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

#ifndef SHELLQEC_DETECTORS_H
#define SHELLQEC_DETECTORS_H

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "shellqec/sim.h"

namespace shellqec {

enum class DetectorKind : uint8_t { BulkComparison, ShellParity, InferredDeformation, SpaceBoundary, TimeBoundary };
const char *to_string(DetectorKind kind);

struct Detector {
    int id = 0;
    DetectorKind kind = DetectorKind::BulkComparison;
    std::vector<int> meas;  ///< sector measurement indices, ascending
    uint8_t reference = 0;  ///< expected parity of the constituents
    CellCoord cell;
    int round = 0;
    int puncture = -1;  ///< owning puncture for shell detectors
};

class SoundnessError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

struct DetectorOptions {
    bool verify = true;    ///< cross-check determinism with a stabilizer simulation
    int verify_trials = 3;
    uint64_t verify_seed = 7;
};

std::vector<Detector> build_detectors(const SectorCircuit &circuit, const DetectorOptions &options = {});

/// Runs a CSS stabilizer simulation with random outcomes for non-deterministic measurements
/// and throws SoundnessError when a detector or the observable is not deterministic.
void verify_detectors(const SectorCircuit &circuit, const std::vector<Detector> &detectors, int trials, uint64_t seed);

/// Recomputes detector references from a noiseless record (needed in toggling mode).
void set_references(std::vector<Detector> &detectors, const MeasurementRecord &reference);

/// Ids of violated detectors, ascending.
std::vector<int> extract_events(const MeasurementRecord &record, const std::vector<Detector> &detectors);

enum class WeightMode : uint8_t { Uniform, Likelihood };

struct GraphEdge {
    int u = 0;
    int v = 0;  ///< boundary edges use a boundary node id here
    double p = 0;
    int32_t weight = 1;
    uint8_t obs = 0;
    int fault_count = 0;
    Fault fault;  ///< first fault mapped to this edge
};

class DetectorGraph {
   public:
    int num_detectors = 0;
    int num_nodes = 0;               ///< detectors followed by boundary nodes
    std::vector<int> boundary_nodes;
    std::vector<GraphEdge> edges;
    WeightMode mode = WeightMode::Uniform;
    bool unit_weights = true;
    int64_t benign_faults = 0;  ///< faults that flip nothing at all
    int64_t total_faults = 0;

    // Adjacency in CSR form: (neighbor, edge index).
    std::vector<int> adj_offsets;
    std::vector<std::pair<int, int>> adj;

    bool is_boundary(int node) const { return node >= num_detectors; }
    void finalize();
    /// Edge list "u v weight p fault_count", one line per edge.
    std::string dump() const;
};

struct GraphOptions {
    WeightMode mode = WeightMode::Uniform;
    double weight_scale = 100.0;  ///< likelihood weights are rounded after scaling
};

/// Enumerates every elementary fault, propagates it through the circuit and maps it to the
/// one or two detectors it flips. Throws SoundnessError for faults with any other footprint.
DetectorGraph build_graph(const SectorCircuit &circuit, const std::vector<Detector> &detectors,
                          const NoiseParams &noise, const GraphOptions &options = {});

/// Detectors flipped by one fault (ascending) and whether it flips the observable.
struct FaultEffect {
    std::vector<int> detectors;
    uint8_t obs = 0;
};

class FaultPropagator {
   public:
    FaultPropagator(const SectorCircuit &circuit, const std::vector<Detector> &detectors);
    FaultEffect effect(const Fault &fault) const;
    /// Sector measurements flipped by the fault.
    std::vector<int> flipped_measurements(const Fault &fault) const;
    /// All elementary faults of the circuit in enumeration order.
    std::vector<Fault> all_faults() const;

   private:
    const SectorCircuit &circuit_;
    std::vector<int> qubit_meas_offsets_, qubit_meas_;
    std::vector<int> meas_det_offsets_, meas_det_;
    std::vector<std::vector<int>> resets_;    ///< per qubit: rounds of preparations/deactivations
    std::vector<std::vector<int>> readouts_;  ///< per qubit: rounds of X readouts
    std::vector<uint8_t> on_observable_;
};

}  // namespace shellqec

#endif  // SHELLQEC_DETECTORS_H
