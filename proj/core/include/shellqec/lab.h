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

#ifndef SHELLQEC_LAB_H
#define SHELLQEC_LAB_H

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "shellqec/decoder.h"
#include "shellqec/defects.h"
#include "shellqec/detectors.h"
#include "shellqec/schedule.h"
#include "shellqec/sim.h"
#include "shellqec/stats.h"

namespace shellqec {

enum class ExperimentMode : uint8_t { Memory, Cosmic, Silent, Bounds, Defects };
enum class SectorChoice : uint8_t { X, Z, Both };

const char *to_string(ExperimentMode mode);
ExperimentMode parse_mode(const std::string &text);
const char *to_string(SectorChoice choice);
SectorChoice parse_sector_choice(const std::string &text);
std::vector<Sector> sectors_of(SectorChoice choice);

struct ExperimentConfig {
    ExperimentMode mode = ExperimentMode::Memory;
    std::vector<int> d{5};
    std::vector<double> eps{0.01};
    double f = 0;
    int Q = 9;
    int rounds = 0;       ///< 0 selects the default for each defect map
    int64_t shots = 1000; ///< per operable map and point
    int maps = 1;         ///< operable defect maps per point
    int max_map_attempts = 0;  ///< 0 allows 200 draws per requested map
    uint64_t seed = 1;
    SectorChoice sector = SectorChoice::Both;
    WeightMode weights = WeightMode::Uniform;
    std::string defect_map;  ///< optional file used instead of sampling
    bool full_sim = false;   ///< simulate full measurement records instead of sampling graph edges
    bool verify = false;     ///< run the stabilizer cross-check on every detector set

    int burst_size = 4;
    double burst_eps = 0.25;
    int burst_t1 = 4;
    int burst_t3 = -1;  ///< end of the burst (exclusive); -1 means t1 + 50
    int window = 2;
    double factor = 10;

    bool toggling = true;
    int stuck_op = -1;  ///< -1 selects the central check
    int stuck_onset = 3;

    int m = 0;                  ///< bounds mode: highest cluster level
    double log10_eps = -2420;   ///< bounds mode
    int panels = -1;            ///< bounds mode; -1 selects m + 2

    void validate() const;
    int burst_end() const { return burst_t3 >= 0 ? burst_t3 : burst_t1 + 50; }
};

std::string config_to_json(const ExperimentConfig &config);
/// Reads a JSON object whose keys mirror the command line flags; missing keys keep defaults.
ExperimentConfig config_from_json(const std::string &text, ExperimentConfig base = {});

/// Everything the simulator and decoder need for one sector of one schedule. Heap allocated
/// so the decoder's reference to the graph stays valid.
struct SectorModel {
    std::shared_ptr<const ShellSchedule> schedule;
    SectorCircuit circuit;
    std::vector<Detector> detectors;
    DetectorGraph graph;
    std::unique_ptr<Decoder> decoder;
};

std::unique_ptr<SectorModel> build_sector_model(std::shared_ptr<const ShellSchedule> schedule, Sector sector,
                                                const NoiseParams &noise, WeightMode weights, bool verify);

/// Draws independent graph edges; equivalent in distribution to a full noisy simulation
/// because every elementary fault acts linearly on detectors and the observable.
class EdgeSampler {
   public:
    explicit EdgeSampler(const DetectorGraph &graph);
    /// Fills `events` (ascending) and returns the observable flip.
    uint8_t sample(Rng &rng, std::vector<int> &events);

   private:
    const DetectorGraph &graph_;
    std::vector<std::pair<double, std::vector<int>>> groups_;
    std::vector<uint8_t> flip_;
};

struct MemoryRow {
    int d = 0;
    double eps = 0;
    double f = 0;
    int Q = 0;
    int rounds = 0;
    int64_t shots = 0;
    int64_t failures = 0;
    RateEstimate rate;
    int64_t discards = 0;
    int maps = 0;
    uint64_t seed = 0;
    double seconds = 0;
};

std::string memory_csv_header();
std::string to_csv(const MemoryRow &row);

/// An operable defect map with its schedule, or the reason it was discarded.
struct PreparedMap {
    DefectMap map;
    ClusterDecomposition decomp;
    std::shared_ptr<const ShellSchedule> schedule;
    std::string discard_reason;  ///< empty when usable
};

PreparedMap prepare_map(const DefectMap &map, int Q, int rounds);

std::vector<MemoryRow> run_memory(const ExperimentConfig &config,
                                  const std::function<void(const MemoryRow &)> &on_row = {});

struct EventSite {
    CellCoord cell;
    int round = 0;
};

struct BurstDetection {
    bool detected = false;
    int round = -1;
    CellRect region;
    int flagged_cells = 0;
};

/// Sliding-window detector: a cell is flagged at round t when it has an event in the last w
/// rounds and the events within Chebyshev radius 2 exceed theta times their expected count.
/// `baseline` holds the expected events per round for each cell (row-major, d x d).
BurstDetection detect_bursts(const std::vector<EventSite> &events, int d, int T, const std::vector<double> &baseline,
                             int w, double theta);

/// Expected events per round and cell from the independent-edge model of a detector graph.
std::vector<double> analytic_baseline(const SectorModel &model);

struct BurstReport {
    int t1 = 0;
    int t3 = 0;
    int T = 0;
    int64_t shots = 0;
    int64_t detected = 0;
    int64_t false_alarms = 0;   ///< detections before t1
    int max_latency = -1;      ///< over detected shots
    double mean_latency = 0;
    std::vector<int64_t> latency_histogram;  ///< index = t2 - t1
    int64_t isolation_fallbacks = 0;         ///< detected shots where no puncture could be opened
    RateEstimate control;
    RateEstimate isolation;
    CellRect burst_region;
};

BurstReport run_cosmic(const ExperimentConfig &config);
std::string to_json(const BurstReport &report);

struct SilentReport {
    int d = 0;
    int op = -1;
    int onset = 0;
    bool toggling = false;
    int64_t shots = 0;
    int64_t flagged = 0;
    int64_t flagged_at_onset = 0;
    int first_flag_round = -1;  ///< from the first shot
    int64_t false_flags = 0;    ///< other checks flagged, summed over shots
};

SilentReport run_silent(const ExperimentConfig &config);
std::string to_json(const SilentReport &report);

}  // namespace shellqec

#endif  // SHELLQEC_LAB_H
