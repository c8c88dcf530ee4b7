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

#ifndef SHELLQEC_SIM_H
#define SHELLQEC_SIM_H

#include <cstdint>
#include <string>
#include <vector>

#include "shellqec/schedule.h"
#include "shellqec/stats.h"

namespace shellqec {

struct Burst {
    CellRect region;
    int t_start = 0;
    int t_end = 0;  ///< exclusive
    double eps = 0;
};

struct NoiseParams {
    double eps = 0;         ///< data flip probability per active qubit per round
    double q = 0;           ///< measurement flip probability
    double init_error = 0;  ///< probability that a |+> preparation comes out as |->
    std::vector<Burst> bursts;

    /// Phenomenological noise with q = init_error = eps.
    static NoiseParams uniform(double eps) { return {eps, eps, eps, {}}; }
    void validate() const;
};

/// One recorded outcome of a sector. Final readouts have op = -1.
struct SectorMeasurement {
    int round = 0;
    int op = -1;
    int qubit = -1;  ///< set for readouts and final readouts
    bool noisy = true;
    bool toggles = false;  ///< a repeated check whose expected value alternates in toggling mode
};

struct SectorRound {
    std::vector<int> resets;       ///< frame bits cleared at the start of the round
    std::vector<int> data_qubits;  ///< qubits exposed to a data error this round
    std::vector<int> init_noisy;   ///< qubits whose preparation can fail (sector Z, t > 0)
    std::vector<int> dropped;      ///< qubits that leave the code after this round's measurements
    int meas_begin = 0;
    int meas_end = 0;
};

/// The schedule restricted to one sector: the recorded measurements, the per-round data-error
/// opportunities and the observable. Round index T holds the noiseless transversal readout.
class SectorCircuit {
   public:
    const ShellSchedule *schedule = nullptr;
    Sector sector = Sector::X;
    int T = 0;
    std::vector<SectorRound> rounds;
    std::vector<SectorMeasurement> meas;
    std::vector<int> support_offsets;  ///< CSR over meas
    std::vector<int> support;
    std::vector<int> observable;  ///< qubits of the logical string read out at the end
    std::vector<uint8_t> active_at_end;

    int num_measurements() const { return (int)meas.size(); }
    const int *support_begin(int m) const { return support.data() + support_offsets[m]; }
    const int *support_end(int m) const { return support.data() + support_offsets[m + 1]; }
    /// Index of the measurement of operator `op` in round t, or -1.
    int find(int t, int op) const;
    /// Index of the final readout of qubit q, or -1.
    int final_readout(int q) const;

   private:
    friend SectorCircuit compile_sector(const ShellSchedule &schedule, Sector sector);
    std::vector<int> final_of_qubit_;
};

SectorCircuit compile_sector(const ShellSchedule &schedule, Sector sector);

enum class FaultKind : uint8_t { Data, Measurement, Init };

struct Fault {
    FaultKind kind = FaultKind::Data;
    int round = 0;
    int index = 0;  ///< qubit for data and init faults, measurement index otherwise
    bool operator==(const Fault &) const = default;
};
std::string describe(const Fault &fault, const SectorCircuit &circuit);

struct MeasurementRecord {
    Sector sector = Sector::X;
    std::vector<uint8_t> bits;    ///< one per sector measurement
    std::vector<Fault> faults;    ///< filled when diagnostics are on
    std::vector<uint8_t> frame;   ///< residual data frame after the last round
    uint8_t observable_flip = 0;  ///< parity of the residual frame on the logical string
};

/// A stuck readout device: from `onset` on it repeats the value it reported at onset - 1.
struct StuckDevice {
    int op = 0;
    int onset = 0;
};

struct SimOptions {
    bool toggling = false;
    bool diagnostics = false;
    std::vector<StuckDevice> stuck;
};

/// Pauli-frame simulator for one sector. Each round draws from its own generator seeded by
/// (seed, round), so rounds before a schedule edit replay identically.
class FrameSimulator {
   public:
    FrameSimulator(const SectorCircuit &circuit, NoiseParams noise, SimOptions options = {});
    MeasurementRecord run(uint64_t seed);
    /// Noiseless run with the given faults injected.
    MeasurementRecord run_with_faults(const std::vector<Fault> &faults);

   private:
    MeasurementRecord simulate(uint64_t seed, const std::vector<Fault> *faults);
    const SectorCircuit &circuit_;
    NoiseParams noise_;
    SimOptions options_;
    std::vector<std::vector<uint8_t>> burst_mask_;  ///< per burst, per qubit
};

MeasurementRecord run_shot(const ShellSchedule &schedule, const NoiseParams &noise, Sector sector, uint64_t seed,
                           const SimOptions &options = {});
MeasurementRecord run_noiseless_reference(const ShellSchedule &schedule, Sector sector, bool toggling = false);

/// One line per round: outcome bits in ascending operator order, packed into hex digits
/// (first outcome in the most significant bit of the first digit).
std::string dump_record(const MeasurementRecord &record, const SectorCircuit &circuit);

}  // namespace shellqec

#endif  // SHELLQEC_SIM_H
