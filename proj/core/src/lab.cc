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

#include "shellqec/lab.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace shellqec {

using json = nlohmann::ordered_json;

const char *to_string(ExperimentMode mode) {
    switch (mode) {
        case ExperimentMode::Memory:
            return "memory";
        case ExperimentMode::Cosmic:
            return "cosmic";
        case ExperimentMode::Silent:
            return "silent";
        case ExperimentMode::Bounds:
            return "bounds";
        case ExperimentMode::Defects:
            return "defects";
    }
    return "?";
}

ExperimentMode parse_mode(const std::string &text) {
    for (ExperimentMode m : {ExperimentMode::Memory, ExperimentMode::Cosmic, ExperimentMode::Silent,
                             ExperimentMode::Bounds, ExperimentMode::Defects}) {
        if (text == to_string(m)) {
            return m;
        }
    }
    throw std::invalid_argument("unknown mode '" + text + "'");
}

const char *to_string(SectorChoice choice) {
    switch (choice) {
        case SectorChoice::X:
            return "x";
        case SectorChoice::Z:
            return "z";
        case SectorChoice::Both:
            return "both";
    }
    return "?";
}

SectorChoice parse_sector_choice(const std::string &text) {
    std::string t = text;
    std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return (char)std::tolower(c); });
    if (t == "x") {
        return SectorChoice::X;
    }
    if (t == "z") {
        return SectorChoice::Z;
    }
    if (t == "both") {
        return SectorChoice::Both;
    }
    throw std::invalid_argument("sector must be x, z or both");
}

std::vector<Sector> sectors_of(SectorChoice choice) {
    switch (choice) {
        case SectorChoice::X:
            return {Sector::X};
        case SectorChoice::Z:
            return {Sector::Z};
        case SectorChoice::Both:
            break;
    }
    return {Sector::X, Sector::Z};
}

void ExperimentConfig::validate() const {
    if (shots < 1) {
        throw std::invalid_argument("shots must be at least 1");
    }
    if (rounds < 0) {
        throw std::invalid_argument("rounds must be positive (or 0 for the default)");
    }
    if (maps < 1) {
        throw std::invalid_argument("maps must be at least 1");
    }
    if (Q < 2) {
        throw std::invalid_argument("Q must be at least 2");
    }
    if (!(f >= 0 && f <= 1)) {
        throw std::invalid_argument("f must lie in [0, 1]");
    }
    for (double e : eps) {
        if (!(e >= 0 && e <= 0.5)) {
            throw std::invalid_argument("eps must lie in [0, 0.5]");
        }
    }
    for (int dd : d) {
        if (dd < 3 || dd % 2 == 0) {
            throw std::invalid_argument("d must be odd and at least 3");
        }
    }
    if (window < 1) {
        throw std::invalid_argument("window must be at least 1");
    }
    if (!(factor > 1)) {
        throw std::invalid_argument("factor must exceed 1");
    }
}

std::string config_to_json(const ExperimentConfig &c) {
    json j;
    j["mode"] = to_string(c.mode);
    j["d"] = c.d;
    j["eps"] = c.eps;
    j["f"] = c.f;
    j["Q"] = c.Q;
    j["rounds"] = c.rounds;
    j["shots"] = c.shots;
    j["maps"] = c.maps;
    j["seed"] = c.seed;
    j["sector"] = to_string(c.sector);
    j["weights"] = c.weights == WeightMode::Uniform ? "uniform" : "likelihood";
    j["defect-map"] = c.defect_map;
    j["full-sim"] = c.full_sim;
    j["verify"] = c.verify;
    j["burst-size"] = c.burst_size;
    j["burst-eps"] = c.burst_eps;
    j["burst-t1"] = c.burst_t1;
    j["burst-t3"] = c.burst_end();
    j["window"] = c.window;
    j["factor"] = c.factor;
    j["toggling"] = c.toggling;
    j["stuck-op"] = c.stuck_op;
    j["stuck-onset"] = c.stuck_onset;
    j["m"] = c.m;
    j["log10-eps"] = c.log10_eps;
    j["panels"] = c.panels;
    return j.dump(2);
}

ExperimentConfig config_from_json(const std::string &text, ExperimentConfig c) {
    json j = json::parse(text);
    if (!j.is_object()) {
        throw std::invalid_argument("config must be a JSON object");
    }
    auto list_of = [&](const char *key, auto &field) {
        if (!j.contains(key)) {
            return;
        }
        using T = typename std::decay_t<decltype(field)>::value_type;
        field.clear();
        if (j[key].is_array()) {
            for (const auto &v : j[key]) {
                field.push_back(v.get<T>());
            }
        } else {
            field.push_back(j[key].get<T>());
        }
    };
    auto get = [&](const char *key, auto &field) {
        if (j.contains(key)) {
            field = j[key].get<std::decay_t<decltype(field)>>();
        }
    };
    if (j.contains("mode")) {
        c.mode = parse_mode(j["mode"].get<std::string>());
    }
    list_of("d", c.d);
    list_of("eps", c.eps);
    get("f", c.f);
    get("Q", c.Q);
    get("rounds", c.rounds);
    get("shots", c.shots);
    get("maps", c.maps);
    get("seed", c.seed);
    if (j.contains("sector")) {
        c.sector = parse_sector_choice(j["sector"].get<std::string>());
    }
    if (j.contains("weights")) {
        std::string w = j["weights"].get<std::string>();
        if (w != "uniform" && w != "likelihood") {
            throw std::invalid_argument("weights must be uniform or likelihood");
        }
        c.weights = w == "uniform" ? WeightMode::Uniform : WeightMode::Likelihood;
    }
    get("defect-map", c.defect_map);
    get("full-sim", c.full_sim);
    get("verify", c.verify);
    get("burst-size", c.burst_size);
    get("burst-eps", c.burst_eps);
    get("burst-t1", c.burst_t1);
    get("burst-t3", c.burst_t3);
    get("window", c.window);
    get("factor", c.factor);
    get("toggling", c.toggling);
    get("stuck-op", c.stuck_op);
    get("stuck-onset", c.stuck_onset);
    get("m", c.m);
    get("log10-eps", c.log10_eps);
    get("panels", c.panels);
    return c;
}

std::unique_ptr<SectorModel> build_sector_model(std::shared_ptr<const ShellSchedule> schedule, Sector sector,
                                                const NoiseParams &noise, WeightMode weights, bool verify) {
    auto model = std::make_unique<SectorModel>();
    model->schedule = std::move(schedule);
    model->circuit = compile_sector(*model->schedule, sector);
    DetectorOptions dopt;
    dopt.verify = verify;
    model->detectors = build_detectors(model->circuit, dopt);
    GraphOptions gopt;
    gopt.mode = weights;
    model->graph = build_graph(model->circuit, model->detectors, noise, gopt);
    model->decoder = std::make_unique<Decoder>(model->graph);
    return model;
}

EdgeSampler::EdgeSampler(const DetectorGraph &graph) : graph_(graph), flip_(graph.num_nodes, 0) {
    std::map<double, std::vector<int>> by_p;
    for (int k = 0; k < (int)graph.edges.size(); k++) {
        by_p[graph.edges[k].p].push_back(k);
    }
    groups_.assign(by_p.begin(), by_p.end());
}

uint8_t EdgeSampler::sample(Rng &rng, std::vector<int> &events) {
    events.clear();
    uint8_t obs = 0;
    std::vector<int> touched;
    auto hit = [&](int k) {
        const GraphEdge &e = graph_.edges[k];
        obs ^= e.obs;
        for (int node : {e.u, e.v}) {
            if (!graph_.is_boundary(node)) {
                if (!flip_[node]) {
                    touched.push_back(node);
                }
                flip_[node] ^= 1;
            }
        }
    };
    for (const auto &[p, edges] : groups_) {
        if (p >= 1) {
            for (int k : edges) {
                hit(k);
            }
            continue;
        }
        double log_q = std::log1p(-p);
        size_t i = 0;
        while (true) {
            double u = 1.0 - (double)(rng() >> 11) * 0x1.0p-53;
            double gap = std::floor(std::log(u) / log_q);
            if (gap >= (double)(edges.size() - i)) {
                break;
            }
            i += (size_t)gap;
            hit(edges[i]);
            if (++i >= edges.size()) {
                break;
            }
        }
    }
    for (int node : touched) {
        if (flip_[node]) {
            events.push_back(node);
            flip_[node] = 0;
        }
    }
    std::sort(events.begin(), events.end());
    return obs;
}

std::string memory_csv_header() { return "mode,d,eps,f,Q,rounds,shots,failures,rate,ci_lo,ci_hi,discards,seed"; }

std::string to_csv(const MemoryRow &r) {
    std::ostringstream out;
    out.precision(10);
    out << "memory," << r.d << ',' << r.eps << ',' << r.f << ',' << r.Q << ',' << r.rounds << ',' << r.shots << ','
        << r.failures << ',' << r.rate.rate << ',' << r.rate.lo << ',' << r.rate.hi << ',' << r.discards << ','
        << r.seed;
    return out.str();
}

PreparedMap prepare_map(const DefectMap &map, int Q, int rounds) {
    PreparedMap pm;
    pm.map = map;
    pm.decomp = decompose(map, Q);
    if (!is_operable(pm.decomp, map.d)) {
        pm.discard_reason = "cluster level too high for the array";
        return pm;
    }
    auto layout = std::make_shared<const CodeLayout>(map.d);
    try {
        std::vector<Puncture> ps = build_punctures(pm.decomp, *layout);
        int T = rounds > 0 ? rounds : default_rounds(map.d, Q, pm.decomp.m);
        auto sched = std::make_shared<ShellSchedule>(build_schedule(layout, std::move(ps), T, Q));
        // The logical strings must avoid every puncture.
        logical_representative(*layout, Pauli::X, sched->forbidden_cells());
        logical_representative(*layout, Pauli::Z, sched->forbidden_cells());
        pm.schedule = std::move(sched);
    } catch (const InoperableError &e) {
        pm.discard_reason = e.what();
    } catch (const DisconnectedError &e) {
        pm.discard_reason = e.what();
    }
    return pm;
}

namespace {

using Clock = std::chrono::steady_clock;

struct MapModels {
    PreparedMap prepared;
    std::vector<std::unique_ptr<SectorModel>> sectors;
};

// One shot on every requested sector; a shot fails when any sector is decoded wrongly.
class ShotRunner {
   public:
    ShotRunner(const std::vector<std::unique_ptr<SectorModel>> &models, const NoiseParams &noise, bool full_sim)
        : models_(models), noise_(noise), full_sim_(full_sim) {
        for (const auto &m : models_) {
            samplers_.push_back(std::make_unique<EdgeSampler>(m->graph));
            sims_.push_back(std::make_unique<FrameSimulator>(m->circuit, noise));
        }
    }

    bool fails(uint64_t shot_seed) {
        bool failed = false;
        for (size_t s = 0; s < models_.size(); s++) {
            uint64_t seed = mix_seed(shot_seed, (uint64_t)models_[s]->circuit.sector);
            uint8_t obs;
            if (full_sim_) {
                MeasurementRecord rec = sims_[s]->run(seed);
                events_ = extract_events(rec, models_[s]->detectors);
                obs = rec.observable_flip;
            } else {
                Rng rng(seed);
                obs = samplers_[s]->sample(rng, events_);
            }
            Matching m = models_[s]->decoder->decode(events_);
            failed = failed || is_logical_failure(m, obs);
        }
        return failed;
    }

   private:
    const std::vector<std::unique_ptr<SectorModel>> &models_;
    NoiseParams noise_;
    bool full_sim_;
    std::vector<std::unique_ptr<EdgeSampler>> samplers_;
    std::vector<std::unique_ptr<FrameSimulator>> sims_;
    std::vector<int> events_;
};

}  // namespace

std::vector<MemoryRow> run_memory(const ExperimentConfig &config, const std::function<void(const MemoryRow &)> &on_row) {
    config.validate();
    std::vector<MemoryRow> rows;
    std::vector<Sector> sectors = sectors_of(config.sector);
    for (size_t di = 0; di < config.d.size(); di++) {
        int d = config.d[di];
        // Draw the maps once per distance so every eps sees the same arrays.
        std::vector<PreparedMap> maps;
        int64_t discards = 0;
        if (!config.defect_map.empty()) {
            DefectMap dm = read_defect_map(config.defect_map);
            if (dm.d != d) {
                throw std::invalid_argument("defect map size does not match d");
            }
            PreparedMap pm = prepare_map(dm, config.Q, config.rounds);
            if (!pm.discard_reason.empty()) {
                throw InoperableError("defect map is not operable: " + pm.discard_reason);
            }
            maps.push_back(std::move(pm));
        } else {
            int attempts = config.max_map_attempts > 0 ? config.max_map_attempts : 200 * config.maps;
            for (int a = 0; a < attempts && (int)maps.size() < config.maps; a++) {
                DefectMap dm = sample_defects(d, config.f, mix_seed(config.seed, (uint64_t)d, (uint64_t)a));
                PreparedMap pm = prepare_map(dm, config.Q, config.rounds);
                if (pm.discard_reason.empty()) {
                    maps.push_back(std::move(pm));
                } else {
                    discards++;
                }
            }
        }
        int rounds = 0;
        for (const PreparedMap &pm : maps) {
            rounds = std::max(rounds, pm.schedule->T);
        }

        for (size_t ei = 0; ei < config.eps.size(); ei++) {
            auto start = Clock::now();
            NoiseParams noise = NoiseParams::uniform(config.eps[ei]);
            MemoryRow row;
            row.d = d;
            row.eps = config.eps[ei];
            row.f = config.f;
            row.Q = config.Q;
            row.rounds = rounds;
            row.discards = discards;
            row.maps = (int)maps.size();
            row.seed = config.seed;
            for (size_t mi = 0; mi < maps.size(); mi++) {
                std::vector<std::unique_ptr<SectorModel>> models;
                for (Sector s : sectors) {
                    models.push_back(build_sector_model(maps[mi].schedule, s, noise, config.weights, config.verify));
                }
                ShotRunner runner(models, noise, config.full_sim);
                uint64_t point_seed = mix_seed(config.seed, mix_seed((uint64_t)d, (uint64_t)ei), (uint64_t)mi);
                for (int64_t shot = 0; shot < config.shots; shot++) {
                    row.failures += runner.fails(mix_seed(point_seed, (uint64_t)shot));
                }
                row.shots += config.shots;
            }
            row.rate = wilson_interval(row.failures, row.shots);
            row.seconds = std::chrono::duration<double>(Clock::now() - start).count();
            if (on_row) {
                on_row(row);
            }
            rows.push_back(row);
        }
    }
    return rows;
}

BurstDetection detect_bursts(const std::vector<EventSite> &events, int d, int T, const std::vector<double> &baseline,
                             int w, double theta) {
    if (w < 1) {
        throw std::invalid_argument("window must be at least 1");
    }
    BurstDetection result;
    if (events.empty() || !(theta < std::numeric_limits<double>::infinity())) {
        return result;
    }
    int cells = d * d;
    std::vector<std::vector<int>> per_round(T + 1, std::vector<int>(cells, 0));
    for (const EventSite &e : events) {
        if (e.round >= 0 && e.round <= T && e.cell.x >= 0 && e.cell.y >= 0 && e.cell.x < d && e.cell.y < d) {
            per_round[e.round][e.cell.y * d + e.cell.x]++;
        }
    }
    const int radius = 2;
    std::vector<double> expected(cells, 0);
    for (int y = 0; y < d; y++) {
        for (int x = 0; x < d; x++) {
            for (int yy = std::max(0, y - radius); yy <= std::min(d - 1, y + radius); yy++) {
                for (int xx = std::max(0, x - radius); xx <= std::min(d - 1, x + radius); xx++) {
                    expected[y * d + x] += baseline[yy * d + xx];
                }
            }
        }
    }
    std::vector<int> window(cells, 0);
    for (int t = 0; t <= T; t++) {
        for (int c = 0; c < cells; c++) {
            window[c] += per_round[t][c];
            if (t - w >= 0) {
                window[c] -= per_round[t - w][c];
            }
        }
        std::vector<uint8_t> flagged(cells, 0);
        int count = 0;
        for (int y = 0; y < d; y++) {
            for (int x = 0; x < d; x++) {
                if (window[y * d + x] == 0) {
                    continue;
                }
                int near = 0;
                for (int yy = std::max(0, y - radius); yy <= std::min(d - 1, y + radius); yy++) {
                    for (int xx = std::max(0, x - radius); xx <= std::min(d - 1, x + radius); xx++) {
                        near += window[yy * d + xx];
                    }
                }
                if (near > theta * expected[y * d + x] * w) {
                    flagged[y * d + x] = 1;
                    count++;
                }
            }
        }
        if (count == 0) {
            continue;
        }
        // Largest 8-connected group of flagged cells; ties go to the first found in row-major order.
        std::vector<int> label(cells, -1);
        CellRect best{0, 0, -1, -1};
        int best_size = 0;
        for (int start = 0; start < cells; start++) {
            if (!flagged[start] || label[start] >= 0) {
                continue;
            }
            std::vector<int> stack{start};
            label[start] = start;
            CellRect box{start % d, start / d, start % d, start / d};
            int size = 0;
            while (!stack.empty()) {
                int c = stack.back();
                stack.pop_back();
                size++;
                int cx = c % d, cy = c / d;
                box.x0 = std::min(box.x0, cx);
                box.x1 = std::max(box.x1, cx);
                box.y0 = std::min(box.y0, cy);
                box.y1 = std::max(box.y1, cy);
                for (int dy = -1; dy <= 1; dy++) {
                    for (int dx = -1; dx <= 1; dx++) {
                        int nx = cx + dx, ny = cy + dy;
                        if (nx < 0 || ny < 0 || nx >= d || ny >= d) {
                            continue;
                        }
                        int n = ny * d + nx;
                        if (flagged[n] && label[n] < 0) {
                            label[n] = start;
                            stack.push_back(n);
                        }
                    }
                }
            }
            if (size > best_size) {
                best_size = size;
                best = box;
            }
        }
        CellRect region = best.dilated(1);
        region.x0 = std::max(region.x0, 0);
        region.y0 = std::max(region.y0, 0);
        region.x1 = std::min(region.x1, d - 1);
        region.y1 = std::min(region.y1, d - 1);
        result.detected = true;
        result.round = t;
        result.region = region;
        result.flagged_cells = count;
        return result;
    }
    return result;
}

std::vector<double> analytic_baseline(const SectorModel &model) {
    const DetectorGraph &g = model.graph;
    int d = model.schedule->code().d();
    std::vector<double> keep(g.num_detectors, 1.0);  // product of (1 - 2p) over incident edges
    for (const GraphEdge &e : g.edges) {
        for (int node : {e.u, e.v}) {
            if (!g.is_boundary(node)) {
                keep[node] *= 1 - 2 * e.p;
            }
        }
    }
    std::vector<double> per_cell(d * d, 0);
    for (const Detector &det : model.detectors) {
        if (det.cell.x >= 0 && det.cell.y >= 0 && det.cell.x < d && det.cell.y < d) {
            per_cell[det.cell.y * d + det.cell.x] += (1 - keep[det.id]) / 2;
        }
    }
    int rounds = std::max(1, model.schedule->T);
    for (double &v : per_cell) {
        v /= rounds;
    }
    return per_cell;
}

namespace {

std::vector<EventSite> sites_of(const std::vector<int> &events, const std::vector<Detector> &detectors) {
    std::vector<EventSite> out;
    out.reserve(events.size());
    for (int id : events) {
        out.push_back({detectors[id].cell, detectors[id].round});
    }
    return out;
}

CellRect centered_square(int d, int size) {
    int x0 = (d - size) / 2;
    return {x0, x0, x0 + size - 1, x0 + size - 1};
}

}  // namespace

BurstReport run_cosmic(const ExperimentConfig &config) {
    config.validate();
    int d = config.d.at(0);
    double eps = config.eps.at(0);
    BurstReport report;
    report.t1 = config.burst_t1;
    report.t3 = config.burst_end();
    report.T = config.rounds > 0 ? config.rounds : report.t3 + d;
    report.burst_region = centered_square(d, config.burst_size);
    if (report.t1 < 0 || report.t3 < report.t1 || report.t3 > report.T) {
        throw std::invalid_argument("burst must satisfy 0 <= t1 <= t3 <= T");
    }
    report.latency_histogram.assign(report.T + 1, 0);

    auto layout = std::make_shared<const CodeLayout>(d);
    auto base = std::make_shared<const ShellSchedule>(build_schedule(layout, {}, report.T, config.Q, {true}));
    NoiseParams model_noise = NoiseParams::uniform(eps);
    NoiseParams burst_noise = model_noise;
    burst_noise.bursts.push_back({report.burst_region, report.t1, report.t3, config.burst_eps});

    std::vector<Sector> sectors = sectors_of(config.sector);
    std::vector<std::unique_ptr<SectorModel>> control;
    std::vector<double> baseline(d * d, 0);
    for (Sector s : sectors) {
        control.push_back(build_sector_model(base, s, model_noise, config.weights, config.verify));
        std::vector<double> b = analytic_baseline(*control.back());
        for (int c = 0; c < d * d; c++) {
            baseline[c] += b[c];
        }
    }

    using Key = std::tuple<int, int, int, int, int>;
    std::map<Key, std::vector<std::unique_ptr<SectorModel>>> isolation_cache;
    std::set<Key> inoperable;
    int64_t control_fail = 0, isolation_fail = 0;
    double latency_sum = 0;

    for (int64_t shot = 0; shot < config.shots; shot++) {
        uint64_t shot_seed = mix_seed(config.seed, (uint64_t)shot);
        std::vector<std::vector<int>> events(sectors.size());
        std::vector<uint8_t> obs(sectors.size());
        std::vector<EventSite> sites;
        bool failed = false;
        for (size_t s = 0; s < sectors.size(); s++) {
            FrameSimulator sim(control[s]->circuit, burst_noise);
            MeasurementRecord rec = sim.run(mix_seed(shot_seed, (uint64_t)sectors[s]));
            events[s] = extract_events(rec, control[s]->detectors);
            obs[s] = rec.observable_flip;
            Matching m = control[s]->decoder->decode(events[s]);
            failed = failed || is_logical_failure(m, rec);
            std::vector<EventSite> part = sites_of(events[s], control[s]->detectors);
            sites.insert(sites.end(), part.begin(), part.end());
        }
        control_fail += failed;

        BurstDetection det = detect_bursts(sites, d, report.T, baseline, config.window, config.factor);
        bool isolated = false;
        if (det.detected) {
            report.detected++;
            if (det.round < report.t1) {
                report.false_alarms++;
            } else {
                int latency = det.round - report.t1;
                report.latency_histogram[latency]++;
                report.max_latency = std::max(report.max_latency, latency);
                latency_sum += latency;
            }
            int t_open = det.round + 1;
            Key key{t_open, det.region.x0, det.region.y0, det.region.x1, det.region.y1};
            if (t_open < report.t3 && !inoperable.count(key)) {
                auto it = isolation_cache.find(key);
                if (it == isolation_cache.end()) {
                    try {
                        auto edited = std::make_shared<const ShellSchedule>(
                            edit_schedule_for_burst(*base, det.region, t_open, report.t3));
                        std::vector<std::unique_ptr<SectorModel>> models;
                        for (Sector s : sectors) {
                            models.push_back(build_sector_model(edited, s, model_noise, config.weights, config.verify));
                        }
                        it = isolation_cache.emplace(key, std::move(models)).first;
                    } catch (const InoperableError &) {
                        inoperable.insert(key);
                    } catch (const std::invalid_argument &) {
                        inoperable.insert(key);
                    }
                }
                if (it != isolation_cache.end()) {
                    isolated = true;
                    bool iso_failed = false;
                    for (size_t s = 0; s < sectors.size(); s++) {
                        FrameSimulator sim(it->second[s]->circuit, burst_noise);
                        MeasurementRecord rec = sim.run(mix_seed(shot_seed, (uint64_t)sectors[s]));
                        Matching m = it->second[s]->decoder->decode(extract_events(rec, it->second[s]->detectors));
                        iso_failed = iso_failed || is_logical_failure(m, rec);
                    }
                    isolation_fail += iso_failed;
                }
            }
            if (!isolated) {
                report.isolation_fallbacks++;
            }
        }
        if (!isolated) {
            isolation_fail += failed;
        }
    }
    report.latency_histogram.resize(report.max_latency + 1);
    report.shots = config.shots;
    int64_t timely = report.detected - report.false_alarms;
    report.mean_latency = timely > 0 ? latency_sum / (double)timely : 0;
    report.control = wilson_interval(control_fail, config.shots);
    report.isolation = wilson_interval(isolation_fail, config.shots);
    return report;
}

std::string to_json(const BurstReport &r) {
    json j;
    j["mode"] = "cosmic";
    j["t1"] = r.t1;
    j["t3"] = r.t3;
    j["rounds"] = r.T;
    j["burst_region"] = {r.burst_region.x0, r.burst_region.y0, r.burst_region.x1, r.burst_region.y1};
    j["shots"] = r.shots;
    j["detected"] = r.detected;
    j["false_alarms"] = r.false_alarms;
    j["max_latency"] = r.max_latency;
    j["mean_latency"] = r.mean_latency;
    j["latency_histogram"] = r.latency_histogram;
    j["isolation_fallbacks"] = r.isolation_fallbacks;
    j["control"] = {{"rate", r.control.rate}, {"ci_lo", r.control.lo}, {"ci_hi", r.control.hi},
                    {"failures", r.control.hits}};
    j["isolation"] = {{"rate", r.isolation.rate}, {"ci_lo", r.isolation.lo}, {"ci_hi", r.isolation.hi},
                      {"failures", r.isolation.hits}};
    return j.dump(2);
}

SilentReport run_silent(const ExperimentConfig &config) {
    config.validate();
    SilentReport report;
    report.d = config.d.at(0);
    report.onset = config.stuck_onset;
    report.toggling = config.toggling;
    double eps = config.eps.empty() ? 0.0 : config.eps[0];
    Sector sector = config.sector == SectorChoice::X ? Sector::X : Sector::Z;

    auto layout = std::make_shared<const CodeLayout>(report.d);
    int T = config.rounds > 0 ? config.rounds : std::max(report.d, config.stuck_onset + 2);
    auto sched = std::make_shared<const ShellSchedule>(build_schedule(layout, {}, T, config.Q, {true}));
    const CodeLayout &L = *layout;

    int op = config.stuck_op;
    if (op < 0) {
        int c = report.d / 2;
        int site = sector == Sector::Z ? L.star_at(c - 1, c) : L.plaquette_at(c, c - 1);
        OpKind kind = sector == Sector::Z ? OpKind::Star : OpKind::Plaquette;
        for (const OperatorSpec &spec : sched->operators) {
            if (spec.kind == kind && spec.site == site) {
                op = spec.id;
                break;
            }
        }
    }
    if (op < 0 || op >= (int)sched->operators.size() || sched->operators[op].type != detecting_type(sector)) {
        throw std::invalid_argument("stuck operator is not a check of the simulated sector");
    }
    report.op = op;

    NoiseParams noise = NoiseParams::uniform(eps);
    SectorCircuit circuit = compile_sector(*sched, sector);
    std::vector<Detector> dets = build_detectors(circuit, {config.verify, 3, 7});
    set_references(dets, run_noiseless_reference(*sched, sector, config.toggling));

    // Comparison detectors by (operator, round of the later measurement).
    std::map<std::pair<int, int>, int> comparison;
    for (const Detector &det : dets) {
        if (det.kind != DetectorKind::BulkComparison && det.kind != DetectorKind::SpaceBoundary) {
            continue;
        }
        int m = det.meas.back();
        comparison[{circuit.meas[m].op, circuit.meas[m].round}] = det.id;
    }

    SimOptions opts;
    opts.toggling = config.toggling;
    opts.stuck.push_back({op, config.stuck_onset});
    FrameSimulator sim(circuit, noise, opts);
    int w = config.window;
    for (int64_t shot = 0; shot < config.shots; shot++) {
        MeasurementRecord rec = sim.run(mix_seed(config.seed, (uint64_t)shot));
        std::vector<int> events = extract_events(rec, dets);
        std::vector<uint8_t> fired(dets.size(), 0);
        for (int id : events) {
            fired[id] = 1;
        }
        // A check is flagged at the first round of a run of w consecutive firing comparisons.
        std::map<int, int> run_start, run_len, flag_round;
        for (const auto &[key, id] : comparison) {
            auto [o, t] = key;
            if (flag_round.count(o)) {
                continue;
            }
            if (fired[id]) {
                if (run_len[o] == 0 || run_start[o] + run_len[o] != t) {
                    run_start[o] = t;
                    run_len[o] = 0;
                }
                run_len[o] = t - run_start[o] + 1;
                if (run_len[o] >= w) {
                    flag_round[o] = run_start[o];
                }
            } else {
                run_len[o] = 0;
            }
        }
        for (const auto &[o, r] : flag_round) {
            if (o == op) {
                report.flagged++;
                report.flagged_at_onset += r == config.stuck_onset;
                if (shot == 0) {
                    report.first_flag_round = r;
                }
            } else {
                report.false_flags++;
            }
        }
    }
    report.shots = config.shots;
    return report;
}

std::string to_json(const SilentReport &r) {
    json j;
    j["mode"] = "silent";
    j["d"] = r.d;
    j["op"] = r.op;
    j["onset"] = r.onset;
    j["toggling"] = r.toggling;
    j["shots"] = r.shots;
    j["flagged"] = r.flagged;
    j["flagged_at_onset"] = r.flagged_at_onset;
    j["first_flag_round"] = r.first_flag_round;
    j["false_flags"] = r.false_flags;
    return j.dump(2);
}

}  // namespace shellqec
