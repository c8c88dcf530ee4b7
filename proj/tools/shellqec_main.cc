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

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "shellqec/bounds.h"
#include "shellqec/lab.h"

using namespace shellqec;

namespace {

std::string read_file(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open " + path);
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Flags bound to a scratch config; after parsing they are layered over the --config file.
struct FlagSet {
    ExperimentConfig values;
    std::string sector = "both";
    std::string weights = "uniform";
    std::string config_file;
    std::string out;
    std::string dump_graph;
    std::vector<std::pair<CLI::Option *, std::function<void(ExperimentConfig &)>>> bindings;

    template <typename T>
    void bind(CLI::App *app, const std::string &name, T ExperimentConfig::*field, const std::string &help) {
        CLI::Option *opt = app->add_option(name, values.*field, help);
        if constexpr (std::is_same_v<T, std::vector<int>> || std::is_same_v<T, std::vector<double>>) {
            opt->delimiter(',');
        }
        bindings.push_back({opt, [this, field](ExperimentConfig &c) { c.*field = values.*field; }});
    }

    void add_common(CLI::App *app) {
        app->add_option("--config", config_file, "JSON file whose keys mirror these flags");
        app->add_option("--out", out, "write results to this file instead of stdout");
        bind(app, "--d", &ExperimentConfig::d, "code distance(s), comma separated");
        bind(app, "--eps", &ExperimentConfig::eps, "physical error rate(s), comma separated");
        bind(app, "--f", &ExperimentConfig::f, "fabrication defect rate per unit cell");
        bind(app, "--Q", &ExperimentConfig::Q, "hierarchy scale factor");
        bind(app, "--rounds", &ExperimentConfig::rounds, "rounds T (0 picks the default)");
        bind(app, "--shots", &ExperimentConfig::shots, "shots per map and point");
        bind(app, "--maps", &ExperimentConfig::maps, "operable defect maps per point");
        bind(app, "--seed", &ExperimentConfig::seed, "master seed");
        bind(app, "--defect-map", &ExperimentConfig::defect_map, "defect map JSON file");
        CLI::Option *s = app->add_option("--sector", sector, "x, z or both");
        bindings.push_back({s, [this](ExperimentConfig &c) { c.sector = parse_sector_choice(sector); }});
        CLI::Option *w = app->add_option("--weights", weights, "uniform or likelihood")
                             ->check(CLI::IsMember({"uniform", "likelihood"}));
        bindings.push_back({w, [this](ExperimentConfig &c) {
                                c.weights = weights == "uniform" ? WeightMode::Uniform : WeightMode::Likelihood;
                            }});
        CLI::Option *v = app->add_flag("--verify", values.verify, "cross-check detectors with a stabilizer simulation");
        bindings.push_back({v, [this](ExperimentConfig &c) { c.verify = values.verify; }});
    }

    void add_burst(CLI::App *app) {
        bind(app, "--burst-size", &ExperimentConfig::burst_size, "side of the square burst region");
        bind(app, "--burst-eps", &ExperimentConfig::burst_eps, "error rate inside the burst");
        bind(app, "--burst-t1", &ExperimentConfig::burst_t1, "first round of the burst");
        bind(app, "--burst-t3", &ExperimentConfig::burst_t3, "round the burst ends (default t1 + 50)");
        bind(app, "--window", &ExperimentConfig::window, "sliding window in rounds");
        bind(app, "--factor", &ExperimentConfig::factor, "event excess factor theta");
    }

    ExperimentConfig resolve(ExperimentMode mode) const {
        ExperimentConfig c;
        if (!config_file.empty()) {
            c = config_from_json(read_file(config_file));
        }
        for (const auto &[opt, apply] : bindings) {
            if (opt->count() > 0) {
                apply(c);
            }
        }
        c.mode = mode;
        return c;
    }
};

void emit(const std::string &path, const std::string &text) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write " + path);
    }
    out << text;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"shellqec: surface codes on defective arrays with shell schedules"};
    app.require_subcommand(1);

    FlagSet memory_flags, cosmic_flags, silent_flags, bounds_flags, defects_flags;

    CLI::App *memory = app.add_subcommand("memory", "logical memory experiment; prints CSV rows");
    memory_flags.add_common(memory);
    CLI::Option *full = memory->add_flag("--full-sim", memory_flags.values.full_sim,
                                         "simulate measurement records instead of sampling graph edges");
    memory_flags.bindings.push_back({full, [&](ExperimentConfig &c) { c.full_sim = memory_flags.values.full_sim; }});
    memory->add_option("--dump-graph", memory_flags.dump_graph,
                       "write the first map's detector graphs to PREFIX_<sector>.txt");

    CLI::App *cosmic = app.add_subcommand("cosmic", "cosmic-ray burst with online detection and isolation");
    cosmic_flags.add_common(cosmic);
    cosmic_flags.add_burst(cosmic);

    CLI::App *silent = app.add_subcommand("silent", "stuck-at stabilizer detection");
    silent_flags.add_common(silent);
    silent_flags.bind(silent, "--window", &ExperimentConfig::window, "consecutive firing rounds needed to flag");
    silent_flags.bind(silent, "--stuck-op", &ExperimentConfig::stuck_op, "operator id (default: central check)");
    silent_flags.bind(silent, "--stuck-onset", &ExperimentConfig::stuck_onset, "first stuck round");
    bool plain = false;
    CLI::Option *plain_opt = silent->add_flag("--plain", plain, "measure without the toggling frame");
    silent_flags.bindings.push_back({plain_opt, [&](ExperimentConfig &c) { c.toggling = !plain; }});

    CLI::App *bounds = app.add_subcommand("bounds", "proof constants and analytic bounds as JSON");
    bounds_flags.add_common(bounds);
    bounds_flags.bind(bounds, "--m", &ExperimentConfig::m, "highest cluster level");
    bounds_flags.bind(bounds, "--log10-eps", &ExperimentConfig::log10_eps, "log10 of the error rate");
    bounds_flags.bind(bounds, "--panels", &ExperimentConfig::panels, "injection panels (default m + 2)");

    CLI::App *defects = app.add_subcommand("defects", "sample or inspect a defect map");
    defects_flags.add_common(defects);

    CLI11_PARSE(app, argc, argv);

    try {
        if (memory->parsed()) {
            ExperimentConfig c = memory_flags.resolve(ExperimentMode::Memory);
            std::ostringstream csv;
            csv << memory_csv_header() << '\n';
            run_memory(c, [&](const MemoryRow &row) {
                csv << to_csv(row) << '\n';
                std::cerr << "d=" << row.d << " eps=" << row.eps << " failures=" << row.failures << "/" << row.shots
                          << " discards=" << row.discards << " (" << row.seconds << " s)\n";
            });
            emit(memory_flags.out, csv.str());
            if (!memory_flags.dump_graph.empty()) {
                PreparedMap pm = c.defect_map.empty()
                                     ? prepare_map(sample_defects(c.d.at(0), c.f, mix_seed(c.seed, c.d.at(0), 0)), c.Q,
                                                   c.rounds)
                                     : prepare_map(read_defect_map(c.defect_map), c.Q, c.rounds);
                if (!pm.schedule) {
                    throw std::runtime_error("first defect map is not operable: " + pm.discard_reason);
                }
                for (Sector s : sectors_of(c.sector)) {
                    auto model =
                        build_sector_model(pm.schedule, s, NoiseParams::uniform(c.eps.at(0)), c.weights, c.verify);
                    emit(memory_flags.dump_graph + "_" + to_string(s) + ".txt", model->graph.dump());
                }
            }
        } else if (cosmic->parsed()) {
            ExperimentConfig c = cosmic_flags.resolve(ExperimentMode::Cosmic);
            if (!cosmic->get_option("--eps")->count() && cosmic_flags.config_file.empty()) {
                c.eps = {0.003};
            }
            emit(cosmic_flags.out, to_json(run_cosmic(c)) + "\n");
        } else if (silent->parsed()) {
            ExperimentConfig c = silent_flags.resolve(ExperimentMode::Silent);
            if (!silent->get_option("--eps")->count() && silent_flags.config_file.empty()) {
                c.eps = {0.0};
            }
            if (!silent->get_option("--window")->count() && silent_flags.config_file.empty()) {
                c.window = 1;
            }
            emit(silent_flags.out, to_json(run_silent(c)) + "\n");
        } else if (bounds->parsed()) {
            ExperimentConfig c = bounds_flags.resolve(ExperimentMode::Bounds);
            int panels = c.panels >= 0 ? c.panels : c.m + 2;
            emit(bounds_flags.out, bounds_report_json(c.Q, c.d.at(0), c.m, c.log10_eps, panels) + "\n");
        } else if (defects->parsed()) {
            ExperimentConfig c = defects_flags.resolve(ExperimentMode::Defects);
            DefectMap map = c.defect_map.empty() ? sample_defects(c.d.at(0), c.f, c.seed) : read_defect_map(c.defect_map);
            PreparedMap pm = prepare_map(map, c.Q, c.rounds);
            nlohmann::ordered_json j;
            j["d"] = map.d;
            j["f"] = map.f;
            j["defective"] = map.defective.size();
            j["Q"] = c.Q;
            j["m"] = pm.decomp.m;
            j["operable"] = pm.discard_reason.empty();
            if (!pm.discard_reason.empty()) {
                j["discard_reason"] = pm.discard_reason;
            }
            auto clusters = nlohmann::ordered_json::array();
            for (const Cluster &cl : pm.decomp.clusters) {
                clusters.push_back({{"level", cl.level},
                                    {"cells", cl.cells.size()},
                                    {"bbox", {cl.bbox.x0, cl.bbox.y0, cl.bbox.x1, cl.bbox.y1}}});
            }
            j["clusters"] = clusters;
            CodeLayout layout(map.d);
            j["good_injection_points"] = good_injection_points(pm.decomp, layout, c.Q).size();
            if (pm.schedule) {
                j["rounds"] = pm.schedule->T;
                j["punctures"] = pm.schedule->punctures.size();
            }
            std::cout << j.dump(2) << '\n';
            if (!defects_flags.out.empty()) {
                write_defect_map(map, defects_flags.out);
            }
        }
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
