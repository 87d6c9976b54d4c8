// Command-line driver: runs one experiment cell or a named suite and writes
// the aggregated metrics as CSV (plus optional JSON and plot columns).

#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "vodswarm/experiment.hpp"
#include "vodswarm/scenario.hpp"

using namespace vodswarm;

namespace {

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", path));
    out << text;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Discrete-event simulator of interactive BitTorrent-like VoD swarms"};

    std::string protocol = "eisp";
    std::string scenario = "movies";
    std::string setting = "su1";
    std::string profile = "mi";
    std::uint32_t swarm_size = 0;
    double sim_time = kDefaultHorizon;
    std::uint32_t runs = 10;
    std::uint64_t seed = 1;
    std::string config_path;
    std::string suite_name;
    std::string out_path;
    std::string json_path;
    std::string plot_dir;
    unsigned threads = 0;
    bool dump = false;
    bool no_playback = false;

    auto* o_protocol = app.add_option("--protocol", protocol, "sisp | eisp | rarest")
                           ->check(CLI::IsMember({"sisp", "eisp", "rarest"}));
    auto* o_scenario = app.add_option("--scenario", scenario, "all_media | music | tv | movies")
                           ->check(CLI::IsMember({"all_media", "music", "tv", "movies"}));
    auto* o_setting = app.add_option("--setting", setting, "su1 | su2 | su3")
                          ->check(CLI::IsMember({"su1", "su2", "su3"}));
    auto* o_profile = app.add_option("--profile", profile, "li | mi | hi")
                          ->check(CLI::IsMember({"li", "mi", "hi"}));
    auto* o_size = app.add_option("--swarm-size", swarm_size, "peers in steady state (seed included)")
                       ->check(CLI::Range(2U, 100000U));
    auto* o_time = app.add_option("--sim-time", sim_time, "seconds per replication")
                       ->check(CLI::PositiveNumber);
    auto* o_runs = app.add_option("--runs", runs, "independent replications")
                       ->check(CLI::Range(1U, 100000U));
    auto* o_seed = app.add_option("--seed", seed, "master seed");
    app.add_option("--config", config_path, "scenario file (INI)")->check(CLI::ExistingFile);
    app.add_option("--suite", suite_name, "competitiveness | optimization | scalability | interactivity")
        ->check(CLI::IsMember({"competitiveness", "optimization", "scalability", "interactivity"}));
    app.add_option("--out", out_path, "results CSV (stdout when omitted)");
    app.add_option("--json", json_path, "also write results as JSON");
    app.add_option("--emit-plot-data", plot_dir, "directory for plot column files");
    app.add_option("--threads", threads, "worker threads (0 = hardware)");
    app.add_flag("--dump-config", dump, "print the resolved scenario and exit");
    auto* o_no_play = app.add_flag("--no-playback", no_playback,
                                   "diagnostic: disable playback and interactivity");

    CLI11_PARSE(app, argc, argv);

    try {
        ScenarioConfig cfg;
        if (!config_path.empty()) {
            cfg = load_config(config_path);
            // Explicit flags override the file.
            if (o_scenario->count() || o_setting->count() || o_profile->count() ||
                o_protocol->count()) {
                ScenarioConfig p = preset(
                    o_scenario->count() ? scenario : std::string(to_string(cfg.f_type)),
                    o_setting->count() ? setting : cfg.setting_name,
                    o_profile->count() ? profile : cfg.profile.name,
                    parse_policy(o_protocol->count() ? protocol
                                                     : std::string(to_string(cfg.protocol))));
                if (o_scenario->count()) {
                    cfg.f_type = p.f_type;
                    cfg.f_size = p.f_size;
                    cfg.s_size = p.s_size;
                }
                if (o_setting->count()) {
                    cfg.setting = p.setting;
                    cfg.setting_name = p.setting_name;
                }
                if (o_profile->count()) cfg.profile = p.profile;
                cfg.protocol = p.protocol;
            }
        } else {
            cfg = preset(scenario, setting, profile, parse_policy(protocol));
        }
        if (config_path.empty() || o_time->count()) cfg.sim_time = sim_time;
        if (config_path.empty() || o_runs->count()) cfg.runs = runs;
        if (config_path.empty() || o_seed->count()) cfg.master_seed = seed;
        if (o_size->count()) cfg.s_size = swarm_size;
        if (o_no_play->count()) cfg.profile.playback = false;
        cfg.validate();

        if (dump) {
            std::cout << dump_config(cfg);
            return 0;
        }

        std::vector<ResultRow> rows;
        if (!suite_name.empty()) {
            const Suite suite = parse_suite(suite_name);
            rows = sweep(suite, cfg, threads);
            if (!plot_dir.empty()) {
                for (const auto& path : write_plot_data(suite, rows, plot_dir)) {
                    std::cerr << "wrote " << path.string() << '\n';
                }
            }
        } else {
            rows.push_back(run_experiment(cfg, threads));
            if (!plot_dir.empty()) {
                std::cerr << "--emit-plot-data applies to --suite runs only\n";
            }
        }

        const std::string csv = to_csv(rows);
        if (out_path.empty()) {
            std::cout << csv;
        } else {
            write_file(out_path, csv);
        }
        if (!json_path.empty()) write_file(json_path, to_json(rows));
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
