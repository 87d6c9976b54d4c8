#include "vodswarm/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <fstream>
#include <mutex>
#include <stdexcept>
#include <thread>

#include <fmt/format.h>
#include <json.hpp>

#include "vodswarm/simulation.hpp"

namespace vodswarm {

std::uint64_t replication_seed(std::uint64_t master_seed, std::uint32_t replication) {
    return mix64(master_seed * 0x9e3779b97f4a7c15ULL + replication);
}

std::vector<RunOutput> run_replications(const ScenarioConfig& cfg, unsigned threads) {
    cfg.validate();
    std::vector<RunOutput> out(cfg.runs);
    if (threads == 0) threads = std::max(1U, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, cfg.runs);

    std::atomic<std::uint32_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (;;) {
            const std::uint32_t r = next++;
            if (r >= cfg.runs) return;
            try {
                Simulation sim(cfg, replication_seed(cfg.master_seed, r));
                sim.run_until(cfg.sim_time);
                out[r] = sim.output();
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next = cfg.runs;
                return;
            }
        }
    };
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);
    return out;
}

ResultRow run_experiment(const ScenarioConfig& cfg, unsigned threads) {
    const auto runs = run_replications(cfg, threads);
    ResultRow row;
    row.protocol = std::string(to_string(cfg.protocol));
    row.scenario = std::string(to_string(cfg.f_type));
    row.setting = cfg.setting_name;
    row.profile = cfg.profile.name;
    row.s_size = cfg.s_size;
    row.runs = cfg.runs;
    row.sim_time = cfg.sim_time;
    row.metrics = aggregate(runs);
    return row;
}

std::string_view to_string(Suite suite) {
    switch (suite) {
        case Suite::Competitiveness: return "competitiveness";
        case Suite::Optimization: return "optimization";
        case Suite::Scalability: return "scalability";
        case Suite::Interactivity: return "interactivity";
    }
    return "unknown";
}

Suite parse_suite(std::string_view name) {
    for (auto s : {Suite::Competitiveness, Suite::Optimization, Suite::Scalability,
                   Suite::Interactivity}) {
        if (to_string(s) == name) return s;
    }
    throw std::invalid_argument(fmt::format("unknown suite '{}'", name));
}

std::vector<ScenarioConfig> suite_cells(Suite suite, const ScenarioConfig& base) {
    auto cell = [&](std::string_view scenario, std::string_view setting,
                    std::string_view profile, PolicyKind protocol) {
        ScenarioConfig cfg = preset(scenario, setting, profile, protocol);
        cfg.sim_time = base.sim_time;
        cfg.runs = base.runs;
        cfg.master_seed = base.master_seed;
        return cfg;
    };
    std::vector<ScenarioConfig> cells;
    switch (suite) {
        case Suite::Competitiveness:
            for (auto scenario : {"all_media", "music", "tv", "movies"}) {
                for (auto protocol : {PolicyKind::Sisp, PolicyKind::Eisp}) {
                    cells.push_back(cell(scenario, "su1", "mi", protocol));
                }
            }
            break;
        case Suite::Optimization:
            for (auto setting : {"su1", "su2", "su3"}) {
                cells.push_back(cell("movies", setting, "mi", PolicyKind::Eisp));
            }
            break;
        case Suite::Scalability:
            for (std::uint32_t size : {25U, 40U, 50U}) {
                auto cfg = cell("movies", "su1", "mi", PolicyKind::Eisp);
                cfg.s_size = size;
                cells.push_back(cfg);
            }
            break;
        case Suite::Interactivity:
            for (auto profile : {"li", "mi", "hi"}) {
                cells.push_back(cell("movies", "su1", profile, PolicyKind::Eisp));
            }
            break;
    }
    return cells;
}

std::vector<ResultRow> sweep(Suite suite, const ScenarioConfig& base, unsigned threads) {
    std::vector<ResultRow> rows;
    for (const auto& cfg : suite_cells(suite, base)) rows.push_back(run_experiment(cfg, threads));
    return rows;
}

namespace {

std::string num(const std::optional<double>& v, int precision) {
    if (!v) return "NA";
    return fmt::format("{:.{}f}", *v, precision);
}

nlohmann::json jnum(const std::optional<double>& v) {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

}  // namespace

std::string csv_header() {
    return "protocol,scenario,setting,profile,s_size,runs,sim_time,rc,rc_ci,ic,ic_ci,rst,rst_ci,"
           "cs,cs_ci";
}

std::string csv_row(const ResultRow& row) {
    const auto& m = row.metrics;
    return fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}", row.protocol, row.scenario,
                       row.setting, row.profile, row.s_size, row.runs, row.sim_time,
                       num(m.rc.mean, 6), num(m.rc.ci, 6), num(m.ic.mean, 6), num(m.ic.ci, 6),
                       num(m.rst.mean, 4), num(m.rst.ci, 4), num(m.cs.mean, 2), num(m.cs.ci, 2));
}

std::string to_csv(const std::vector<ResultRow>& rows) {
    std::string out = csv_header() + "\n";
    for (const auto& row : rows) out += csv_row(row) + "\n";
    return out;
}

std::string to_json(const std::vector<ResultRow>& rows) {
    nlohmann::json doc = nlohmann::json::array();
    for (const auto& row : rows) {
        const auto& m = row.metrics;
        auto metric = [](const MetricSummary& s) {
            return nlohmann::json{{"mean", jnum(s.mean)}, {"ci95", jnum(s.ci)}};
        };
        doc.push_back({{"protocol", row.protocol},
                       {"scenario", row.scenario},
                       {"setting", row.setting},
                       {"profile", row.profile},
                       {"s_size", row.s_size},
                       {"runs", row.runs},
                       {"sim_time", row.sim_time},
                       {"rc", metric(m.rc)},
                       {"ic", metric(m.ic)},
                       {"rst", metric(m.rst)},
                       {"cs", metric(m.cs)}});
    }
    return doc.dump(2) + "\n";
}

std::vector<std::filesystem::path> write_plot_data(Suite suite, const std::vector<ResultRow>& rows,
                                                   const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    struct Figure {
        std::string file;
        std::vector<std::string> metrics;
    };
    std::vector<Figure> figures;
    switch (suite) {
        case Suite::Competitiveness:
            figures = {{"competitiveness_rc_ic.dat", {"rc", "ic"}},
                       {"competitiveness_rst_cs.dat", {"rst", "cs"}}};
            break;
        case Suite::Optimization:
            figures = {{"optimization.dat", {"rc", "ic", "rst", "cs"}}};
            break;
        case Suite::Scalability:
            figures = {{"scalability.dat", {"rc", "ic", "rst", "cs"}}};
            break;
        case Suite::Interactivity:
            figures = {{"interactivity_rc_ic.dat", {"rc", "ic"}},
                       {"interactivity_rst_cs.dat", {"rst", "cs"}}};
            break;
    }
    auto pick = [](const MetricsReport& m, const std::string& name) -> const MetricSummary& {
        if (name == "rc") return m.rc;
        if (name == "ic") return m.ic;
        if (name == "rst") return m.rst;
        return m.cs;
    };
    std::vector<std::filesystem::path> written;
    for (const auto& fig : figures) {
        const auto path = dir / fig.file;
        std::ofstream out(path);
        if (!out) throw std::runtime_error(fmt::format("cannot write {}", path.string()));
        out << "# scenario protocol setting profile s_size";
        for (const auto& m : fig.metrics) out << ' ' << m << ' ' << m << "_ci";
        out << '\n';
        for (const auto& row : rows) {
            out << row.scenario << ' ' << row.protocol << ' ' << row.setting << ' ' << row.profile
                << ' ' << row.s_size;
            for (const auto& m : fig.metrics) {
                const auto& s = pick(row.metrics, m);
                out << ' ' << num(s.mean, 6) << ' ' << num(s.ci, 6);
            }
            out << '\n';
        }
        written.push_back(path);
    }
    return written;
}

}  // namespace vodswarm
