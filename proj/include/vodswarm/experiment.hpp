#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "vodswarm/metrics.hpp"
#include "vodswarm/scenario.hpp"

namespace vodswarm {

/// One aggregated experiment cell.
struct ResultRow {
    std::string protocol;
    std::string scenario;
    std::string setting;
    std::string profile;
    std::uint32_t s_size = 0;
    std::uint32_t runs = 0;
    double sim_time = 0.0;
    MetricsReport metrics;
};

/// Seed of replication r under a master seed.
std::uint64_t replication_seed(std::uint64_t master_seed, std::uint32_t replication);

/// Runs cfg.runs isolated replications, in parallel when threads > 1
/// (0 picks the hardware concurrency). Output order follows replication
/// index regardless of scheduling.
std::vector<RunOutput> run_replications(const ScenarioConfig& cfg, unsigned threads = 0);

ResultRow run_experiment(const ScenarioConfig& cfg, unsigned threads = 0);

enum class Suite : std::uint8_t { Competitiveness, Optimization, Scalability, Interactivity };

std::string_view to_string(Suite suite);
Suite parse_suite(std::string_view name);

/// Cells of a named suite. Horizon, run count and seed come from `base`.
std::vector<ScenarioConfig> suite_cells(Suite suite, const ScenarioConfig& base);

std::vector<ResultRow> sweep(Suite suite, const ScenarioConfig& base, unsigned threads = 0);

std::string csv_header();
std::string csv_row(const ResultRow& row);
std::string to_csv(const std::vector<ResultRow>& rows);
std::string to_json(const std::vector<ResultRow>& rows);

/// Writes one whitespace-separated column file per figure of the suite and
/// returns the paths written.
std::vector<std::filesystem::path> write_plot_data(Suite suite, const std::vector<ResultRow>& rows,
                                                   const std::filesystem::path& dir);

}  // namespace vodswarm
