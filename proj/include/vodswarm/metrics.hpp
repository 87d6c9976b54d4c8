#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace vodswarm {

/// One completed client session.
struct SessionRecord {
    double duration = 0.0;          // seconds, admission to last byte
    std::uint32_t distinct_misses = 0;
    std::uint32_t t = 1;            // pieces in the file
    double f_size = 0.0;            // bytes
    double r_down = 0.0;            // bytes per second
    bool playback = true;           // false in the no-playback diagnostic mode
};

/// Retrieval coefficient: exclusive-channel time over actual duration.
double session_rc(const SessionRecord& rec);
/// Interruption coefficient: distinct missed pieces over t. Not applicable
/// when playback was disabled.
std::optional<double> session_ic(const SessionRecord& rec);
/// Relativized service time: seconds per piece.
double session_rst(const SessionRecord& rec);

/// Completed sessions of one replication.
struct RunOutput {
    std::vector<SessionRecord> sessions;
};

struct MetricSummary {
    std::optional<double> mean;
    std::optional<double> ci;  // 95% half-width; undefined with fewer than 2 samples
};

struct MetricsReport {
    MetricSummary rc;
    MetricSummary ic;
    MetricSummary rst;
    MetricSummary cs;
    std::size_t runs = 0;
};

/// 0.975 quantile of Student's t with `dof` degrees of freedom.
double t_quantile_975(std::size_t dof);

/// Mean and 95% confidence half-width over independent samples.
MetricSummary summarize(std::span<const double> samples);

/// Per-run means, then grand means and CIs across runs. CS is the count of
/// completed sessions per run. Runs that completed no session contribute to
/// CS only.
MetricsReport aggregate(std::span<const RunOutput> runs);

}  // namespace vodswarm
