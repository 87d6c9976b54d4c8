#include "vodswarm/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <boost/math/distributions/students_t.hpp>

namespace vodswarm {

double session_rc(const SessionRecord& rec) {
    if (!(rec.duration > 0.0)) throw std::invalid_argument("session duration must be positive");
    return (rec.f_size / rec.r_down) / rec.duration;
}

std::optional<double> session_ic(const SessionRecord& rec) {
    if (!rec.playback) return std::nullopt;
    return static_cast<double>(rec.distinct_misses) / rec.t;
}

double session_rst(const SessionRecord& rec) { return rec.duration / rec.t; }

double t_quantile_975(std::size_t dof) {
    if (dof == 0) throw std::invalid_argument("t quantile needs at least one degree of freedom");
    boost::math::students_t dist(static_cast<double>(dof));
    return boost::math::quantile(dist, 0.975);
}

MetricSummary summarize(std::span<const double> unordered) {
    MetricSummary out;
    if (unordered.empty()) return out;
    // Fixed summation order keeps the result independent of run order.
    std::vector<double> samples(unordered.begin(), unordered.end());
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    const bool constant = samples.front() == samples.back();
    const double mean =
        constant ? samples.front() : std::accumulate(samples.begin(), samples.end(), 0.0) / n;
    out.mean = mean;
    if (samples.size() < 2) return out;
    if (constant) {
        out.ci = 0.0;
        return out;
    }
    double ss = 0.0;
    for (double x : samples) ss += (x - mean) * (x - mean);
    const double sd = std::sqrt(ss / (n - 1.0));
    out.ci = t_quantile_975(samples.size() - 1) * sd / std::sqrt(n);
    return out;
}

MetricsReport aggregate(std::span<const RunOutput> runs) {
    std::vector<double> rc, ic, rst, cs;
    for (const auto& run : runs) {
        cs.push_back(static_cast<double>(run.sessions.size()));
        if (run.sessions.empty()) continue;
        double rc_sum = 0.0, rst_sum = 0.0, ic_sum = 0.0;
        std::size_t ic_n = 0;
        for (const auto& rec : run.sessions) {
            rc_sum += session_rc(rec);
            rst_sum += session_rst(rec);
            if (auto v = session_ic(rec)) {
                ic_sum += *v;
                ++ic_n;
            }
        }
        const double n = static_cast<double>(run.sessions.size());
        rc.push_back(rc_sum / n);
        rst.push_back(rst_sum / n);
        if (ic_n > 0) ic.push_back(ic_sum / static_cast<double>(ic_n));
    }
    MetricsReport report;
    report.runs = runs.size();
    report.rc = summarize(rc);
    report.ic = summarize(ic);
    report.rst = summarize(rst);
    report.cs = summarize(cs);
    return report;
}

}  // namespace vodswarm
