#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "vodswarm/experiment.hpp"

using namespace vodswarm;

namespace {

ScenarioConfig quick(std::string_view path, std::uint32_t runs = 3) {
    auto cfg = preset_from_path(path);
    cfg.sim_time = 6000;
    cfg.runs = runs;
    cfg.master_seed = 5;
    return cfg;
}

}  // namespace

TEST_SUITE("experiment") {

TEST_CASE("rows are byte-stable across reruns and thread counts") {
    const auto cfg = quick("all_media/su1/mi/sisp", 4);
    const auto one = csv_row(run_experiment(cfg, 1));
    CHECK(one == csv_row(run_experiment(cfg, 1)));
    CHECK(one == csv_row(run_experiment(cfg, 4)));
    CHECK(one.rfind("sisp,all_media,su1,mi,7,4,6000,", 0) == 0);
}

TEST_CASE("replication seeds differ") {
    CHECK(replication_seed(1, 0) != replication_seed(1, 1));
    CHECK(replication_seed(1, 0) != replication_seed(2, 0));
}

TEST_CASE("a single run prints undefined intervals") {
    const auto row = run_experiment(quick("all_media/su1/mi/eisp", 1), 1);
    const auto line = csv_row(row);
    CHECK(line.find(",NA,") != std::string::npos);
    CHECK_FALSE(row.metrics.rc.ci.has_value());
}

TEST_CASE("csv header") {
    CHECK(csv_header() ==
          "protocol,scenario,setting,profile,s_size,runs,sim_time,rc,rc_ci,ic,ic_ci,rst,rst_ci,cs,cs_ci");
}

TEST_CASE("suite sizes") {
    ScenarioConfig base;
    CHECK(suite_cells(Suite::Competitiveness, base).size() == 8);
    CHECK(suite_cells(Suite::Optimization, base).size() == 3);
    const auto scal = suite_cells(Suite::Scalability, base);
    REQUIRE(scal.size() == 3);
    CHECK(scal[2].s_size == 50);
    const auto inter = suite_cells(Suite::Interactivity, base);
    REQUIRE(inter.size() == 3);
    CHECK(inter[0].profile.name == "li");
    CHECK(inter[2].profile.name == "hi");
    CHECK_THROWS_AS(parse_suite("speed"), std::invalid_argument);
}

TEST_CASE("json and plot files") {
    std::vector<ResultRow> rows{run_experiment(quick("all_media/su1/mi/eisp", 2), 2),
                                run_experiment(quick("all_media/su1/mi/sisp", 2), 2)};
    const auto doc = nlohmann::json::parse(to_json(rows));
    REQUIRE(doc.size() == 2);
    CHECK(doc[0]["protocol"] == "eisp");
    CHECK(doc[1]["rc"]["mean"].is_number());

    const auto dir = std::filesystem::temp_directory_path() / "vodswarm_plot_test";
    std::filesystem::remove_all(dir);
    const auto files = write_plot_data(Suite::Competitiveness, rows, dir);
    REQUIRE(files.size() == 2);
    std::ifstream in(files[0]);
    std::string header, first;
    std::getline(in, header);
    std::getline(in, first);
    CHECK(header.find("rc rc_ci ic ic_ci") != std::string::npos);
    CHECK(first.rfind("all_media eisp su1 mi 7 ", 0) == 0);
    std::filesystem::remove_all(dir);
}

}
