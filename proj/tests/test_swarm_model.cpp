#include <doctest.h>

#include <algorithm>
#include <map>
#include <random>
#include <vector>

#include "vodswarm/bandwidth.hpp"
#include "vodswarm/piece_map.hpp"
#include "vodswarm/sim_core.hpp"

using namespace vodswarm;

namespace {

PieceMap owning(PieceIndex t, std::initializer_list<PieceIndex> pieces) {
    PieceMap m(t, 16);
    for (auto p : pieces) m.set_owned(p);
    return m;
}

}  // namespace

TEST_SUITE("swarm-model") {

TEST_CASE("interest relation") {
    CHECK(interested(owning(4, {}), owning(4, {1})));
    CHECK_FALSE(interested(owning(4, {1, 2}), owning(4, {2})));
    const auto seed = PieceMap::full(4, 16);
    CHECK_FALSE(interested(seed, owning(4, {1, 3})));
    CHECK_FALSE(interested(seed, PieceMap::full(4, 16)));
    // A newcomer with nothing is interested in everyone holding anything.
    CHECK(interested(PieceMap(800, 16), seed));
}

TEST_CASE("single flow runs at the full 20 KiB/s") {
    const double kib = 1024.0;
    const std::vector<FlowEnds> flows{{0, 1}};
    const auto rates = share_rates(flows, 20 * kib, 20 * kib);
    REQUIRE(rates.size() == 1);
    CHECK(rates[0] == doctest::Approx(20 * kib));
    CHECK(256 * kib / rates[0] == doctest::Approx(12.8));
}

TEST_CASE("sender with four outbound flows gives 5 KiB/s each") {
    const double kib = 1024.0;
    const std::vector<FlowEnds> flows{{0, 1}, {0, 2}, {0, 3}, {0, 4}};
    for (double r : share_rates(flows, 20 * kib, 20 * kib)) CHECK(r == doctest::Approx(5 * kib));
}

TEST_CASE("receiver share does not lift a flow above its sender share") {
    const double kib = 1024.0;
    // Receiver 9 has two inbound flows (share 10 each); both senders have
    // four outbound flows (share 5 each), so each flow runs at min(5, 10).
    std::vector<FlowEnds> flows{{1, 9}, {2, 9}};
    for (PeerId extra = 20; extra < 23; ++extra) {
        flows.push_back({1, extra});
        flows.push_back({2, extra + 10});
    }
    const auto rates = share_rates(flows, 20 * kib, 20 * kib);
    CHECK(rates[0] == doctest::Approx(5 * kib));
    CHECK(rates[1] == doctest::Approx(5 * kib));
}

TEST_CASE("zero capacity is a fault") {
    const std::vector<FlowEnds> flows{{0, 1}};
    CHECK_THROWS(share_rates(flows, 0.0, 10.0));
}

TEST_CASE("property: shares follow the min rule and never exceed either cap") {
    std::mt19937_64 gen(5);
    for (int trial = 0; trial < 500; ++trial) {
        std::uniform_int_distribution<PeerId> peer(0, 7);
        std::uniform_int_distribution<int> count(0, 20);
        std::vector<FlowEnds> flows;
        const int n = count(gen);
        for (int i = 0; i < n; ++i) {
            PeerId a = peer(gen), b = peer(gen);
            if (a == b) continue;
            flows.push_back({a, b});
        }
        const double up = 1000.0 + trial, down = 1500.0 - trial;
        const auto rates = share_rates(flows, up, down);
        std::map<PeerId, int> outs, ins;
        for (auto f : flows) {
            ++outs[f.src];
            ++ins[f.dst];
        }
        std::map<PeerId, double> out_sum, in_sum;
        for (std::size_t i = 0; i < flows.size(); ++i) {
            const double expect = std::min(up / outs[flows[i].src], down / ins[flows[i].dst]);
            CHECK(rates[i] == doctest::Approx(expect));
            out_sum[flows[i].src] += rates[i];
            in_sum[flows[i].dst] += rates[i];
        }
        for (auto [p, s] : out_sum) CHECK(s <= up * (1 + 1e-12));
        for (auto [p, s] : in_sum) CHECK(s <= down * (1 + 1e-12));
    }
}

TEST_CASE("sixteenth block completes a 256 KiB piece") {
    PieceMap m(800, 256 / 16);
    CHECK(m.blocks_per_piece() == 16);
    for (std::uint32_t b = 0; b < 15; ++b) CHECK_FALSE(m.complete_block(5, b));
    CHECK_FALSE(m.owns(5));
    CHECK(m.blocks_done(5) == 15);
    CHECK(m.complete_block(5, 15));
    CHECK(m.owns(5));
    CHECK(m.owned_count() == 1);
}

TEST_CASE("duplicate block and already-owned piece are faults") {
    PieceMap m(4, 16);
    m.complete_block(1, 3);
    CHECK_THROWS_AS(m.complete_block(1, 3), SimulationFault);
    m.set_owned(2);
    CHECK_THROWS_AS(m.complete_block(2, 0), SimulationFault);
}

TEST_CASE("interrupted piece resumes with only the missing blocks") {
    PieceMap m(800, 16);
    for (std::uint32_t b = 0; b < 10; ++b) m.complete_block(7, b);
    CHECK(m.missing_blocks(7) == 6);
    CHECK(m.first_missing_block(7) == 10);
    int transferred = 0;
    while (!m.owns(7)) {
        m.complete_block(7, m.first_missing_block(7));
        ++transferred;
    }
    CHECK(transferred == 6);
}

TEST_CASE("first missing piece and completion") {
    PieceMap m(3, 1);
    CHECK(m.first_missing() == 1);
    m.set_owned(1);
    m.set_owned(3);
    CHECK(m.first_missing() == 2);
    m.set_owned(2);
    CHECK(m.complete());
    CHECK(m.first_missing() == 0);
    CHECK_THROWS(m.owns(0));
    CHECK_THROWS(m.owns(4));
}

TEST_CASE("property: owned count matches the bitmap over random block orders") {
    std::mt19937_64 gen(11);
    for (int trial = 0; trial < 50; ++trial) {
        const PieceIndex t = 1 + static_cast<PieceIndex>(gen() % 130);
        const std::uint32_t bpp = 1 + static_cast<std::uint32_t>(gen() % 5);
        PieceMap m(t, bpp);
        std::vector<std::pair<PieceIndex, std::uint32_t>> blocks;
        for (PieceIndex p = 1; p <= t; ++p)
            for (std::uint32_t b = 0; b < bpp; ++b) blocks.emplace_back(p, b);
        std::shuffle(blocks.begin(), blocks.end(), gen);
        PieceIndex completions = 0;
        for (auto [p, b] : blocks) {
            if (m.complete_block(p, b)) ++completions;
            PieceIndex recount = 0;
            for (PieceIndex q = 1; q <= t; ++q) recount += m.owns(q) ? 1 : 0;
            REQUIRE(recount == m.owned_count());
        }
        CHECK(completions == t);
        CHECK(m.complete());
    }
}

}
