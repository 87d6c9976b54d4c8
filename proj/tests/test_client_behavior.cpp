#include <doctest.h>

#include <map>

#include "vodswarm/client_behavior.hpp"
#include "vodswarm/scenario.hpp"

using namespace vodswarm;

TEST_SUITE("client-behavior") {

TEST_CASE("action sampling is a CDF lookup") {
    const auto mi = profile_preset("mi");
    CHECK(sample_action(mi, 0.95) == ActionKind::JumpForward);
    CHECK(sample_action(mi, 0.0) == ActionKind::Play);
    CHECK(sample_action(mi, 0.70999) == ActionKind::Play);
    CHECK(sample_action(mi, 0.72) == ActionKind::Pause);
    CHECK(sample_action(mi, 0.80) == ActionKind::JumpBackward);
    const auto hi = profile_preset("hi");
    CHECK(sample_action(hi, 0.55) == ActionKind::Pause);
}

TEST_CASE("profile presets") {
    const auto li = profile_preset("li");
    CHECK(li.lambda == doctest::Approx(0.005));
    CHECK(li.l_play_fraction == doctest::Approx(0.145));
    CHECK(li.p[0] == doctest::Approx(0.89));
    const auto hi = profile_preset("hi");
    CHECK(hi.lambda == doctest::Approx(0.025));
    CHECK(hi.l_jump_fraction == doctest::Approx(0.015));
    CHECK_THROWS_AS(profile_preset("extreme"), std::invalid_argument);
}

TEST_CASE("profile validation") {
    auto p = profile_preset("mi");
    p.p = {0.7, 0.05, 0.12, 0.12};
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = profile_preset("mi");
    p.lambda = 0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("segment lengths in pieces") {
    CHECK(fraction_to_pieces(0.145, 800) == 116);
    CHECK(fraction_to_pieces(0.035, 800) == 28);
    CHECK(fraction_to_pieces(0.015, 800) == 12);
    CHECK(fraction_to_pieces(0.145, 40) == 6);
    CHECK(fraction_to_pieces(0.035, 40) == 1);
    CHECK(fraction_to_pieces(0.015, 40) == 1);
}

TEST_CASE("movies MI geometry: jump 28 pieces, pause 358.4 s") {
    const auto cfg = preset("movies", "su1", "mi", PolicyKind::Eisp);
    const auto geo = cfg.geometry();
    CHECK(geo.l_jump == 28);
    CHECK(geo.l_play == 28);
    CHECK(geo.l_pause == doctest::Approx(358.4));

    ClientSession s(1, 800, 28, 0.0, false);
    s.start_playback(geo);
    for (int i = 0; i < 99; ++i) s.playback_boundary(PieceMap::full(800, 16));
    CHECK(s.window().d == 100);
    auto fx = s.apply_action(ActionKind::JumpForward, geo, 1000.0);
    CHECK(fx.window_moved);
    CHECK(s.window().d == 128);
    CHECK(s.window().last() == 155);

    fx = s.apply_action(ActionKind::Pause, geo, 1000.0);
    CHECK(fx.cancel_boundary);
    CHECK(s.state() == BehaviorState::Paused);
    CHECK(s.pause_until() == doctest::Approx(1358.4));
    s.pause_expired(geo);
    CHECK(s.state() == BehaviorState::Playing);
    CHECK(s.budget() == 28);
}

TEST_CASE("play while playing resets the budget but not the playhead") {
    PlaybackGeometry geo{5, 5, 10.0};
    ClientSession s(1, 40, 5, 0.0, false);
    s.start_playback(geo);
    const auto all = PieceMap::full(40, 1);
    s.playback_boundary(all);
    s.playback_boundary(all);
    CHECK(s.budget() == 3);
    const auto d = s.window().d;
    const auto fx = s.apply_action(ActionKind::Play, geo, 30.0);
    CHECK_FALSE(fx.restart_boundary);
    CHECK_FALSE(fx.window_moved);
    CHECK(s.window().d == d);
    CHECK(s.budget() == 5);
}

TEST_CASE("budget exhaustion idles the player") {
    PlaybackGeometry geo{2, 2, 10.0};
    ClientSession s(1, 40, 2, 0.0, false);
    s.start_playback(geo);
    const auto all = PieceMap::full(40, 1);
    CHECK(s.playback_boundary(all).keep_playing);
    CHECK_FALSE(s.playback_boundary(all).keep_playing);
    CHECK(s.state() == BehaviorState::Idle);
    // Play from idle restarts the timer.
    CHECK(s.apply_action(ActionKind::Play, geo, 5.0).restart_boundary);
}

TEST_CASE("missing pieces are counted once and skipped") {
    PlaybackGeometry geo{10, 3, 10.0};
    ClientSession s(1, 40, 10, 0.0, false);
    s.start_playback(geo);
    PieceMap owned(40, 1);
    owned.set_owned(1);
    CHECK_FALSE(s.playback_boundary(owned).missed);
    CHECK(s.window().d == 2);
    CHECK(s.playback_boundary(owned).missed);
    CHECK(s.window().d == 3);
    CHECK(s.distinct_misses() == 1);
    CHECK(s.missed(2));
    s.apply_action(ActionKind::JumpBackward, geo, 1.0);
    CHECK(s.window().d == 1);
    s.playback_boundary(owned);
    s.playback_boundary(owned);  // piece 2 again
    CHECK(s.distinct_misses() == 1);
}

TEST_CASE("after the last piece the playhead seeks to the first gap") {
    PlaybackGeometry geo{10, 3, 10.0};
    ClientSession s(1, 4, 2, 0.0, false);
    s.start_playback(geo);
    PieceMap owned(4, 1);
    for (PieceIndex p : {1U, 3U, 4U}) owned.set_owned(p);
    s.apply_action(ActionKind::JumpForward, geo, 0.0);  // d = 4
    CHECK(s.window().d == 4);
    s.playback_boundary(owned);
    CHECK(s.window().d == 2);
}

TEST_CASE("Stop is never an interactive action") {
    const auto mi = profile_preset("mi");
    std::map<ActionKind, int> seen;
    for (int i = 0; i < 1000; ++i) ++seen[sample_action(mi, i / 1000.0)];
    CHECK(seen.count(ActionKind::Stop) == 0);
    ClientSession s(1, 4, 1, 0.0, false);
    CHECK_THROWS(s.apply_action(ActionKind::Stop, PlaybackGeometry{}, 0.0));
}

}
