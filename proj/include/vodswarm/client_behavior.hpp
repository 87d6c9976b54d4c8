#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "vodswarm/bandwidth.hpp"
#include "vodswarm/piece_map.hpp"
#include "vodswarm/piece_selection.hpp"

namespace vodswarm {

/// Interactive viewing behaviour. Segment lengths are fractions of the file;
/// pause length is derived from the play fraction and the download rate.
struct InteractivityProfile {
    std::string name = "mi";
    double lambda = 0.014;            // events per second
    double l_play_fraction = 0.035;
    double l_jump_fraction = 0.035;
    std::array<double, 4> p{0.71, 0.05, 0.12, 0.12};  // Play, Pause, JB, JF
    // Diagnostic switch: with playback off no interactivity happens and IC is
    // not applicable.
    bool playback = true;

    /// Throws std::invalid_argument on non-positive parameters or when the
    /// probabilities do not sum to 1 within 1e-9.
    void validate() const;
};

InteractivityProfile profile_preset(std::string_view name);

enum class ActionKind : std::uint8_t { Play, Pause, JumpBackward, JumpForward, Stop };

std::string_view to_string(ActionKind action);

/// CDF lookup in the fixed order Play, Pause, JB, JF. Never returns Stop.
ActionKind sample_action(const InteractivityProfile& profile, double u);

/// Fraction of a t-piece file, rounded to the nearest piece with a floor of 1.
PieceIndex fraction_to_pieces(double fraction, PieceIndex t);

enum class BehaviorState : std::uint8_t { Buffering, Playing, Paused, Idle };

/// Segment lengths resolved for one file.
struct PlaybackGeometry {
    PieceIndex l_play = 1;
    PieceIndex l_jump = 1;
    double l_pause = 0.0;  // seconds
};

/// What a behaviour transition did to the playback timer and window.
struct TransitionEffect {
    bool window_moved = false;
    bool restart_boundary = false;  // schedule a fresh boundary one piece-time from now
    bool cancel_boundary = false;
};

struct BoundaryResult {
    bool missed = false;
    bool keep_playing = false;
};

/// One client's viewing state. Scheduling lives in the simulation; this type
/// only holds the transitions.
class ClientSession {
public:
    ClientSession(PeerId peer, PieceIndex t, PieceIndex w, SimTime start, bool warmup);

    PeerId peer() const { return peer_; }
    const SlidingWindow& window() const { return window_; }
    BehaviorState state() const { return state_; }
    PieceIndex budget() const { return budget_; }
    bool playback_started() const { return playback_started_; }
    SimTime start_time() const { return start_; }
    bool warmup() const { return warmup_; }
    std::uint32_t distinct_misses() const { return miss_count_; }
    bool missed(PieceIndex piece) const { return missed_.at(piece); }

    std::uint64_t downloaded_bytes() const { return downloaded_bytes_; }
    void add_downloaded(std::uint64_t bytes) { downloaded_bytes_ += bytes; }

    /// Playback begins at piece 1 with a fresh play budget.
    void start_playback(const PlaybackGeometry& geo);

    /// Applies an action drawn at event E.
    TransitionEffect apply_action(ActionKind action, const PlaybackGeometry& geo, SimTime now);

    /// A pause ran out: resume with a fresh play budget.
    void pause_expired(const PlaybackGeometry& geo);
    SimTime pause_until() const { return pause_until_; }

    /// One piece-time of playback finished. The piece at the playhead is
    /// checked (misses counted once per distinct piece) and the playhead
    /// advances. After the last piece it seeks to the lowest piece not yet
    /// retrieved.
    BoundaryResult playback_boundary(const PieceMap& owned);

    // Generation counters for tombstoning timers.
    std::uint64_t behavior_gen = 0;
    std::uint64_t boundary_gen = 0;
    std::uint64_t pause_gen = 0;

private:
    PeerId peer_;
    SlidingWindow window_;
    BehaviorState state_ = BehaviorState::Buffering;
    PieceIndex budget_ = 0;
    SimTime pause_until_ = 0.0;
    SimTime start_;
    bool warmup_;
    bool playback_started_ = false;
    std::uint64_t downloaded_bytes_ = 0;
    std::vector<bool> missed_;
    std::uint32_t miss_count_ = 0;
};

}  // namespace vodswarm
