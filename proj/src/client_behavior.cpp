#include "vodswarm/client_behavior.hpp"

#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace vodswarm {

void InteractivityProfile::validate() const {
    if (!(lambda > 0.0)) throw std::invalid_argument("interactivity rate must be positive");
    if (!(l_play_fraction > 0.0) || !(l_jump_fraction > 0.0)) {
        throw std::invalid_argument("play and jump lengths must be positive");
    }
    double sum = 0.0;
    for (double q : p) {
        if (q < 0.0) throw std::invalid_argument("action probabilities must be non-negative");
        sum += q;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
        throw std::invalid_argument(fmt::format("action probabilities sum to {}, not 1", sum));
    }
}

InteractivityProfile profile_preset(std::string_view name) {
    InteractivityProfile p;
    p.name = std::string(name);
    if (name == "li") {
        p.lambda = 0.005;
        p.l_play_fraction = p.l_jump_fraction = 0.145;
        p.p = {0.89, 0.01, 0.05, 0.05};
    } else if (name == "mi") {
        p.lambda = 0.014;
        p.l_play_fraction = p.l_jump_fraction = 0.035;
        p.p = {0.71, 0.05, 0.12, 0.12};
    } else if (name == "hi") {
        p.lambda = 0.025;
        p.l_play_fraction = p.l_jump_fraction = 0.015;
        p.p = {0.55, 0.15, 0.15, 0.15};
    } else {
        throw std::invalid_argument(fmt::format("unknown interactivity profile '{}'", name));
    }
    return p;
}

std::string_view to_string(ActionKind action) {
    switch (action) {
        case ActionKind::Play: return "play";
        case ActionKind::Pause: return "pause";
        case ActionKind::JumpBackward: return "jb";
        case ActionKind::JumpForward: return "jf";
        case ActionKind::Stop: return "stop";
    }
    return "unknown";
}

ActionKind sample_action(const InteractivityProfile& profile, double u) {
    const auto& p = profile.p;
    if (u < p[0]) return ActionKind::Play;
    if (u < p[0] + p[1]) return ActionKind::Pause;
    if (u < p[0] + p[1] + p[2]) return ActionKind::JumpBackward;
    return ActionKind::JumpForward;
}

PieceIndex fraction_to_pieces(double fraction, PieceIndex t) {
    const double pieces = std::round(fraction * static_cast<double>(t));
    return pieces < 1.0 ? 1 : static_cast<PieceIndex>(pieces);
}

ClientSession::ClientSession(PeerId peer, PieceIndex t, PieceIndex w, SimTime start,
                             bool warmup)
    : peer_(peer), window_{1, w, t}, start_(start), warmup_(warmup), missed_(t + 1, false) {}

void ClientSession::start_playback(const PlaybackGeometry& geo) {
    playback_started_ = true;
    state_ = BehaviorState::Playing;
    budget_ = geo.l_play;
}

TransitionEffect ClientSession::apply_action(ActionKind action, const PlaybackGeometry& geo,
                                             SimTime now) {
    TransitionEffect effect;
    switch (action) {
        case ActionKind::Play:
            // Keep the running boundary timer when already playing.
            effect.restart_boundary = state_ != BehaviorState::Playing;
            state_ = BehaviorState::Playing;
            budget_ = geo.l_play;
            break;
        case ActionKind::Pause:
            state_ = BehaviorState::Paused;
            pause_until_ = now + geo.l_pause;
            effect.cancel_boundary = true;
            break;
        case ActionKind::JumpBackward:
        case ActionKind::JumpForward: {
            const auto dir = action == ActionKind::JumpForward ? JumpDirection::Forward
                                                               : JumpDirection::Backward;
            const PieceIndex before = window_.d;
            window_ = window_jump(window_, dir, geo.l_jump);
            effect.window_moved = window_.d != before;
            effect.restart_boundary = true;
            state_ = BehaviorState::Playing;
            budget_ = geo.l_play;
            break;
        }
        case ActionKind::Stop:
            throw std::logic_error("Stop is not an interactive action");
    }
    return effect;
}

void ClientSession::pause_expired(const PlaybackGeometry& geo) {
    state_ = BehaviorState::Playing;
    budget_ = geo.l_play;
}

BoundaryResult ClientSession::playback_boundary(const PieceMap& owned) {
    BoundaryResult result;
    const PieceIndex d = window_.d;
    if (!owned.owns(d)) {
        result.missed = true;
        if (!missed_[d]) {
            missed_[d] = true;
            ++miss_count_;
        }
    }
    if (d == window_.t) {
        if (PieceIndex gap = owned.first_missing(); gap != 0) window_.d = gap;
    } else {
        window_ = window_advance_play(window_, 1);
    }
    if (budget_ > 0) --budget_;
    if (budget_ == 0) {
        state_ = BehaviorState::Idle;
    }
    result.keep_playing = state_ == BehaviorState::Playing;
    return result;
}

}  // namespace vodswarm
