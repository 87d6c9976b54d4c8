#pragma once

#include <cstdint>
#include <functional>
#include <queue>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace vodswarm {

/// Simulation time in seconds.
using SimTime = double;

/// Default per-run horizon (seconds).
inline constexpr SimTime kDefaultHorizon = 1.0e6;

enum class EventKind : std::uint8_t {
    UnchokeInterval,
    OptimisticInterval,
    TransferComplete,
    BehaviorEvent,
    PauseExpiry,
    PlaybackBoundary,
    SessionAdmission,
};

std::string_view to_string(EventKind kind);

struct Event {
    SimTime fire_at = 0.0;
    std::uint64_t seq = 0;
    EventKind kind = EventKind::UnchokeInterval;
    std::uint32_t peer = 0;
    // Kind-specific payload: flow id for transfers.
    std::uint64_t target = 0;
    // Generation stamp; handlers drop the event if it no longer matches.
    std::uint64_t generation = 0;
};

/// Raised for model bugs: scheduling in the past, duplicate downloads, ...
class SimulationFault : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Clock plus (fire_at, seq)-ordered event queue.
class Scheduler {
public:
    using Handler = std::function<void(const Event&)>;

    SimTime now() const noexcept { return now_; }
    std::size_t pending() const noexcept { return queue_.size(); }
    /// Sequence number the next scheduled event will receive.
    std::uint64_t next_seq() const noexcept { return next_seq_; }
    /// Sequence number of the event currently (or last) dispatched.
    std::uint64_t current_seq() const noexcept { return current_seq_; }

    /// Enqueues an event and returns its sequence number.
    std::uint64_t schedule(EventKind kind, SimTime fire_at, std::uint32_t peer = 0,
                           std::uint64_t target = 0, std::uint64_t generation = 0);

    /// Dispatches every event with fire_at <= horizon, then sets the clock
    /// to horizon. Returns the number of events dispatched.
    std::uint64_t run_until(SimTime horizon, const Handler& handler);

private:
    struct Later {
        bool operator()(const Event& a, const Event& b) const noexcept {
            if (a.fire_at != b.fire_at) return a.fire_at > b.fire_at;
            return a.seq > b.seq;
        }
    };

    SimTime now_ = 0.0;
    std::uint64_t next_seq_ = 0;
    std::uint64_t current_seq_ = 0;
    std::priority_queue<Event, std::vector<Event>, Later> queue_;
};

enum class StreamName : std::uint8_t {
    Behavior,
    OptimisticChoice,
    TieBreak,
    ActionSample,
};

std::string_view to_string(StreamName name);
/// Throws std::invalid_argument for unknown labels.
StreamName parse_stream_name(std::string_view label);

/// SplitMix64 finalizer, used to derive stream seeds.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// One named random stream. The generator state is a pure function of
/// (master seed, name, sub-stream), so adding draws to one stream never
/// shifts another.
class RngStream {
public:
    RngStream(std::uint64_t master_seed, StreamName name, std::uint64_t substream = 0);

    StreamName name() const noexcept { return name_; }
    std::uint64_t draws() const noexcept { return draws_; }

    /// Uniform in [0, 1) with 53 bits of resolution.
    double uniform();
    /// Exponential with the given rate (> 0); mean 1 / rate.
    double exponential(double rate);
    /// Uniform integer in [0, n). n must be > 0.
    std::size_t index(std::size_t n);

private:
    StreamName name_;
    std::mt19937_64 engine_;
    std::uint64_t draws_ = 0;
};

}  // namespace vodswarm
