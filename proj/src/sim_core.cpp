#include "vodswarm/sim_core.hpp"

#include <cmath>

#include <fmt/format.h>

namespace vodswarm {

std::string_view to_string(EventKind kind) {
    switch (kind) {
        case EventKind::UnchokeInterval: return "unchoke-interval";
        case EventKind::OptimisticInterval: return "optimistic-interval";
        case EventKind::TransferComplete: return "transfer-complete";
        case EventKind::BehaviorEvent: return "behavior-event";
        case EventKind::PauseExpiry: return "pause-expiry";
        case EventKind::PlaybackBoundary: return "playback-piece-boundary";
        case EventKind::SessionAdmission: return "session-admission";
    }
    return "unknown";
}

std::uint64_t Scheduler::schedule(EventKind kind, SimTime fire_at, std::uint32_t peer,
                                  std::uint64_t target, std::uint64_t generation) {
    if (!(fire_at >= now_)) {
        throw SimulationFault(fmt::format("event {} scheduled at {} but clock is {}",
                                          to_string(kind), fire_at, now_));
    }
    const std::uint64_t seq = next_seq_++;
    queue_.push(Event{fire_at, seq, kind, peer, target, generation});
    return seq;
}

std::uint64_t Scheduler::run_until(SimTime horizon, const Handler& handler) {
    if (horizon < now_) {
        throw SimulationFault(fmt::format("horizon {} precedes clock {}", horizon, now_));
    }
    std::uint64_t dispatched = 0;
    while (!queue_.empty() && queue_.top().fire_at <= horizon) {
        const Event ev = queue_.top();
        queue_.pop();
        now_ = ev.fire_at;
        current_seq_ = ev.seq;
        handler(ev);
        ++dispatched;
    }
    now_ = horizon;
    return dispatched;
}

std::string_view to_string(StreamName name) {
    switch (name) {
        case StreamName::Behavior: return "behavior";
        case StreamName::OptimisticChoice: return "optimistic-choice";
        case StreamName::TieBreak: return "tie-break";
        case StreamName::ActionSample: return "action-sample";
    }
    return "unknown";
}

StreamName parse_stream_name(std::string_view label) {
    for (auto n : {StreamName::Behavior, StreamName::OptimisticChoice, StreamName::TieBreak,
                   StreamName::ActionSample}) {
        if (to_string(n) == label) return n;
    }
    throw std::invalid_argument(fmt::format("unknown random stream '{}'", label));
}

std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

namespace {

std::uint64_t label_hash(std::string_view label) noexcept {
    // FNV-1a
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : label) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace

RngStream::RngStream(std::uint64_t master_seed, StreamName name, std::uint64_t substream)
    : name_(name),
      engine_(mix64(mix64(master_seed) ^ label_hash(to_string(name)) ^ mix64(~substream))) {}

double RngStream::uniform() {
    ++draws_;
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RngStream::exponential(double rate) {
    if (!(rate > 0.0)) throw std::invalid_argument("exponential rate must be positive");
    return -std::log1p(-uniform()) / rate;
}

std::size_t RngStream::index(std::size_t n) {
    if (n == 0) throw std::invalid_argument("index() over an empty range");
    auto i = static_cast<std::size_t>(uniform() * static_cast<double>(n));
    return i < n ? i : n - 1;
}

}  // namespace vodswarm
