#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "vodswarm/client_behavior.hpp"
#include "vodswarm/metrics.hpp"
#include "vodswarm/peer_selection.hpp"
#include "vodswarm/piece_map.hpp"
#include "vodswarm/piece_selection.hpp"
#include "vodswarm/scenario.hpp"
#include "vodswarm/sim_core.hpp"

namespace vodswarm {

class Simulation;

using FlowId = std::uint64_t;

struct FlowSnapshot {
    FlowId id;
    PeerId src;
    PeerId dst;
    PieceIndex piece;
    double bytes_remaining;
    double rate;
};

/// Hooks for tracing and auditing a run. All callbacks default to no-ops.
class SimulationObserver {
public:
    virtual ~SimulationObserver() = default;
    /// Called after an event has been handled and rates recomputed.
    virtual void on_dispatch(const Event&, const Simulation&) {}
    virtual void on_behavior_gap(PeerId, double /*seconds*/) {}
    virtual void on_action(PeerId, ActionKind, SimTime) {}
    virtual void on_piece_complete(PeerId, PieceIndex, SimTime) {}
    virtual void on_session_end(PeerId, const SessionRecord&, bool /*warmup*/,
                                std::uint64_t /*downloaded_bytes*/) {}
};

/// One replication of a swarm in steady state: a permanent seed plus
/// s_size - 1 leechers, each departing leecher replaced on the spot.
///
/// Leechers that start at time 0 form the warm-up cohort; their sessions are
/// not reported.
class Simulation {
public:
    Simulation(ScenarioConfig cfg, std::uint64_t run_seed, SimulationObserver* observer = nullptr);
    ~Simulation();
    Simulation(const Simulation&) = delete;
    Simulation& operator=(const Simulation&) = delete;

    /// Runs to the horizon. Faults are rethrown naming the seed and the
    /// sequence number of the failing event.
    std::uint64_t run_until(SimTime horizon);

    SimTime now() const { return scheduler_.now(); }
    const ScenarioConfig& config() const { return cfg_; }
    std::uint64_t seed() const { return seed_; }

    /// Completed sessions outside the warm-up cohort.
    const std::vector<SessionRecord>& sessions() const { return sessions_; }
    std::size_t warmup_sessions() const { return warmup_sessions_; }
    RunOutput output() const { return RunOutput{sessions_}; }

    std::size_t population() const { return peers_.size(); }
    std::vector<PeerId> peer_ids() const;
    bool is_seed(PeerId peer) const;
    const PieceMap& pieces(PeerId peer) const;
    const ChokeState& choke_state(PeerId peer) const;
    const ClientSession* session(PeerId peer) const;
    const UnchokeOrder& unchokers(PeerId peer) const;
    const RequestLedger& ledger(PeerId peer) const;
    std::vector<FlowSnapshot> flows() const;
    const std::vector<std::uint32_t>& replica_counts() const { return replicas_; }
    std::uint64_t tie_break_draws() const { return tie_rng_.draws(); }

    /// Checks every structural invariant; returns one message per violation.
    std::vector<std::string> audit() const;

private:
    struct Peer;
    struct Flow {
        PeerId src;
        PeerId dst;
        PieceIndex piece;
        double bytes_total;
        double bytes_remaining;
        double rate = 0.0;
        std::uint64_t generation = 0;
    };

    Peer& peer(PeerId id);
    const Peer& peer(PeerId id) const;
    Peer* find_peer(PeerId id);

    void dispatch(const Event& ev);
    void settle();
    void recompute_rates();

    PeerId add_leecher(bool warmup);
    void on_admission(Peer& p);
    void on_regular_interval(Peer& p);
    void on_optimistic_interval(Peer& p);
    void on_transfer_complete(FlowId id, std::uint64_t generation);
    void on_behavior_event(Peer& p, std::uint64_t generation);
    void on_pause_expiry(Peer& p, std::uint64_t generation);
    void on_playback_boundary(Peer& p, std::uint64_t generation);

    std::vector<PeerId> interested_in(const Peer& uploader) const;
    void apply_choke_state(Peer& uploader, ChokeState next);
    void try_requests(Peer& p);
    void start_flow(Peer& src, Peer& dst, PieceIndex piece);
    void finish_flow(FlowId id, bool complete);
    void on_piece_completed(Peer& p, PieceIndex piece);
    void schedule_boundary(Peer& p);
    void schedule_behavior(Peer& p);
    void process_departures();
    double stagger(PeerId id) const;

    ScenarioConfig cfg_;
    std::uint64_t seed_;
    SimulationObserver* observer_;
    PlaybackGeometry geometry_;
    PieceIndex t_;
    std::uint32_t blocks_per_piece_;

    Scheduler scheduler_;
    RngStream optimistic_rng_;
    RngStream tie_rng_;

    std::map<PeerId, std::unique_ptr<Peer>> peers_;
    std::map<FlowId, Flow> flows_;
    std::vector<std::uint32_t> replicas_;
    FlowId next_flow_ = 1;
    PeerId next_peer_ = 1;
    std::uint64_t unchoke_seq_ = 0;
    SimTime settled_at_ = 0.0;
    bool rates_dirty_ = false;
    std::vector<PeerId> departing_;

    std::vector<SessionRecord> sessions_;
    std::size_t warmup_sessions_ = 0;
};

}  // namespace vodswarm
