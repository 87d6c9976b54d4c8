#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "vodswarm/bandwidth.hpp"
#include "vodswarm/piece_map.hpp"
#include "vodswarm/sim_core.hpp"

namespace vodswarm {

enum class PolicyKind : std::uint8_t {
    Sisp,            // greedy inside the window until urgent data is buffered, then rarest outside
    Eisp,            // requests never leave the window
    RarestBaseline,  // plain rarest-first, no window
};

std::string_view to_string(PolicyKind policy);
PolicyKind parse_policy(std::string_view name);

/// High-priority region [d, min(d + w - 1, t)] anchored at the playhead d.
struct SlidingWindow {
    PieceIndex d = 1;
    PieceIndex w = 1;
    PieceIndex t = 1;

    PieceIndex first() const { return d; }
    PieceIndex last() const { return d + w - 1 < t ? d + w - 1 : t; }
    bool contains(PieceIndex piece) const { return piece >= first() && piece <= last(); }
};

enum class JumpDirection : std::uint8_t { Backward, Forward };

/// Playhead advanced by j_play played pieces; clamped at t.
SlidingWindow window_advance_play(SlidingWindow win, PieceIndex j_play);
/// Jump by j pieces; clamped to [1, t].
SlidingWindow window_jump(SlidingWindow win, JumpDirection direction, PieceIndex j);

/// Pieces d .. d+v-1 (truncated at t) are all owned.
bool urgency_satisfied(const SlidingWindow& win, const PieceMap& local, PieceIndex v);

/// Pieces a peer has in flight, at most one per serving neighbour.
class RequestLedger {
public:
    bool outstanding(PieceIndex piece) const { return by_piece_.contains(piece); }
    std::optional<PieceIndex> request_to(PeerId neighbour) const;
    std::size_t size() const { return by_piece_.size(); }

    /// Throws SimulationFault if the piece or the neighbour is already busy.
    void record(PieceIndex piece, PeerId neighbour);
    /// Clears the request sent to a neighbour, returning its piece.
    std::optional<PieceIndex> release(PeerId neighbour);

    const std::map<PieceIndex, PeerId>& by_piece() const { return by_piece_; }

private:
    std::map<PieceIndex, PeerId> by_piece_;
    std::map<PeerId, PieceIndex> by_peer_;
};

/// Everything the request decision looks at. Replica counts are indexed by
/// piece (entry 0 unused) and count every peer owning the piece.
struct SelectionView {
    PolicyKind policy = PolicyKind::Eisp;
    SlidingWindow window;
    PieceIndex urgency = 1;  // v
    const PieceMap* local = nullptr;
    const RequestLedger* ledger = nullptr;
    const PieceMap* neighbour = nullptr;
    std::span<const std::uint32_t> replicas;
};

/// Piece to request next from one neighbour, without recording it. Rarest
/// ties are broken with `tie_break`, drawing only when a tie exists.
std::optional<PieceIndex> select_piece(const SelectionView& view, RngStream& tie_break);

/// select_piece() followed by recording the choice in the ledger.
std::optional<PieceIndex> next_request(const SelectionView& view, PeerId neighbour,
                                       RequestLedger& ledger, RngStream& tie_break);

/// Neighbours unchoking the local peer, kept in the order they unchoked it.
class UnchokeOrder {
public:
    struct Entry {
        PeerId peer;
        SimTime at;
        std::uint64_t seq;
    };

    void add(PeerId peer, SimTime at, std::uint64_t seq);
    void remove(PeerId peer);
    bool contains(PeerId peer) const;
    const std::vector<Entry>& entries() const { return entries_; }

    /// Earliest-unchoking neighbour for which `idle` holds.
    std::optional<PeerId> choose_serving_neighbour(
        const std::function<bool(PeerId)>& idle) const;

private:
    std::vector<Entry> entries_;  // sorted by (at, seq)
};

}  // namespace vodswarm
