#include "vodswarm/piece_selection.hpp"

#include <algorithm>
#include <limits>

#include <fmt/format.h>

namespace vodswarm {

std::string_view to_string(PolicyKind policy) {
    switch (policy) {
        case PolicyKind::Sisp: return "sisp";
        case PolicyKind::Eisp: return "eisp";
        case PolicyKind::RarestBaseline: return "rarest";
    }
    return "unknown";
}

PolicyKind parse_policy(std::string_view name) {
    for (auto p : {PolicyKind::Sisp, PolicyKind::Eisp, PolicyKind::RarestBaseline}) {
        if (to_string(p) == name) return p;
    }
    throw std::invalid_argument(fmt::format("unknown protocol '{}'", name));
}

SlidingWindow window_advance_play(SlidingWindow win, PieceIndex j_play) {
    win.d = win.t - win.d < j_play ? win.t : win.d + j_play;
    return win;
}

SlidingWindow window_jump(SlidingWindow win, JumpDirection direction, PieceIndex j) {
    if (direction == JumpDirection::Forward) {
        win.d = win.t - win.d < j ? win.t : win.d + j;
    } else {
        win.d = win.d <= j ? 1 : win.d - j;
    }
    return win;
}

bool urgency_satisfied(const SlidingWindow& win, const PieceMap& local, PieceIndex v) {
    const PieceIndex end = std::min<std::uint64_t>(std::uint64_t{win.d} + v - 1, win.t);
    for (PieceIndex p = win.d; p <= end; ++p) {
        if (!local.owns(p)) return false;
    }
    return true;
}

std::optional<PieceIndex> RequestLedger::request_to(PeerId neighbour) const {
    auto it = by_peer_.find(neighbour);
    if (it == by_peer_.end()) return std::nullopt;
    return it->second;
}

void RequestLedger::record(PieceIndex piece, PeerId neighbour) {
    if (by_piece_.contains(piece)) {
        throw SimulationFault(fmt::format("piece {} requested twice", piece));
    }
    if (by_peer_.contains(neighbour)) {
        throw SimulationFault(fmt::format("second request queued at neighbour {}", neighbour));
    }
    by_piece_.emplace(piece, neighbour);
    by_peer_.emplace(neighbour, piece);
}

std::optional<PieceIndex> RequestLedger::release(PeerId neighbour) {
    auto it = by_peer_.find(neighbour);
    if (it == by_peer_.end()) return std::nullopt;
    const PieceIndex piece = it->second;
    by_peer_.erase(it);
    by_piece_.erase(piece);
    return piece;
}

namespace {

bool eligible(const SelectionView& view, PieceIndex p) {
    return !view.local->owns(p) && !view.ledger->outstanding(p) && view.neighbour->owns(p);
}

std::optional<PieceIndex> lowest_inside(const SelectionView& view) {
    const auto& win = view.window;
    for (PieceIndex p = win.first(); p <= win.last(); ++p) {
        if (eligible(view, p)) return p;
    }
    return std::nullopt;
}

enum class Region { Inside, Outside, Anywhere };

std::optional<PieceIndex> rarest(const SelectionView& view, Region region, RngStream& tie_break) {
    std::uint32_t best = std::numeric_limits<std::uint32_t>::max();
    std::vector<PieceIndex> tied;
    const PieceIndex t = view.window.t;
    PieceIndex lo = 1;
    PieceIndex hi = t;
    if (region == Region::Inside) {
        lo = view.window.first();
        hi = view.window.last();
    }
    for (PieceIndex p = lo; p <= hi; ++p) {
        if (region == Region::Outside && view.window.contains(p)) continue;
        if (!eligible(view, p)) continue;
        const std::uint32_t count = view.replicas[p];
        if (count < best) {
            best = count;
            tied.assign(1, p);
        } else if (count == best) {
            tied.push_back(p);
        }
    }
    if (tied.empty()) return std::nullopt;
    if (tied.size() == 1) return tied.front();
    return tied[tie_break.index(tied.size())];
}

}  // namespace

std::optional<PieceIndex> select_piece(const SelectionView& view, RngStream& tie_break) {
    switch (view.policy) {
        case PolicyKind::RarestBaseline:
            return rarest(view, Region::Anywhere, tie_break);
        case PolicyKind::Eisp:
            if (urgency_satisfied(view.window, *view.local, view.urgency)) {
                return rarest(view, Region::Inside, tie_break);
            }
            return lowest_inside(view);
        case PolicyKind::Sisp:
            if (urgency_satisfied(view.window, *view.local, view.urgency)) {
                return rarest(view, Region::Outside, tie_break);
            }
            if (auto p = lowest_inside(view)) return p;
            return rarest(view, Region::Outside, tie_break);
    }
    return std::nullopt;
}

std::optional<PieceIndex> next_request(const SelectionView& view, PeerId neighbour,
                                       RequestLedger& ledger, RngStream& tie_break) {
    auto piece = select_piece(view, tie_break);
    if (piece) ledger.record(*piece, neighbour);
    return piece;
}

void UnchokeOrder::add(PeerId peer, SimTime at, std::uint64_t seq) {
    remove(peer);
    Entry e{peer, at, seq};
    auto pos = std::upper_bound(entries_.begin(), entries_.end(), e,
                                [](const Entry& a, const Entry& b) {
                                    if (a.at != b.at) return a.at < b.at;
                                    return a.seq < b.seq;
                                });
    entries_.insert(pos, e);
}

void UnchokeOrder::remove(PeerId peer) {
    std::erase_if(entries_, [peer](const Entry& e) { return e.peer == peer; });
}

bool UnchokeOrder::contains(PeerId peer) const {
    return std::any_of(entries_.begin(), entries_.end(),
                       [peer](const Entry& e) { return e.peer == peer; });
}

std::optional<PeerId> UnchokeOrder::choose_serving_neighbour(
    const std::function<bool(PeerId)>& idle) const {
    for (const auto& e : entries_) {
        if (idle(e.peer)) return e.peer;
    }
    return std::nullopt;
}

}  // namespace vodswarm
