#include "vodswarm/peer_selection.hpp"

#include <algorithm>
#include <stdexcept>

namespace vodswarm {

void PeerSelectionParams::validate() const {
    if (x2 < 1 || x1 < x2) {
        throw std::invalid_argument("slot counts must satisfy x1 >= x2 >= 1");
    }
    if (k < 1) throw std::invalid_argument("optimistic multiplier k must be >= 1");
    if (!(delta > 0.0)) throw std::invalid_argument("regular interval delta must be positive");
}

double RateEstimator::received_from(PeerId peer) const {
    auto it = received_from_.find(peer);
    return it == received_from_.end() ? 0.0 : it->second;
}

double RateEstimator::sent_to(PeerId peer) const {
    auto it = sent_to_.find(peer);
    return it == sent_to_.end() ? 0.0 : it->second;
}

void RateEstimator::reset() {
    received_from_.clear();
    sent_to_.clear();
}

void RateEstimator::forget(PeerId peer) {
    received_from_.erase(peer);
    sent_to_.erase(peer);
}

bool ChokeState::unchokes(PeerId peer) const {
    return std::find(regular.begin(), regular.end(), peer) != regular.end() ||
           std::find(optimistic.begin(), optimistic.end(), peer) != optimistic.end();
}

std::vector<PeerId> ChokeState::all() const {
    std::vector<PeerId> out(regular);
    out.insert(out.end(), optimistic.begin(), optimistic.end());
    std::sort(out.begin(), out.end());
    return out;
}

void ChokeState::remove(PeerId peer) {
    std::erase(regular, peer);
    std::erase(optimistic, peer);
}

namespace {

// Moves `take` uniformly chosen elements of [first, last) to its front.
template <typename It>
void partial_shuffle(It first, It last, std::size_t take, RngStream& rng) {
    const auto n = static_cast<std::size_t>(last - first);
    for (std::size_t i = 0; i < take && i + 1 < n; ++i) {
        std::iter_swap(first + i, first + i + rng.index(n - i));
    }
}

}  // namespace

std::vector<PeerId> pick_fastest(std::span<const RankedPeer> candidates, int x1,
                                 RngStream& tie_break) {
    std::vector<RankedPeer> sorted(candidates.begin(), candidates.end());
    std::sort(sorted.begin(), sorted.end(), [](const RankedPeer& a, const RankedPeer& b) {
        if (a.rate != b.rate) return a.rate > b.rate;
        return a.id < b.id;
    });
    const auto want = static_cast<std::size_t>(std::max(x1, 0));
    if (sorted.size() > want && want > 0) {
        // Tie group straddling the cut-off.
        const double edge = sorted[want - 1].rate;
        auto group_begin = std::find_if(sorted.begin(), sorted.end(),
                                        [edge](const RankedPeer& r) { return r.rate == edge; });
        auto group_end = std::find_if(group_begin, sorted.end(),
                                      [edge](const RankedPeer& r) { return r.rate != edge; });
        if (group_end - group_begin > 1 && group_end > sorted.begin() + want) {
            const auto slots_in_group =
                static_cast<std::size_t>(sorted.begin() + want - group_begin);
            partial_shuffle(group_begin, group_end, slots_in_group, tie_break);
        }
    }
    std::vector<PeerId> chosen;
    for (std::size_t i = 0; i < sorted.size() && i < want; ++i) chosen.push_back(sorted[i].id);
    std::sort(chosen.begin(), chosen.end());
    return chosen;
}

std::vector<PeerId> regular_unchoke(bool seed_state, std::span<const PeerId> interested_peers,
                                    const RateEstimator& estimator,
                                    const PeerSelectionParams& params, RngStream& tie_break) {
    std::vector<RankedPeer> ranked;
    ranked.reserve(interested_peers.size());
    for (PeerId id : interested_peers) {
        const double bytes = seed_state ? estimator.sent_to(id) : estimator.received_from(id);
        ranked.push_back({id, bytes / params.delta});
    }
    return pick_fastest(ranked, params.x1, tie_break);
}

std::vector<PeerId> optimistic_unchoke(std::span<const PeerId> interested_peers,
                                       std::span<const PeerId> regular,
                                       const PeerSelectionParams& params, RngStream& choice) {
    std::vector<PeerId> eligible;
    for (PeerId id : interested_peers) {
        if (std::find(regular.begin(), regular.end(), id) == regular.end()) eligible.push_back(id);
    }
    std::sort(eligible.begin(), eligible.end());
    const auto want = static_cast<std::size_t>(params.x2);
    if (eligible.size() > want) {
        partial_shuffle(eligible.begin(), eligible.end(), want, choice);
        eligible.resize(want);
        std::sort(eligible.begin(), eligible.end());
    }
    return eligible;
}

}  // namespace vodswarm
