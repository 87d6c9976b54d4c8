#pragma once

#include <span>
#include <unordered_map>
#include <vector>

#include "vodswarm/bandwidth.hpp"
#include "vodswarm/sim_core.hpp"

namespace vodswarm {

/// Upload-slot configuration of the choke algorithm.
struct PeerSelectionParams {
    int x1 = 3;          // regular slots
    int x2 = 1;          // optimistic slots
    int k = 3;           // optimistic interval = k * delta
    double delta = 10.0; // regular interval, seconds

    /// Throws std::invalid_argument unless x1 >= x2 >= 1, k >= 1, delta > 0.
    void validate() const;
    double optimistic_interval() const { return k * delta; }
    int slots() const { return x1 + x2; }
};

/// Bytes exchanged with each neighbour during the current regular interval.
class RateEstimator {
public:
    void add_received(PeerId from, double bytes) { received_from_[from] += bytes; }
    void add_sent(PeerId to, double bytes) { sent_to_[to] += bytes; }

    double received_from(PeerId peer) const;
    double sent_to(PeerId peer) const;

    void reset();
    void forget(PeerId peer);

private:
    std::unordered_map<PeerId, double> received_from_;
    std::unordered_map<PeerId, double> sent_to_;
};

/// Neighbours a peer currently unchokes. Sets are disjoint.
struct ChokeState {
    std::vector<PeerId> regular;
    std::vector<PeerId> optimistic;

    bool unchokes(PeerId peer) const;
    std::size_t size() const { return regular.size() + optimistic.size(); }
    /// Union of both sets, sorted.
    std::vector<PeerId> all() const;
    void remove(PeerId peer);
};

struct RankedPeer {
    PeerId id;
    double rate;
};

/// Picks the top-x1 peers by rate. Ties that straddle the cut-off are broken
/// uniformly at random; a draw is consumed only in that case.
std::vector<PeerId> pick_fastest(std::span<const RankedPeer> candidates, int x1,
                                 RngStream& tie_break);

/// Regular unchoke decision for one peer. A leecher ranks interested
/// neighbours by the bytes it received from them this interval; a seed ranks
/// them by the bytes it sent to them.
std::vector<PeerId> regular_unchoke(bool seed_state, std::span<const PeerId> interested_peers,
                                    const RateEstimator& estimator,
                                    const PeerSelectionParams& params, RngStream& tie_break);

/// Optimistic unchoke: min(x2, eligible) interested neighbours that are not
/// regular-unchoked, chosen uniformly at random.
std::vector<PeerId> optimistic_unchoke(std::span<const PeerId> interested_peers,
                                       std::span<const PeerId> regular,
                                       const PeerSelectionParams& params, RngStream& choice);

}  // namespace vodswarm
