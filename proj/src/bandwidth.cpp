#include "vodswarm/bandwidth.hpp"

#include <algorithm>
#include <unordered_map>

#include "vodswarm/sim_core.hpp"

namespace vodswarm {

std::vector<double> share_rates(std::span<const FlowEnds> flows, double r_up, double r_down) {
    std::unordered_map<PeerId, std::uint32_t> out_count;
    std::unordered_map<PeerId, std::uint32_t> in_count;
    for (const auto& f : flows) {
        ++out_count[f.src];
        ++in_count[f.dst];
    }
    std::vector<double> rates;
    rates.reserve(flows.size());
    for (const auto& f : flows) {
        const double send_share = r_up / out_count[f.src];
        const double recv_share = r_down / in_count[f.dst];
        const double rate = std::min(send_share, recv_share);
        if (!(rate > 0.0)) throw SimulationFault("flow assigned a zero transfer rate");
        rates.push_back(rate);
    }
    return rates;
}

}  // namespace vodswarm
