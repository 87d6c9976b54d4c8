#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace vodswarm {

using PeerId = std::uint32_t;
inline constexpr PeerId kSeedId = 0;

struct FlowEnds {
    PeerId src;
    PeerId dst;
};

/// Fluid bandwidth sharing: every sender splits r_up equally over its active
/// outbound flows, every receiver splits r_down equally over its inbound
/// flows, and a flow runs at the smaller of its two shares. Leftover capacity
/// from the min() is not redistributed.
std::vector<double> share_rates(std::span<const FlowEnds> flows, double r_up, double r_down);

}  // namespace vodswarm
