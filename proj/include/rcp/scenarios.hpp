#pragma once

// Packet-level scenarios: one bottleneck, C = 1 packet per unit time, 100 flows.
// The router starts 10 % above capacity so every run begins off equilibrium.

#include <string>
#include <vector>

#include "rcp/packet_sim.hpp"

namespace rcp {

struct NamedScenario {
    std::string name;
    PacketSimConfig config;
};

[[nodiscard]] inline PacketSimConfig packet_scenario(double a, double beta, double tau) {
    PacketSimConfig c;
    c.num_flows = 100;
    c.C = 1.0;
    c.tau = tau;
    c.a = a;
    c.beta = beta;
    c.slot = tau / 100.0;
    c.horizon = 200.0 * tau;
    c.initial_rate = 1.1;
    return c;
}

/// Rate-only vs queue feedback at tau = 100, then a sub-critical and a
/// super-critical queue-feedback pair at tau = 200.
[[nodiscard]] inline std::vector<NamedScenario> reference_packet_scenarios() {
    return {
        {"rate_only", packet_scenario(0.5, 0.0, 100.0)},
        {"queue_feedback", packet_scenario(0.5, 1.0, 100.0)},
        {"subcritical", packet_scenario(0.8, 0.55, 200.0)},
        {"supercritical", packet_scenario(1.3, 0.4, 200.0)},
    };
}

}  // namespace rcp
