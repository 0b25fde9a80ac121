#pragma once

// Slotted, deterministic packet-level model of N RCP flows sharing one
// bottleneck. Packets are fractional: in each slot a flow injects rate * slot.
// The router's fair rate reaches sources after the forward half of the RTT and
// their packets reach the link after the reverse half, so the loop delay is tau.
//
// The router rate R is kept in link units (equilibrium R = C); each flow sends
// R / N.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <deque>
#include <fstream>
#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "rcp/errors.hpp"

namespace rcp {

struct PacketSimConfig {
    int num_flows = 100;
    double C = 1.0;
    double tau = 100.0;
    double a = 0.5;
    double beta = 0.0;
    std::optional<double> update_interval;  ///< defaults to tau
    double slot = 1.0;
    double horizon = 5000.0;
    std::optional<double> initial_rate;     ///< defaults to C
    std::optional<double> max_queue;        ///< tail-drop cap; unbounded when absent

    [[nodiscard]] double update_interval_or_default() const { return update_interval.value_or(tau); }
    [[nodiscard]] double initial_rate_or_default() const { return initial_rate.value_or(C); }
};

struct PacketTrace {
    std::vector<double> times;         ///< end of each slot
    std::vector<double> queue_lengths;  ///< packets, after the slot
    std::vector<double> fair_rates;    ///< router rate in force during the slot
    std::vector<double> utilization;   ///< departures / (C slot)
    std::vector<double> arrivals;      ///< packets reaching the link during the slot
    std::vector<double> drops;         ///< packets dropped at max_queue during the slot

    [[nodiscard]] std::size_t size() const noexcept { return times.size(); }
    [[nodiscard]] bool empty() const noexcept { return times.empty(); }
};

inline constexpr double rate_floor_rel = 1e-6;
inline constexpr double rate_cap_rel = 100.0;

namespace detail {

inline long whole_multiple(double x, double unit, const char* field) {
    const double r = x / unit;
    const long n = std::lround(r);
    if (n < 1 || std::abs(r - static_cast<double>(n)) > 1e-9 * std::max(1.0, r)) {
        throw ConfigError(field, "must be a whole multiple of slot");
    }
    return n;
}

}  // namespace detail

inline void validate_packet_config(const PacketSimConfig& c) {
    auto pos = [](double v, const char* f) {
        if (!std::isfinite(v) || !(v > 0.0)) throw ConfigError(f, "must be finite and > 0");
    };
    if (c.num_flows < 1) throw ConfigError("num_flows", "must be >= 1");
    pos(c.C, "C");
    pos(c.tau, "tau");
    pos(c.a, "a");
    if (!std::isfinite(c.beta) || c.beta < 0.0) throw ConfigError("beta", "must be finite and >= 0");
    pos(c.slot, "slot");
    pos(c.horizon, "horizon");
    pos(c.update_interval_or_default(), "update_interval");
    pos(c.initial_rate_or_default(), "initial_rate");
    if (c.max_queue) pos(*c.max_queue, "max_queue");
    if (c.slot > c.tau / 10.0 * (1.0 + 1e-12)) throw ConfigError("slot", "must be <= tau / 10");
    if (!(c.horizon > 10.0 * c.tau)) throw ConfigError("horizon", "must exceed 10 tau");
    detail::whole_multiple(c.tau, c.slot, "tau");
    detail::whole_multiple(c.update_interval_or_default(), c.slot, "update_interval");
}

[[nodiscard]] inline PacketTrace run_packet_sim(const PacketSimConfig& cfg) {
    validate_packet_config(cfg);
    const double dt = cfg.slot;
    const long delay_slots = detail::whole_multiple(cfg.tau, dt, "tau");
    const long forward = delay_slots / 2;
    const long reverse = delay_slots - forward;
    const long update_slots = detail::whole_multiple(cfg.update_interval_or_default(), dt, "update_interval");
    const double T = static_cast<double>(update_slots) * dt;
    const auto slots = static_cast<std::size_t>(std::floor(cfg.horizon / dt + 1e-9));
    const auto N = static_cast<std::size_t>(cfg.num_flows);
    const double lo = rate_floor_rel * cfg.C;
    const double hi = rate_cap_rel * cfg.C;

    double R = std::clamp(cfg.initial_rate_or_default(), lo, hi);
    double q = 0.0;
    // Router rates announced in the last `forward` slots, oldest first.
    std::deque<double> announced(static_cast<std::size_t>(forward), R);
    // Per-flow packets in flight towards the link, oldest first.
    std::vector<std::deque<double>> in_flight(
        N, std::deque<double>(static_cast<std::size_t>(reverse), R / static_cast<double>(N) * dt));

    PacketTrace tr;
    tr.times.reserve(slots);
    tr.queue_lengths.reserve(slots);
    tr.fair_rates.reserve(slots);
    tr.utilization.reserve(slots);
    tr.arrivals.reserve(slots);
    tr.drops.reserve(slots);

    double interval_arrivals = 0.0;
    const double service = cfg.C * dt;
    for (std::size_t n = 0; n < slots; ++n) {
        // Sources transmit at the rate they learned `forward` slots ago.
        const double seen = announced.empty() ? R : announced.front();
        double arrived = 0.0;
        for (auto& pipe : in_flight) {
            pipe.push_back(seen / static_cast<double>(N) * dt);
            arrived += pipe.front();
            pipe.pop_front();
        }
        if (!announced.empty()) {
            announced.pop_front();
            announced.push_back(R);
        }

        const double backlog = q + arrived;
        const double departed = std::min(backlog, service);
        q = std::max(0.0, q + arrived - service);
        double dropped = 0.0;
        if (cfg.max_queue && q > *cfg.max_queue) {
            dropped = q - *cfg.max_queue;
            q = *cfg.max_queue;
        }
        interval_arrivals += arrived;

        tr.times.push_back(static_cast<double>(n + 1) * dt);
        tr.queue_lengths.push_back(q);
        tr.fair_rates.push_back(R);
        tr.utilization.push_back(departed / service);
        tr.arrivals.push_back(arrived);
        tr.drops.push_back(dropped);

        if ((n + 1) % static_cast<std::size_t>(update_slots) == 0) {
            const double y = interval_arrivals / T;
            R *= 1.0 + (T / cfg.tau) * (cfg.a * (cfg.C - y) - cfg.beta * q / cfg.tau) / cfg.C;
            R = std::clamp(R, lo, hi);
            interval_arrivals = 0.0;
        }
    }
    return tr;
}

struct QueueStats {
    double mean = 0.0;
    double amplitude = 0.0;  ///< (max - min) / 2 of the queue over the tail
    bool oscillating = false;
};

/// Tail-window queue statistics. Oscillating means the amplitude exceeds
/// 5 % of (mean + 1) and is stationary across the two half-tails.
[[nodiscard]] inline QueueStats queue_stats(const PacketTrace& tr, double tail_fraction,
                                            double stationarity = 0.05) {
    if (tr.empty()) throw DomainError("trace", "empty");
    if (!(tail_fraction > 0.0 && tail_fraction < 1.0)) {
        throw DomainError("tail_fraction", "must lie in (0, 1)");
    }
    const std::size_t n = tr.size();
    const auto len = std::max<std::size_t>(4, static_cast<std::size_t>(tail_fraction * static_cast<double>(n)));
    if (len > n) throw DomainError("trace", "too short for the requested tail");
    const auto first = tr.queue_lengths.begin() + static_cast<std::ptrdiff_t>(n - len);
    const auto middle = first + static_cast<std::ptrdiff_t>(len / 2);
    const auto last = tr.queue_lengths.end();
    auto amp = [](auto b, auto e) {
        const auto [mn, mx] = std::minmax_element(b, e);
        return 0.5 * (*mx - *mn);
    };
    QueueStats s;
    double sum = 0.0;
    for (auto it = first; it != last; ++it) sum += *it;
    s.mean = sum / static_cast<double>(len);
    s.amplitude = amp(first, last);
    if (!(s.amplitude > 0.05 * (s.mean + 1.0))) return s;
    const double a1 = amp(first, middle);
    const double a2 = amp(middle, last);
    if (std::abs(a1 - a2) > stationarity * std::max(a1, a2)) {
        throw InconclusiveError("queue_stats: amplitude still trending (" + std::to_string(a1) + " -> " +
                                std::to_string(a2) + ")");
    }
    s.oscillating = true;
    return s;
}

namespace detail {

inline double parse_number(std::string_view key, std::string_view text) {
    double v = 0.0;
    const auto* b = text.data();
    const auto* e = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(b, e, v);
    if (ec != std::errc() || ptr != e) throw ConfigError(std::string(key), "not a number: '" + std::string(text) + "'");
    return v;
}

inline std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace detail

/// Parses flat `key=value` lines; `#` starts a comment. Keys are the
/// PacketSimConfig field names. Later keys override earlier ones.
[[nodiscard]] inline PacketSimConfig parse_packet_config(std::istream& in) {
    PacketSimConfig c;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string_view s = line;
        if (const auto hash = s.find('#'); hash != std::string_view::npos) s = s.substr(0, hash);
        s = detail::trim(s);
        if (s.empty()) continue;
        const auto eq = s.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("line " + std::to_string(lineno), "expected key=value");
        }
        const auto key = detail::trim(s.substr(0, eq));
        const auto val = detail::trim(s.substr(eq + 1));
        const double v = detail::parse_number(key, val);
        if (key == "num_flows") {
            if (v != std::floor(v) || v < 1 || v > 1e7) throw ConfigError("num_flows", "must be a positive integer");
            c.num_flows = static_cast<int>(v);
        } else if (key == "C") c.C = v;
        else if (key == "tau") c.tau = v;
        else if (key == "a") c.a = v;
        else if (key == "beta") c.beta = v;
        else if (key == "update_interval") c.update_interval = v;
        else if (key == "slot") c.slot = v;
        else if (key == "horizon") c.horizon = v;
        else if (key == "initial_rate") c.initial_rate = v;
        else if (key == "max_queue") c.max_queue = v;
        else throw ConfigError(std::string(key), "unknown key");
    }
    validate_packet_config(c);
    return c;
}

[[nodiscard]] inline PacketSimConfig parse_packet_config_string(const std::string& text) {
    std::istringstream in(text);
    return parse_packet_config(in);
}

[[nodiscard]] inline PacketSimConfig load_packet_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config", "cannot open " + path);
    return parse_packet_config(in);
}

}  // namespace rcp
