#pragma once

// Nonlinear delayed fluid model of one RCP bottleneck:
//     R'(t) = kappa R(t) / (C tau) * (a (C - R(t - tau)) - beta q(t) / tau)
//     q'(t) = kappa (R(t - tau) - C)
// integrated by the method of steps with classical RK4 on a grid h = tau / m.
// Delayed values at half steps come from cubic Hermite interpolation of the
// stored (R, R') samples, so every stage-time delay lands on a known interval.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rcp/errors.hpp"
#include "rcp/params.hpp"

namespace rcp {

struct InitialCondition {
    double R0 = 1.0;  ///< constant history value of R on [-tau, 0]
    double q0 = 0.0;  ///< queue at t = 0
};

struct SimConfig {
    double horizon = 100.0;
    int steps_per_delay = 20;
    bool clamp_queue = false;  ///< enforce q >= 0 (queue cannot drain below empty)
    std::optional<double> blowup_cap;  ///< defaults to 1e6 C
};

struct Trajectory {
    std::vector<double> times;
    std::vector<double> R_values;
    std::vector<double> q_values;
    double h = 0.0;
    int steps_per_delay = 0;
    bool diverged = false;
    std::optional<double> divergence_time;

    [[nodiscard]] std::size_t size() const noexcept { return times.size(); }
    [[nodiscard]] bool empty() const noexcept { return times.empty(); }
};

namespace detail {

struct FluidRhs {
    double kappa, a, beta, C, tau;
    bool clamp;

    [[nodiscard]] double dR(double R, double q, double Rd) const {
        return kappa * R / (C * tau) * (a * (C - Rd) - beta * q / tau);
    }
    [[nodiscard]] double dq(double q, double Rd) const {
        if (clamp && q <= 0.0 && Rd < C) return 0.0;
        return kappa * (Rd - C);
    }
};

}  // namespace detail

[[nodiscard]] inline Trajectory simulate(const ValidatedParams& p, const InitialCondition& ic,
                                         const SimConfig& cfg) {
    detail::require_positive(ic.R0, "R0");
    if (!std::isfinite(ic.q0)) throw DomainError("q0", "must be finite");
    if (cfg.clamp_queue && ic.q0 < 0.0) throw DomainError("q0", "must be >= 0 with clamp_queue");
    detail::require_positive(cfg.horizon, "horizon");
    if (cfg.steps_per_delay < 4) throw DomainError("steps_per_delay", "must be >= 4");
    const double cap = cfg.blowup_cap.value_or(1e6 * p.C());
    if (!std::isfinite(cap) || !(cap > p.C())) throw DomainError("blowup_cap", "must exceed C");

    const int m = cfg.steps_per_delay;
    const double h = p.tau() / m;
    const auto steps = static_cast<std::size_t>(std::ceil(cfg.horizon / h - 1e-9));
    const detail::FluidRhs f{p.kappa(), p.a(), p.beta(), p.C(), p.tau(), cfg.clamp_queue};

    Trajectory tr;
    tr.h = h;
    tr.steps_per_delay = m;
    tr.times.reserve(steps + 1);
    tr.R_values.reserve(steps + 1);
    tr.q_values.reserve(steps + 1);
    std::vector<double> dR;  // R'(t_n) along the grid, for Hermite interpolation
    dR.reserve(steps + 1);

    // Delayed R at t_k (k may be negative) and at the midpoint of [t_k, t_{k+1}].
    auto delayed_node = [&](std::ptrdiff_t k) {
        return k <= 0 ? ic.R0 : tr.R_values[static_cast<std::size_t>(k)];
    };
    auto delayed_mid = [&](std::ptrdiff_t k) {
        if (k < 0) return ic.R0;
        const auto i = static_cast<std::size_t>(k);
        return 0.5 * (tr.R_values[i] + tr.R_values[i + 1]) + h * (dR[i] - dR[i + 1]) / 8.0;
    };

    double R = ic.R0;
    double q = ic.q0;
    tr.times.push_back(0.0);
    tr.R_values.push_back(R);
    tr.q_values.push_back(q);
    dR.push_back(f.dR(R, q, ic.R0));

    for (std::size_t n = 0; n < steps; ++n) {
        const auto k = static_cast<std::ptrdiff_t>(n) - m;
        const double d0 = delayed_node(k);
        const double dm = delayed_mid(k);
        const double d1 = delayed_node(k + 1);

        const double k1R = f.dR(R, q, d0), k1q = f.dq(q, d0);
        const double R2 = R + 0.5 * h * k1R, q2 = q + 0.5 * h * k1q;
        const double k2R = f.dR(R2, q2, dm), k2q = f.dq(q2, dm);
        const double R3 = R + 0.5 * h * k2R, q3 = q + 0.5 * h * k2q;
        const double k3R = f.dR(R3, q3, dm), k3q = f.dq(q3, dm);
        const double R4 = R + h * k3R, q4 = q + h * k3q;
        const double k4R = f.dR(R4, q4, d1), k4q = f.dq(q4, d1);

        R += h / 6.0 * (k1R + 2.0 * k2R + 2.0 * k3R + k4R);
        q += h / 6.0 * (k1q + 2.0 * k2q + 2.0 * k3q + k4q);
        if (cfg.clamp_queue) q = std::max(q, 0.0);

        const double t = static_cast<double>(n + 1) * h;
        if (!std::isfinite(R) || !std::isfinite(q) || std::abs(R) > cap) {
            tr.diverged = true;
            tr.divergence_time = t;
            break;
        }
        tr.times.push_back(t);
        tr.R_values.push_back(R);
        tr.q_values.push_back(q);
        dR.push_back(f.dR(R, q, d1));
    }
    return tr;
}

/// (R(t), R(t - tau)) for every grid point with t >= tau.
[[nodiscard]] inline std::vector<std::pair<double, double>> phase_portrait(const Trajectory& tr,
                                                                           double tau) {
    detail::require_positive(tau, "tau");
    if (tr.empty() || tr.h <= 0.0) throw DomainError("trajectory", "empty");
    const auto m = static_cast<std::size_t>(std::llround(tau / tr.h));
    if (std::abs(static_cast<double>(m) * tr.h - tau) > 1e-9 * tau) {
        throw DomainError("tau", "not a multiple of the trajectory step");
    }
    if (tr.times.back() <= tau) throw DomainError("horizon", "must exceed tau");
    std::vector<std::pair<double, double>> out;
    out.reserve(tr.size() - m);
    for (std::size_t n = m; n < tr.size(); ++n) out.emplace_back(tr.R_values[n], tr.R_values[n - m]);
    return out;
}

enum class Verdict { converged, sustained_oscillation, diverged };

[[nodiscard]] inline const char* to_string(Verdict v) noexcept {
    switch (v) {
        case Verdict::converged: return "converged";
        case Verdict::sustained_oscillation: return "sustained_oscillation";
        case Verdict::diverged: return "diverged";
    }
    return "?";
}

struct TrajectoryVerdict {
    Verdict kind = Verdict::converged;
    double amplitude = 0.0;    ///< (max - min) / 2 of R over the tail
    double max_deviation = 0.0;  ///< max |R - R*| over the tail
};

struct VerdictOptions {
    double tol_conv_rel = 1e-4;   ///< converged if max |R - R*| < tol_conv_rel * R*
    double stationarity = 0.05;   ///< half-tail amplitudes must agree to this relative
};

[[nodiscard]] inline TrajectoryVerdict analyze_trajectory(const Trajectory& tr, const Equilibrium& eq,
                                                          double tail_fraction,
                                                          const VerdictOptions& opt = {}) {
    if (!(tail_fraction > 0.0 && tail_fraction < 1.0)) {
        throw DomainError("tail_fraction", "must lie in (0, 1)");
    }
    if (tr.empty()) throw DomainError("trajectory", "empty");
    TrajectoryVerdict v;
    if (tr.diverged) {
        v.kind = Verdict::diverged;
        return v;
    }
    const std::size_t n = tr.size();
    const auto len = std::max<std::size_t>(4, static_cast<std::size_t>(tail_fraction * static_cast<double>(n)));
    if (len > n) throw DomainError("trajectory", "too short for the requested tail");
    const std::size_t start = n - len;
    const std::size_t mid = start + len / 2;

    auto half_amp = [&](std::size_t lo, std::size_t hi) {
        const auto [mn, mx] = std::minmax_element(tr.R_values.begin() + static_cast<std::ptrdiff_t>(lo),
                                                  tr.R_values.begin() + static_cast<std::ptrdiff_t>(hi));
        return 0.5 * (*mx - *mn);
    };
    for (std::size_t i = start; i < n; ++i) {
        v.max_deviation = std::max(v.max_deviation, std::abs(tr.R_values[i] - eq.R_star));
    }
    v.amplitude = half_amp(start, n);
    if (v.max_deviation < opt.tol_conv_rel * eq.R_star) {
        v.kind = Verdict::converged;
        return v;
    }
    const double a1 = half_amp(start, mid);
    const double a2 = half_amp(mid, n);
    if (std::abs(a1 - a2) <= opt.stationarity * std::max(a1, a2)) {
        v.kind = Verdict::sustained_oscillation;
        return v;
    }
    throw InconclusiveError("analyze_trajectory: amplitude still trending (" + std::to_string(a1) +
                            " -> " + std::to_string(a2) + ")");
}

}  // namespace rcp
