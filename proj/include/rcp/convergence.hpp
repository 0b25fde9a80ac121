#pragma once

// Exponential decay rate sigma toward (C, 0): |x(t)| ~ e^{-sigma t}.

#include <cmath>
#include <string>

#include "rcp/errors.hpp"
#include "rcp/linear_stability.hpp"
#include "rcp/numerics.hpp"
#include "rcp/params.hpp"

namespace rcp {

enum class Regime { non_oscillatory_stable, oscillatory_stable, unstable };

/// Which candidate attained the minimum. sigma1 = 1/tau, sigma2 solves
/// sigma tau e^{-sigma tau} = a, sigma3 comes from g(u) = a.
enum class Branch { sigma1, sigma2, sigma3, rightmost_root, none };

[[nodiscard]] inline const char* to_string(Regime r) noexcept {
    switch (r) {
        case Regime::non_oscillatory_stable: return "non_oscillatory_stable";
        case Regime::oscillatory_stable: return "oscillatory_stable";
        case Regime::unstable: return "unstable";
    }
    return "?";
}

[[nodiscard]] inline const char* to_string(Branch b) noexcept {
    switch (b) {
        case Branch::sigma1: return "sigma1";
        case Branch::sigma2: return "sigma2";
        case Branch::sigma3: return "sigma3";
        case Branch::rightmost_root: return "rightmost-root";
        case Branch::none: return "none";
    }
    return "?";
}

struct ConvergenceReport {
    double sigma = 0.0;  ///< >= 0; zero iff regime is unstable
    Branch binding_branch = Branch::none;
    Regime regime = Regime::unstable;
    double max_residual = 0.0;  ///< spectral residual of the rightmost root, 0 for closed forms
};

/// Regime of the rate-only model from a alone.
[[nodiscard]] inline Regime classify_regime(double a) {
    detail::require_positive(a, "a");
    if (a <= numerics::inv_e) return Regime::non_oscillatory_stable;
    if (a < numerics::pi / 2) return Regime::oscillatory_stable;
    return Regime::unstable;
}

/// True iff the rate-only model converges without oscillation (a <= 1/e).
[[nodiscard]] inline bool non_oscillatory(double a) {
    detail::require_positive(a, "a");
    return a <= numerics::inv_e;
}

/// g(u) = (u / sin u) e^{-u / tan u}, increasing from 1/e at u -> 0 to pi/2 at u = pi/2.
[[nodiscard]] inline double g_of_u(double u) {
    return u / std::sin(u) * std::exp(-u / std::tan(u));
}

/// Decay rate of the rate-only model (beta = 0, kappa = 1) from the closed-form case analysis.
[[nodiscard]] inline ConvergenceReport decay_rate_no_queue(double a, double tau) {
    detail::require_positive(a, "a");
    detail::require_positive(tau, "tau");
    ConvergenceReport r;
    r.regime = classify_regime(a);
    if (r.regime == Regime::unstable) return r;

    if (a == numerics::inv_e) {
        // Double real root at lambda tau = -1; sigma1 and sigma2 coincide.
        r.sigma = 1.0 / tau;
        r.binding_branch = Branch::sigma1;
        return r;
    }
    if (a < numerics::inv_e) {
        // s e^{-s} increases on (0, 1) from 0 to 1/e.
        const double s = numerics::bisect([a](double x) { return x * std::exp(-x) - a; }, 0.0, 1.0,
                                          1e-15);
        r.sigma = s / tau;
        r.binding_branch = Branch::sigma2;
        return r;
    }
    const double u = numerics::bisect([a](double x) { return g_of_u(x) - a; }, 1e-12,
                                      numerics::pi / 2, 1e-15);
    r.sigma = std::max(0.0, u / (tau * std::tan(u)));
    r.binding_branch = Branch::sigma3;
    return r;
}

/// Decay rate from the rightmost characteristic root; valid for any beta >= 0.
[[nodiscard]] inline ConvergenceReport decay_rate_with_queue(const ValidatedParams& p,
                                                             const SpectralOptions& opt = {}) {
    ConvergenceReport r;
    r.binding_branch = Branch::rightmost_root;
    const Spectrum s = rightmost_roots(p, 2, opt);
    const cplx lead = s.rightmost();
    r.max_residual = s.residuals.front();
    if (!is_locally_stable(p) || !(lead.real() < 0.0)) {
        r.sigma = 0.0;
        r.regime = Regime::unstable;
        r.binding_branch = Branch::none;
        return r;
    }
    r.sigma = -lead.real();
    r.regime = lead.imag() == 0.0 ? Regime::non_oscillatory_stable : Regime::oscillatory_stable;
    return r;
}

}  // namespace rcp
