#pragma once

// Hopf bifurcation of the RCP model at kappa = kappa_c, reduced to the centre
// manifold with the Poincare normal-form recipe. The cubic coefficient c1(0)
// is computed twice: once from a closed form in Theta = omega0 tau, and once
// by assembling the g-coefficients from the eigenvectors. The two must agree.

#include <array>
#include <cmath>
#include <complex>
#include <string>

#include "rcp/errors.hpp"
#include "rcp/linear_stability.hpp"
#include "rcp/numerics.hpp"
#include "rcp/params.hpp"

namespace rcp {

enum class HopfType { sub_critical, super_critical };

[[nodiscard]] inline const char* to_string(HopfType t) noexcept {
    return t == HopfType::sub_critical ? "sub_critical" : "super_critical";
}

/// Intermediate quantities of the centre-manifold computation.
struct HopfIntermediates {
    cplx q02;        ///< second component of the right eigenvector q0 = [1, q02]
    cplx qstar02;    ///< second component of the adjoint eigenvector (before Omega)
    cplx Omega;      ///< normalisation so that <q*, q> = 1
    cplx g20, g11, g02, g21;
    std::array<cplx, 2> e{};  ///< w20(theta) = ... + e exp(2 i omega0 theta)
    std::array<cplx, 2> f{};  ///< w11(theta) = f
    cplx A1, A2;
    std::array<cplx, 2> w20_0{};    ///< w20(0)
    std::array<cplx, 2> w20_tau{};  ///< w20(-tau)
};

struct HopfReport {
    double a = 0.0;
    double beta = 0.0;
    double C = 1.0;
    double tau = 1.0;
    double kappa_c = 0.0;
    double omega0 = 0.0;
    double Theta = 0.0;
    cplx c1;                   ///< from the g-coefficient path
    cplx c1_closed_form;       ///< from the closed form in Theta
    double alpha_prime = 0.0;  ///< printed closed form used for mu2
    double crossing_speed = 0.0;  ///< exact Re(d lambda / d kappa) at kappa_c
    double mu2 = 0.0;
    double beta2 = 0.0;
    HopfType classification = HopfType::super_critical;
    HopfIntermediates intermediates;
};

inline constexpr double hopf_surface_tol = 1e-6;
inline constexpr double c1_agreement_tol = 1e-8;

/// omega0 = (kappa / tau) theta(a, beta), valid only on the Hopf surface.
[[nodiscard]] inline double omega0_at_hopf(double a, double beta, double kappa, double tau) {
    detail::require_positive(kappa, "kappa");
    detail::require_positive(tau, "tau");
    const double th = theta(a, beta).theta;
    const double kc = hopf_kappa_c(a, beta);
    if (std::abs(kappa - kc) > hopf_surface_tol) {
        throw DomainError("kappa", "not on the Hopf surface: |kappa - kappa_c| = " +
                                       std::to_string(std::abs(kappa - kc)));
    }
    return kappa * th / tau;
}

namespace detail {

inline void require_theta(double Theta) {
    if (!std::isfinite(Theta) || !(Theta > 0.0) || Theta > numerics::pi / 2 + 1e-12) {
        throw DomainError("Theta", "must lie in (0, pi/2]");
    }
}

/// Full centre-manifold assembly at (a, beta, kappa, tau, C), beta >= 0, at a
/// Hopf point (kappa a = Theta sin Theta, kappa^2 beta = Theta^2 cos Theta).
inline cplx c1_from_g_coefficients(double a, double beta, double kappa, double tau, double C,
                                   HopfIntermediates& out) {
    const cplx i(0.0, 1.0);
    const double w = kappa * theta(a, beta).theta / tau;
    const cplx em = std::exp(-i * w * tau);
    const cplx ep = std::exp(i * w * tau);

    const cplx q02 = -i * w * tau * tau / (kappa * beta + i * a * w * tau);
    const cplx q02b = std::conj(q02);
    const cplx Omega =
        1.0 / (1.0 - i * w * tau + kappa * beta / (kappa * beta - i * a * w * tau));
    const cplx Ob = std::conj(Omega);

    const double ka = kappa * a / (C * tau);
    const double kb = kappa * beta / (C * tau * tau);
    const cplx g20 = -2.0 * Ob * (ka * em + kb * q02);
    const cplx g11 = -Ob * (ka * (ep + em) + kb * (q02 + q02b));
    const cplx g02 = -2.0 * Ob * (ka * ep + kb * q02b);

    // w20(theta) = -g20/(i w) q0 e^{i w theta} - conj(g02)/(3 i w) conj(q0) e^{-i w theta}
    //              + e e^{2 i w theta}; the boundary condition at theta = 0 leaves a
    // 2x2 system for e once the q0 and conj(q0) parts cancel against h20(0).
    const cplx e2 = std::exp(-2.0 * i * w * tau);
    const cplx m00 = 2.0 * i * w + kappa * a / tau * e2;
    const cplx m01 = kappa * beta / (tau * tau);
    const cplx m10 = -kappa * e2;
    const cplx m11 = 2.0 * i * w;
    const cplx r0 = 2.0 * i * w / C;
    const cplx det = m00 * m11 - m01 * m10;
    const std::array<cplx, 2> e{r0 * m11 / det, -m10 * r0 / det};

    // w11 is constant; kappa w111(-tau) = 0 and the first row force f = 0.
    const std::array<cplx, 2> f{0.0, 0.0};

    const std::array<cplx, 2> q0{1.0, q02};
    const std::array<cplx, 2> q0b{1.0, q02b};
    auto w20 = [&](double th, int j) {
        return -g20 / (i * w) * q0[j] * std::exp(i * w * th) -
               std::conj(g02) / (3.0 * i * w) * q0b[j] * std::exp(-i * w * th) +
               e[j] * std::exp(2.0 * i * w * th);
    };
    const cplx w201_0 = w20(0.0, 0);
    const cplx w202_0 = w20(0.0, 1);
    const cplx w201_t = w20(-tau, 0);
    const cplx w202_t = w20(-tau, 1);

    const cplx g21 = Ob * kappa *
                     (-a / (C * tau) * (w201_t + 2.0 * f[0] + w201_0 * ep + 2.0 * f[0] * em) -
                      beta / (C * tau * tau) * (q02b * w201_0 + 2.0 * q02 * f[0] + w202_0 + 2.0 * f[1]));

    const double g02abs = std::abs(g02);
    const cplx c1 = i / (2.0 * w) * (g20 * g11 - 2.0 * std::norm(g11) - g02abs * g02abs / 3.0) +
                    g21 / 2.0;

    const cplx s = q02 * q02 * (beta + 2.0 * i * a * w * tau / kappa);
    out.q02 = q02;
    out.qstar02 = kappa * beta / (i * w * tau * tau);
    out.Omega = Omega;
    out.g20 = g20;
    out.g11 = g11;
    out.g02 = g02;
    out.g21 = g21;
    out.e = e;
    out.f = f;
    out.A1 = 4.0 * tau * tau + s;
    out.A2 = 2.0 * tau * tau + s;
    out.w20_0 = {w201_0, w202_0};
    out.w20_tau = {w201_t, w202_t};
    return c1;
}

}  // namespace detail

/// Closed-form Re c1(0) as a function of Theta alone (plus the C^2 tau scale).
[[nodiscard]] inline double re_c1_closed_form(double Theta, double C = 1.0, double tau = 1.0) {
    detail::require_theta(Theta);
    detail::require_positive(C, "C");
    detail::require_positive(tau, "tau");
    const double T = Theta;
    const double s1 = std::sin(T), s2 = std::sin(2 * T), s3 = std::sin(3 * T);
    const double s4 = std::sin(4 * T), s5 = std::sin(5 * T);
    const double c1 = std::cos(T), c2 = std::cos(2 * T), c3 = std::cos(3 * T);
    const double num = 4 * s5 - 3 * s4 - 24 * s3 + 42 * s2 + 4 * s1 -
                       12 * T * (2 * c3 - c2 - 6 * c1 + 7);
    const double d1 = std::pow(8 * c3 - 3 * c2 + 1, 2) + std::pow(8 * s3 - 3 * s2, 2);
    const double d2 = std::pow(3 + c2, 2) + std::pow(2 * T - s2, 2);
    return 2 * T / (C * C * tau * d1 * d2) * num;
}

/// Closed-form complex c1(0). Its real part equals `re_c1_closed_form`.
[[nodiscard]] inline cplx c1_closed_form(double Theta, double C = 1.0, double tau = 1.0) {
    detail::require_theta(Theta);
    detail::require_positive(C, "C");
    detail::require_positive(tau, "tau");
    const cplx i(0.0, 1.0);
    const cplx E = std::exp(i * Theta);
    const double w = Theta / tau;
    const cplx num = 4.0 * E * E * E - 3.0 * E * E + 1.0;
    const cplx den = ((3.0 + 2.0 * i * Theta) * E + 1.0 / E) * (8.0 * E * E - 3.0 * E + 1.0 / E);
    return -2.0 * i * w / (C * C) * num / den;
}

/// c1(0) at Theta through both routes. Uses the representative Hopf point
/// kappa = 1, a = Theta sin Theta, beta = Theta^2 cos Theta.
[[nodiscard]] inline cplx lyapunov_c1(double Theta, double C = 1.0, double tau = 1.0,
                                      HopfIntermediates* intermediates = nullptr) {
    const cplx closed = c1_closed_form(Theta, C, tau);
    const double a = Theta * std::sin(Theta);
    const double beta = std::max(0.0, Theta * Theta * std::cos(Theta));
    HopfIntermediates tmp;
    const cplx full = detail::c1_from_g_coefficients(a, beta, 1.0, tau, C, tmp);
    if (std::abs(full - closed) > c1_agreement_tol * std::abs(full)) {
        throw InternalError("c1: closed form and g-coefficient path disagree at Theta = " +
                            std::to_string(Theta));
    }
    if (intermediates) *intermediates = tmp;
    return cplx(re_c1_closed_form(Theta, C, tau), closed.imag());
}

/// (Theta / kappa tau) 4 Theta (1 + sin^2 Theta) / ((3 + cos 2Theta)^2 + (2Theta - sin 2Theta)^2).
/// This is the normalisation used for mu2; `crossing_speed` is Re(d lambda/d kappa) itself.
[[nodiscard]] inline double alpha_prime(double Theta, double kappa, double tau) {
    detail::require_theta(Theta);
    detail::require_positive(kappa, "kappa");
    detail::require_positive(tau, "tau");
    const double s = std::sin(Theta);
    const double d2 = std::pow(3 + std::cos(2 * Theta), 2) + std::pow(2 * Theta - std::sin(2 * Theta), 2);
    const double v = (Theta / (kappa * tau)) * 4 * Theta * (1 + s * s) / d2;
    if (!(v > 0.0)) throw InternalError("alpha_prime: non-positive value");
    return v;
}

/// Criticality of the Hopf point of (a, beta > 0) at kappa = kappa_c.
[[nodiscard]] inline HopfReport hopf_report(double a, double beta, double C, double tau) {
    detail::require_positive(a, "a");
    detail::require_positive(beta, "beta");
    detail::require_positive(C, "C");
    detail::require_positive(tau, "tau");
    HopfReport r;
    r.a = a;
    r.beta = beta;
    r.C = C;
    r.tau = tau;
    r.kappa_c = hopf_kappa_c(a, beta);
    r.omega0 = omega0_at_hopf(a, beta, r.kappa_c, tau);
    r.Theta = r.omega0 * tau;
    r.c1 = detail::c1_from_g_coefficients(a, beta, r.kappa_c, tau, C, r.intermediates);
    r.c1_closed_form = cplx(re_c1_closed_form(r.Theta, C, tau), c1_closed_form(r.Theta, C, tau).imag());
    if (std::abs(r.c1 - r.c1_closed_form) > c1_agreement_tol * std::abs(r.c1)) {
        throw InternalError("hopf_report: closed form and g-coefficient path disagree");
    }
    r.alpha_prime = alpha_prime(r.Theta, r.kappa_c, tau);
    r.crossing_speed = crossing_speed(a, beta, tau);
    r.mu2 = -r.c1.real() / r.alpha_prime;
    r.beta2 = 2.0 * r.c1.real();
    r.classification = r.mu2 < 0.0 ? HopfType::sub_critical : HopfType::super_critical;
    return r;
}

/// Theta_h: the root of Re c1(Theta) on (0, pi/2). Below it the bifurcation is sub-critical.
[[nodiscard]] inline double theta_threshold() {
    constexpr int grid = 200;
    const double lo = 0.05;
    const double hi = numerics::pi / 2;
    double prev_t = lo;
    double prev = re_c1_closed_form(lo);
    for (int k = 1; k <= grid; ++k) {
        const double t = lo + (hi - lo) * k / grid;
        const double v = re_c1_closed_form(t);
        if ((v > 0.0) != (prev > 0.0)) {
            return numerics::bisect([](double x) { return re_c1_closed_form(x); }, prev_t, t);
        }
        prev_t = t;
        prev = v;
    }
    throw InternalError("theta_threshold: Re c1 has no sign change on (0, pi/2)");
}

/// Limit-cycle amplitude of R for the rate-only model just past kappa_c.
[[nodiscard]] inline double amplitude_no_queue(double kappa, double kappa_c, double R_star) {
    detail::require_positive(kappa_c, "kappa_c");
    detail::require_positive(R_star, "R_star");
    if (!std::isfinite(kappa) || kappa < kappa_c) {
        throw DomainError("kappa", "must be >= kappa_c");
    }
    return R_star * std::sqrt(20.0 * numerics::pi * (kappa - kappa_c) / (3.0 * numerics::pi - 2.0));
}

}  // namespace rcp
