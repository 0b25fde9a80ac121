#pragma once

// Closed-form stability conditions and the numerical spectrum of the
// linearised RCP model about (R*, q*) = (C, 0).
//
// With queue feedback (beta > 0) the characteristic function is
//     lambda^2 tau^2 e^{lambda tau} + a kappa tau lambda + kappa^2 beta,
// without it (beta = 0)
//     lambda + (kappa a / tau) e^{-lambda tau}.

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rcp/errors.hpp"
#include "rcp/numerics.hpp"
#include "rcp/params.hpp"

namespace rcp {

using cplx = std::complex<double>;

struct ThetaValue {
    double theta = 0.0;
    double a = 0.0;
    double beta = 0.0;
};

/// theta = sqrt((a^2 + sqrt(a^4 + 4 beta^2)) / 2); equals omega0 tau / kappa at a Hopf point.
[[nodiscard]] inline ThetaValue theta(double a, double beta) {
    detail::require_positive(a, "a");
    detail::require_non_negative(beta, "beta");
    if (beta == 0.0) return {a, a, beta};
    const double a2 = a * a;
    // hypot keeps a^4 + 4 beta^2 from overflowing for large gains
    const double radical = std::hypot(a2, 2.0 * beta);
    return {std::sqrt(0.5 * (a2 + radical)), a, beta};
}

/// Critical kappa at which a purely imaginary pair appears: asin(a/theta)/theta.
[[nodiscard]] inline double hopf_kappa_c(double a, double beta) {
    const ThetaValue th = theta(a, beta);
    if (beta == 0.0) return numerics::pi / (2.0 * a);
    return std::asin(a / th.theta) / th.theta;
}

/// Strict local asymptotic stability; the boundary itself counts as unstable.
[[nodiscard]] inline bool is_locally_stable(const ValidatedParams& p) {
    if (!p.has_queue_feedback()) return p.a() * p.kappa() < numerics::pi / 2.0;
    const double th = theta(p.a(), p.beta()).theta;
    return p.kappa() * th < std::asin(p.a() / th);
}

/// Largest stable beta at kappa = 1 for a given a in (0, pi/2).
///
/// On the boundary sin(theta) = a / theta, so theta solves theta sin(theta) = a
/// on (a, pi/2], and beta follows from inverting the theta(a, beta) radical.
[[nodiscard]] inline double stability_boundary_beta(double a) {
    detail::require_positive(a, "a");
    if (a >= numerics::pi / 2.0) {
        throw DomainError("a", "no beta >= 0 is stable for a >= pi/2");
    }
    const double th = numerics::bisect([a](double t) { return t * std::sin(t) - a; }, a,
                                       numerics::pi / 2.0, 1e-15);
    const double s = 2.0 * th * th - a * a;
    const double a2 = a * a;
    return 0.5 * std::sqrt(std::max(0.0, (s - a2) * (s + a2)));
}

// ---------------------------------------------------------------------------
// Characteristic function
// ---------------------------------------------------------------------------

[[nodiscard]] inline cplx characteristic_function(const ValidatedParams& p, cplx lambda) {
    const double tau = p.tau();
    const double k = p.kappa();
    if (!p.has_queue_feedback()) {
        return lambda + (k * p.a() / tau) * std::exp(-lambda * tau);
    }
    return lambda * lambda * tau * tau * std::exp(lambda * tau) + p.a() * k * tau * lambda +
           k * k * p.beta();
}

[[nodiscard]] inline cplx characteristic_derivative(const ValidatedParams& p, cplx lambda) {
    const double tau = p.tau();
    const double k = p.kappa();
    if (!p.has_queue_feedback()) {
        return 1.0 - k * p.a() * std::exp(-lambda * tau);
    }
    return (2.0 * lambda * tau * tau + lambda * lambda * tau * tau * tau) * std::exp(lambda * tau) +
           p.a() * k * tau;
}

/// d(charfn)/d(kappa) at fixed lambda.
[[nodiscard]] inline cplx characteristic_kappa_derivative(const ValidatedParams& p, cplx lambda) {
    const double tau = p.tau();
    if (!p.has_queue_feedback()) return (p.a() / tau) * std::exp(-lambda * tau);
    return p.a() * tau * lambda + 2.0 * p.kappa() * p.beta();
}

/// Velocity d(lambda)/d(kappa) of a characteristic root, by implicit differentiation.
[[nodiscard]] inline cplx root_velocity(const ValidatedParams& p, cplx lambda) {
    return -characteristic_kappa_derivative(p, lambda) / characteristic_derivative(p, lambda);
}

/// Re(d lambda / d kappa)^{-1} at kappa = kappa_c (tau = 1); its sign is the
/// crossing direction. Always positive; a non-positive value means a bug.
[[nodiscard]] inline double transversality_sign(double a, double beta) {
    const double th = theta(a, beta).theta;
    const double kc = hopf_kappa_c(a, beta);
    const double w = kc * th;  // omega0 tau
    const double awt2 = a * a * w * w;
    const double kb2 = kc * kc * beta * beta;
    const double value = kc * (awt2 + 2.0 * kb2) / (awt2 + 4.0 * kb2);
    if (!(value > 0.0)) {
        throw InternalError("transversality: non-positive crossing velocity");
    }
    return value;
}

/// Exact Re(d lambda / d kappa) of the crossing pair at the Hopf point.
[[nodiscard]] inline double crossing_speed(double a, double beta, double tau = 1.0) {
    const double kc = hopf_kappa_c(a, beta);
    const ValidatedParams p = validate_params({a, beta, 1.0, tau, kc});
    const cplx lambda{0.0, kc * theta(a, beta).theta / tau};
    return root_velocity(p, lambda).real();
}

// ---------------------------------------------------------------------------
// Spectrum
// ---------------------------------------------------------------------------

enum class SpectrumMethod { spectral_newton, lambert_w_oracle };

[[nodiscard]] inline const char* to_string(SpectrumMethod m) noexcept {
    return m == SpectrumMethod::spectral_newton ? "spectral+newton" : "lambertW-oracle";
}

struct Spectrum {
    std::vector<cplx> roots;        ///< decreasing real part
    std::vector<double> residuals;  ///< |charfn(root)|
    SpectrumMethod method = SpectrumMethod::spectral_newton;
    int nodes_used = 0;
    int dropped_seeds = 0;          ///< seeds whose Newton iteration failed
    bool refinement_stable = true;  ///< leading roots agreed between the last two node counts

    [[nodiscard]] cplx rightmost() const { return roots.front(); }
    [[nodiscard]] double max_real() const { return roots.front().real(); }
};

struct SpectralOptions {
    int nodes = 64;
    int max_nodes = 512;
    double stability_tol = 1e-8;
    double residual_tol = 1e-10;
};

/// Chebyshev collocation of the infinitesimal generator of the linearised
/// system on [-tau, 0]. Node 0 is theta = 0 and node N is theta = -tau.
[[nodiscard]] inline Eigen::MatrixXd collocation_generator(const ValidatedParams& p, int nodes) {
    if (nodes < 2) throw DomainError("nodes", "need at least 2 collocation nodes");
    const int n = nodes;
    const int dim = p.has_queue_feedback() ? 2 : 1;
    const double tau = p.tau();
    const double k = p.kappa();

    Eigen::VectorXd x(n + 1);
    for (int j = 0; j <= n; ++j) x(j) = std::cos(numerics::pi * j / n);

    Eigen::MatrixXd diff = Eigen::MatrixXd::Zero(n + 1, n + 1);
    auto weight = [n](int i) { return ((i == 0 || i == n) ? 2.0 : 1.0) * ((i % 2) ? -1.0 : 1.0); };
    for (int i = 0; i <= n; ++i) {
        double row = 0.0;
        for (int j = 0; j <= n; ++j) {
            if (i == j) continue;
            diff(i, j) = weight(i) / weight(j) / (x(i) - x(j));
            row += diff(i, j);
        }
        diff(i, i) = -row;
    }
    diff *= 2.0 / tau;

    Eigen::MatrixXd now = Eigen::MatrixXd::Zero(dim, dim);
    Eigen::MatrixXd delayed = Eigen::MatrixXd::Zero(dim, dim);
    if (dim == 1) {
        delayed(0, 0) = -k * p.a() / tau;
    } else {
        now(0, 1) = -k * p.beta() / (tau * tau);
        delayed(0, 0) = -k * p.a() / tau;
        delayed(1, 0) = k;
    }

    Eigen::MatrixXd gen = Eigen::MatrixXd::Zero(dim * (n + 1), dim * (n + 1));
    gen.block(0, 0, dim, dim) = now;
    gen.block(0, dim * n, dim, dim) += delayed;
    for (int i = 1; i <= n; ++i) {
        for (int j = 0; j <= n; ++j) {
            for (int c = 0; c < dim; ++c) gen(dim * i + c, dim * j + c) = diff(i, j);
        }
    }
    return gen;
}

[[nodiscard]] inline std::vector<cplx> collocation_eigenvalues(const ValidatedParams& p, int nodes) {
    const Eigen::MatrixXd gen = collocation_generator(p, nodes);
    Eigen::EigenSolver<Eigen::MatrixXd> solver(gen, false);
    if (solver.info() != Eigen::Success) {
        throw ConvergenceError("collocation eigensolve failed");
    }
    const auto& ev = solver.eigenvalues();
    std::vector<cplx> out(ev.data(), ev.data() + ev.size());
    std::sort(out.begin(), out.end(), [](cplx l, cplx r) { return l.real() > r.real(); });
    return out;
}

/// Newton on the exact characteristic function. Each iteration also tries the
/// doubled step and keeps whichever lowers the residual, which restores fast
/// convergence next to double roots.
[[nodiscard]] inline std::optional<cplx> newton_refine(const ValidatedParams& p, cplx seed,
                                                       double residual_tol = 1e-10) {
    cplx z = seed;
    double fz = std::abs(characteristic_function(p, z));
    for (int it = 0; it < 100; ++it) {
        const cplx f = characteristic_function(p, z);
        const cplx df = characteristic_derivative(p, z);
        if (f == 0.0) break;
        if (df == 0.0 || !std::isfinite(std::abs(df))) return std::nullopt;
        const cplx step = f / df;
        const cplx full = z - step;
        const cplx twice = z - 2.0 * step;
        const double f_full = std::abs(characteristic_function(p, full));
        const double f_twice = std::abs(characteristic_function(p, twice));
        const cplx next = (f_twice < f_full) ? twice : full;
        const double fnext = std::min(f_full, f_twice);
        const double move = std::abs(next - z);
        z = next;
        fz = fnext;
        if (!std::isfinite(fz)) return std::nullopt;
        if (move <= 1e-15 * (1.0 + std::abs(z))) break;
    }
    // a root that is real up to rounding gets polished on the real axis
    if (z.imag() != 0.0 && std::abs(z.imag()) < 1e-9 * (1.0 + std::abs(z.real()))) {
        cplx r{z.real(), 0.0};
        for (int it = 0; it < 100; ++it) {
            const cplx f = characteristic_function(p, r);
            const cplx df = characteristic_derivative(p, r);
            if (f == 0.0 || df == 0.0) break;
            const double step = (f / df).real();
            const cplx full{r.real() - step, 0.0};
            const cplx twice{r.real() - 2.0 * step, 0.0};
            const cplx next = std::abs(characteristic_function(p, twice)) <
                                      std::abs(characteristic_function(p, full))
                                  ? twice
                                  : full;
            const double move = std::abs(next - r);
            r = next;
            if (move <= 1e-15 * (1.0 + std::abs(r))) break;
        }
        const double fr = std::abs(characteristic_function(p, r));
        if (fr < residual_tol) {
            z = r;
            fz = fr;
        }
    }
    if (!(fz < residual_tol)) return std::nullopt;
    return z;
}

namespace detail {

inline bool root_order(cplx l, cplx r) {
    if (l.real() != r.real()) return l.real() > r.real();
    return l.imag() > r.imag();
}

inline bool same_root(cplx l, cplx r) { return std::abs(l - r) <= 1e-7 * (1.0 + std::abs(l)); }

struct RefinedSet {
    std::vector<cplx> roots;
    int dropped = 0;
};

inline RefinedSet refined_leading_roots(const ValidatedParams& p, int nodes, int n_roots,
                                        double residual_tol) {
    const std::vector<cplx> eig = collocation_eigenvalues(p, nodes);
    const std::size_t seeds =
        std::min<std::size_t>(eig.size(), static_cast<std::size_t>(2 * n_roots + 6));
    RefinedSet out;
    // roots are collected in the closed upper half plane and mirrored, so
    // conjugate pairs are exact
    for (std::size_t i = 0; i < seeds; ++i) {
        auto z = newton_refine(p, eig[i], residual_tol);
        if (!z) {
            ++out.dropped;
            continue;
        }
        if (z->imag() < 0.0) z = std::conj(*z);
        const bool dup = std::any_of(out.roots.begin(), out.roots.end(),
                                     [&](cplx r) { return same_root(r, *z); });
        if (!dup) out.roots.push_back(*z);
    }
    const std::size_t upper = out.roots.size();
    for (std::size_t i = 0; i < upper; ++i) {
        if (out.roots[i].imag() > 0.0) out.roots.push_back(std::conj(out.roots[i]));
    }
    std::sort(out.roots.begin(), out.roots.end(), root_order);
    return out;
}

inline std::size_t leading_count(const std::vector<cplx>& roots, int n_roots) {
    std::size_t n = std::min<std::size_t>(roots.size(), static_cast<std::size_t>(n_roots));
    // keep conjugate pairs together
    if (n > 0 && n < roots.size() && roots[n - 1].imag() > 0.0 &&
        same_root(roots[n], std::conj(roots[n - 1]))) {
        ++n;
    }
    return n;
}

}  // namespace detail

/// The `n_roots` rightmost characteristic roots, seeded by spectral collocation
/// and refined by Newton. The node count doubles until the refined leading
/// roots agree between successive discretisations.
[[nodiscard]] inline Spectrum rightmost_roots(const ValidatedParams& p, int n_roots,
                                              const SpectralOptions& opt = {}) {
    if (n_roots < 1) throw DomainError("n_roots", "must be >= 1");
    if (opt.nodes < 4) throw DomainError("nodes", "must be >= 4");

    int nodes = opt.nodes;
    detail::RefinedSet prev = detail::refined_leading_roots(p, nodes, n_roots, opt.residual_tol);
    bool stable = false;
    while (nodes * 2 <= opt.max_nodes) {
        const int next_nodes = nodes * 2;
        detail::RefinedSet next =
            detail::refined_leading_roots(p, next_nodes, n_roots, opt.residual_tol);
        const std::size_t np = detail::leading_count(prev.roots, n_roots);
        const std::size_t nn = detail::leading_count(next.roots, n_roots);
        bool agree = np == nn && np > 0;
        for (std::size_t i = 0; agree && i < np; ++i) {
            agree = std::abs(prev.roots[i] - next.roots[i]) <= opt.stability_tol;
        }
        prev = std::move(next);
        nodes = next_nodes;
        if (agree) {
            stable = true;
            break;
        }
    }
    if (prev.roots.empty()) {
        throw ConvergenceError("rightmost_roots: no seed converged");
    }

    Spectrum s;
    s.method = SpectrumMethod::spectral_newton;
    s.nodes_used = nodes;
    s.dropped_seeds = prev.dropped;
    s.refinement_stable = stable;
    const std::size_t n = detail::leading_count(prev.roots, n_roots);
    s.roots.assign(prev.roots.begin(), prev.roots.begin() + static_cast<std::ptrdiff_t>(n));
    for (cplx z : s.roots) s.residuals.push_back(std::abs(characteristic_function(p, z)));
    return s;
}

}  // namespace rcp
