#pragma once

#include <cmath>
#include <string>

#include "rcp/errors.hpp"

namespace rcp {

/// One RCP configuration on a single bottleneck link with homogeneous RTT.
///
/// `beta == 0` selects the rate-mismatch-only model; every routine that has a
/// different formula for that case branches on it internally.
struct ProtocolParams {
    double a = 1.0;      ///< rate-mismatch gain, dimensionless, > 0
    double beta = 0.0;   ///< queue gain, dimensionless, >= 0
    double C = 1.0;      ///< link capacity, packets per unit time
    double tau = 1.0;    ///< round-trip time
    double kappa = 1.0;  ///< exogenous bifurcation parameter
};

/// ProtocolParams that passed `validate_params`. Only constructible through it.
class ValidatedParams {
public:
    [[nodiscard]] const ProtocolParams& get() const noexcept { return p_; }
    [[nodiscard]] double a() const noexcept { return p_.a; }
    [[nodiscard]] double beta() const noexcept { return p_.beta; }
    [[nodiscard]] double C() const noexcept { return p_.C; }
    [[nodiscard]] double tau() const noexcept { return p_.tau; }
    [[nodiscard]] double kappa() const noexcept { return p_.kappa; }
    [[nodiscard]] bool has_queue_feedback() const noexcept { return p_.beta > 0.0; }

    /// Same configuration with a different bifurcation parameter.
    [[nodiscard]] ValidatedParams with_kappa(double kappa) const;

private:
    explicit ValidatedParams(const ProtocolParams& p) : p_(p) {}
    friend ValidatedParams validate_params(const ProtocolParams& p);
    ProtocolParams p_;
};

namespace detail {

inline void require_positive(double v, const char* field) {
    if (!std::isfinite(v)) throw DomainError(field, "must be finite");
    if (!(v > 0.0)) throw DomainError(field, "must be > 0, got " + std::to_string(v));
}

inline void require_non_negative(double v, const char* field) {
    if (!std::isfinite(v)) throw DomainError(field, "must be finite");
    if (v < 0.0) throw DomainError(field, "must be >= 0, got " + std::to_string(v));
}

}  // namespace detail

[[nodiscard]] inline ValidatedParams validate_params(const ProtocolParams& p) {
    detail::require_positive(p.a, "a");
    detail::require_non_negative(p.beta, "beta");
    detail::require_positive(p.C, "C");
    detail::require_positive(p.tau, "tau");
    detail::require_positive(p.kappa, "kappa");
    return ValidatedParams(p);
}

inline ValidatedParams ValidatedParams::with_kappa(double kappa) const {
    ProtocolParams q = p_;
    q.kappa = kappa;
    return validate_params(q);
}

struct Equilibrium {
    double R_star = 0.0;  ///< packets per unit time
    double q_star = 0.0;  ///< packets
};

/// Non-trivial equilibrium: R* = C, q* = 0, for every a, beta, tau and kappa.
[[nodiscard]] inline Equilibrium equilibrium(const ValidatedParams& p) noexcept {
    return {p.C(), 0.0};
}

}  // namespace rcp
