#pragma once

#include <stdexcept>
#include <string>

namespace rcp {

/// Invalid parameter or precondition violation. `field()` names the offending input.
class DomainError : public std::invalid_argument {
public:
    DomainError(std::string field, const std::string& what)
        : std::invalid_argument(field + ": " + what), field_(std::move(field)) {}

    [[nodiscard]] const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// Invalid simulator configuration (packet simulator, scenario files).
class ConfigError : public DomainError {
public:
    using DomainError::DomainError;
};

/// An iterative solver failed to reach its tolerance.
class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A self-check failed; indicates a bug rather than bad input.
class InternalError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// A trajectory or trace could not be classified (still trending at the horizon).
class InconclusiveError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace rcp
