#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace ionvac {

/// Invalid input or parameter. `field()` names the offending parameter when known.
class ConfigError : public std::invalid_argument {
public:
    explicit ConfigError(const std::string& message, std::string field = {})
        : std::invalid_argument(message), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// A numerical procedure failed (non-convergence, unphysical state, truncation leak).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Population leaked into the highest retained Fock level.
class TruncationLeak : public NumericalError {
public:
    TruncationLeak(const std::string& message, double leaked)
        : NumericalError(message), leaked_(leaked) {}

    double leaked_population() const noexcept { return leaked_; }

private:
    double leaked_;
};

}  // namespace ionvac
