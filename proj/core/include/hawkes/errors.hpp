#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace hawkes {

// Invalid user input: malformed files, inconsistent configs, bad arguments.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A numeric procedure could not produce a valid answer (non-stationary model,
// non-convergence, runaway simulation). Carries an optional diagnostic vector.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what, std::vector<double> diagnostic = {})
        : std::runtime_error(what), diagnostic_(std::move(diagnostic)) {}

    const std::vector<double>& diagnostic() const noexcept { return diagnostic_; }

private:
    std::vector<double> diagnostic_;
};

}  // namespace hawkes
