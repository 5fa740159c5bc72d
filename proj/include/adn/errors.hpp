#pragma once

#include <stdexcept>
#include <string>

namespace adn {

// Raised when an operation is called outside its documented domain.
class ParameterError : public std::invalid_argument {
public:
    explicit ParameterError(const std::string& what) : std::invalid_argument(what) {}
};

// Raised by the brute-force oracles when the branch count exceeds the guard.
class EnumerationTooLarge : public std::runtime_error {
public:
    EnumerationTooLarge(const std::string& what, double estimated_branches)
        : std::runtime_error(what), estimated_branches_(estimated_branches) {}

    double estimated_branches() const noexcept { return estimated_branches_; }

private:
    double estimated_branches_;
};

} // namespace adn
