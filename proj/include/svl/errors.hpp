#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace svl {

/// A parameter violates a documented bound. The message names the bound.
class InvalidParameter : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// The operation has no closed form for the given configuration.
class UnsupportedConfiguration : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

class InsufficientData : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Input file does not match the expected versioned schema.
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A non-finite value appeared in the rotor state.
class IntegrationFailure : public std::runtime_error {
public:
    IntegrationFailure(std::uint64_t seed, std::size_t step, std::size_t site, double time)
        : std::runtime_error("integration failure: non-finite state at step " + std::to_string(step) +
                             ", site " + std::to_string(site) + ", t = " + std::to_string(time) +
                             " (seed " + std::to_string(seed) + ")"),
          seed_(seed), step_(step), site_(site), time_(time) {}

    std::uint64_t seed() const noexcept { return seed_; }
    std::size_t step() const noexcept { return step_; }
    std::size_t site() const noexcept { return site_; }
    double time() const noexcept { return time_; }

private:
    std::uint64_t seed_;
    std::size_t step_;
    std::size_t site_;
    double time_;
};

}  // namespace svl
