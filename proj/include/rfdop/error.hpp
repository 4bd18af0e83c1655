#pragma once

#include <stdexcept>
#include <string>

namespace rfdop {

// Argument outside the mathematical domain of a bound or estimator.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Parameter outside the range the air protocol allows (e.g. BLF).
class RangeError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

class NotFoundError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Caller broke an input contract (mismatched lengths, empty mask, ...).
class ContractError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Bad configuration value; carries the offending key.
class ConfigError : public std::invalid_argument {
public:
    ConfigError(std::string field, const std::string& message)
        : std::invalid_argument(field + ": " + message), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace rfdop
