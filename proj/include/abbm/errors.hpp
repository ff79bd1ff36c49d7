#pragma once

#include <stdexcept>
#include <string>

namespace abbm {

// Raised when an input violates a documented precondition. The message starts
// with the name of the offending field so callers can report it verbatim.
class ValidationError : public std::invalid_argument {
public:
    ValidationError(const std::string& field, const std::string& what)
        : std::invalid_argument(field + ": " + what), field_(field), detail_(what) {}

    const std::string& field() const noexcept { return field_; }
    const std::string& detail() const noexcept { return detail_; }

private:
    std::string field_;
    std::string detail_;
};

// Flow scaling of grouped discrete demand produced a fractional agent count.
class IntegralityError : public std::domain_error {
public:
    explicit IntegralityError(const std::string& what) : std::domain_error(what) {}
};

class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace abbm
