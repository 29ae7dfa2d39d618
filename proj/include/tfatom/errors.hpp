#pragma once

#include <stdexcept>
#include <string>

namespace tfatom {

// Invalid argument outside an operation's domain (r <= 0, mu >= 0, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// A numerical procedure failed to meet its contract; the message carries the
// diagnostics (brackets, worst intervals, step sizes).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace tfatom
