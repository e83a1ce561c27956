#pragma once

#include <stdexcept>
#include <string>

namespace coherence {

// Thrown when an input violates a documented precondition or data invariant
// (non-Hermitian density matrix, incomplete Kraus set, dimension mismatch, ...).
class contract_violation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Thrown when a file cannot be parsed at all. Carries the position when known.
class parse_error : public std::runtime_error {
public:
    parse_error(const std::string& msg, long line = -1, long column = -1)
        : std::runtime_error(msg), line_(line), column_(column) {}

    long line() const { return line_; }
    long column() const { return column_; }

private:
    long line_;
    long column_;
};

} // namespace coherence
