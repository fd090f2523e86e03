#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace chabauty {

/// Base of every error the library raises.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class SyntaxError : public Error {
public:
    SyntaxError(std::size_t offset, const std::string &what)
        : Error("syntax error at byte " + std::to_string(offset) + ": " + what),
          offset_(offset) {}
    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

class PrimeError : public SyntaxError {
public:
    PrimeError(std::size_t offset, unsigned long long value)
        : SyntaxError(offset, std::to_string(value) + " is not prime"), value_(value) {}
    unsigned long long value() const noexcept { return value_; }

private:
    unsigned long long value_;
};

class DualUnrepresentable : public Error {
public:
    using Error::Error;
};

class NotCompact : public Error {
public:
    using Error::Error;
};

class NotApproximable : public Error {
public:
    using Error::Error;
};

// Two independent decision paths disagreed.
class InternalInconsistency : public Error {
public:
    using Error::Error;
};

class Borderline : public Error {
public:
    using Error::Error;
};

class BoundTooSmall : public Error {
public:
    using Error::Error;
};

class EpsilonTooLarge : public Error {
public:
    using Error::Error;
};

class TooLarge : public Error {
public:
    using Error::Error;
};

class NotAHomomorphism : public Error {
public:
    using Error::Error;
};

class RowDivergent : public Error {
public:
    RowDivergent(int row)
        : Error("row " + std::to_string(row) + " did not reach its limit"), row_(row) {}
    int row() const noexcept { return row_; }

private:
    int row_;
};

class Unsupported : public Error {
public:
    using Error::Error;
};

} // namespace chabauty
