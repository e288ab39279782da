#pragma once

#include <stdexcept>
#include <string>

namespace netchain {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid input to a builder (unsorted keys, empty chains, bad window).
class ConstructionError : public Error {
public:
    using Error::Error;
};

/// A proof was requested for a key in the wrong state (present vs absent).
class LookupError : public Error {
public:
    using Error::Error;
};

/// Malformed canonical bytes.
class DecodeError : public Error {
public:
    using Error::Error;
};

/// Stored data does not match its committed digests.
class IntegrityError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

}  // namespace netchain
