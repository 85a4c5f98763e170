#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace evdet {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad or inconsistent input data (records, features, model contents).
class DataError : public Error {
public:
    using Error::Error;
};

/// A single JSON-Lines record could not be parsed.
class ParseError : public DataError {
public:
    ParseError(std::size_t line, const std::string& what)
        : DataError("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Filesystem or decode failure.
class IoError : public Error {
public:
    using Error::Error;
};

/// Invalid argument or parameter (odd k, nonpositive lambda, ...).
class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace evdet
