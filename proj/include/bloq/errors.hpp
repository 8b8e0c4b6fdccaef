#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bloq {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

class IndexError : public Error {
public:
    using Error::Error;
};

class InvalidStateError : public Error {
public:
    using Error::Error;
};

class ValidationError : public Error {
public:
    using Error::Error;
};

class UnsupportedError : public Error {
public:
    using Error::Error;
};

/// Malformed document. `position()` is a byte offset for syntax errors and
/// `path()` a JSON pointer for schema errors; either may be empty.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t position, std::string path = {})
        : Error(what), position_(position), path_(std::move(path)) {}

    std::size_t position() const noexcept { return position_; }
    const std::string& path() const noexcept { return path_; }

private:
    std::size_t position_;
    std::string path_;
};

}  // namespace bloq
