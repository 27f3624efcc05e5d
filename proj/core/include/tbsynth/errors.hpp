#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tbsynth {

/// Malformed external input (documents, plans, option values).
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A configured resource guard (state budget, enumeration guard) tripped.
class ResourceError : public std::runtime_error {
public:
    ResourceError(const std::string& what, std::size_t count)
        : std::runtime_error(what), count_(count) {}

    std::size_t count() const { return count_; }

private:
    std::size_t count_;
};

/// An interaction-protocol violation (illegal move fed to a controller).
class ProtocolError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Numeric overflow in bound arithmetic; always a hard error.
class OverflowError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace tbsynth
