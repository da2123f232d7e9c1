#pragma once

#include <stdexcept>
#include <string>

namespace l1inf {

/// Bad argument or malformed matrix (non-finite entries, wrong shape, bad
/// parameter range).
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// An algorithmic invariant was broken at runtime. Indicates a bug or a
/// numerically degenerate input, never a user error.
class InternalError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Iterative solver produced a non-finite objective.
class DivergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline void require(bool cond, const std::string& what) {
    if (!cond) {
        throw InvalidInput(what);
    }
}

} // namespace detail

} // namespace l1inf
