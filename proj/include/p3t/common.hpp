#ifndef P3T_COMMON_HPP
#define P3T_COMMON_HPP

#include <cstdint>
#include <stdexcept>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace p3t {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

struct ParseError : std::runtime_error {
    explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
};

struct PreconditionError : std::invalid_argument {
    explicit PreconditionError(const std::string& msg) : std::invalid_argument(msg) {}
};

struct CapError : std::invalid_argument {
    explicit CapError(const std::string& msg) : std::invalid_argument(msg) {}
};

// Raised by the embedder when a constructive step or a maintained invariant
// fails on the current grid; the driver reacts by enlarging the grid.
struct InvariantViolation : std::runtime_error {
    int node;
    InvariantViolation(int node_, const std::string& what_)
        : std::runtime_error("invariant violation at face node " + std::to_string(node_) + ": " + what_),
          node(node_) {}
};

}  // namespace p3t

#endif
