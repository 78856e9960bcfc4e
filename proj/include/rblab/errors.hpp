#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace rblab {

// Invalid parameter or malformed input; message names the offending field.
struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Search gave up after expending `nodes` nodes. Never a silent wrong answer:
// callers that see this must not treat the instance as decided.
struct BudgetExceeded : std::runtime_error {
    std::uint64_t nodes;
    BudgetExceeded(const std::string& what, std::uint64_t nodes_)
        : std::runtime_error(what), nodes(nodes_) {}
};

// A tuple-swap membership precondition failed; message says which one.
struct FlipPreconditionViolated : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// No (u, a, b) selection admits the requested flip.
struct NoFlipPairFound : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Flips are defined for binary constraints only.
struct UnsupportedArity : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// CNF encoding would exceed the configured clause budget.
struct SizeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A SAT model decodes to an out-of-domain value.
struct InvalidModel : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Textual input (DIMACS, JSON) malformed at `line`.
struct ParseError : std::runtime_error {
    int line;
    ParseError(const std::string& what, int line_)
        : std::runtime_error(what + " (line " + std::to_string(line_) + ")"), line(line_) {}
};

// Rejection sampling hit its attempt cap before collecting enough instances.
struct SamplingExhausted : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace rblab
