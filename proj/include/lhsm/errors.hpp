#pragma once

#include <stdexcept>
#include <string>

namespace lhsm {

// Error taxonomy mirrors the CLI exit codes:
//   config_error    -> exit 2 (bad input: fields, ranges, malformed JSON)
//   physics_error   -> exit 3 (valid input, no physical answer: no bound
//                      state in bracket, resonance too close to a band edge)
//   numerical_error -> exit 4 (a computed run failed its validity checks:
//                      norm drift, NaN state, non-convergent quadrature)

struct config_error : std::runtime_error {
    explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

struct physics_error : std::runtime_error {
    explicit physics_error(const std::string& msg) : std::runtime_error(msg) {}
};

struct numerical_error : std::runtime_error {
    explicit numerical_error(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace lhsm
