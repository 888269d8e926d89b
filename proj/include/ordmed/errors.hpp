#pragma once

#include <stdexcept>
#include <string>

namespace ordmed {

// Error taxonomy mirrors the CLI exit-code mapping:
// parse -> 1, validation -> 2, solver non-optimal -> 3, verification -> 4.
struct ParseError : std::runtime_error {
  explicit ParseError(const std::string& m) : std::runtime_error(m) {}
};

struct ValidationError : std::runtime_error {
  explicit ValidationError(const std::string& m) : std::runtime_error(m) {}
};

struct SolveError : std::runtime_error {
  explicit SolveError(const std::string& m) : std::runtime_error(m) {}
};

struct VerifyError : std::runtime_error {
  explicit VerifyError(const std::string& m) : std::runtime_error(m) {}
};

}  // namespace ordmed
