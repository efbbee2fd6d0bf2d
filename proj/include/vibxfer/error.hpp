#pragma once

#include <stdexcept>
#include <string>

namespace vibxfer {

// Invalid user-facing parameter (filter spec, transfer depth, block size).
class ParameterError : public std::invalid_argument {
public:
  explicit ParameterError (const std::string& what) : std::invalid_argument (what)
  {}
};

// Inconsistent construction-time setup, e.g. mismatched sample rates.
class ConfigError : public std::runtime_error {
public:
  explicit ConfigError (const std::string& what) : std::runtime_error (what) {}
};

} // namespace vibxfer
