#include "sprox/errors.hpp"

namespace sprox {

ConfigError::ConfigError(const std::string& msg, int line)
    : Error(line > 0 ? "line " + std::to_string(line) + ": " + msg : msg),
      line_(line) {}

}  // namespace sprox
