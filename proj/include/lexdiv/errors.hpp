#pragma once

#include <stdexcept>
#include <string>

namespace lexdiv {

// Base class for all errors raised by this library. Subcommands map these
// to exit code 1 (computation) or 2 (usage/config).
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Configuration / input-shape problems (bad flags, missing paths, malformed
// config files). These become exit code 2 at the CLI.
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& msg) : Error(msg) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& msg) : Error(msg) {}
};

} // namespace lexdiv
