#ifndef SIMLAND_ERRORS_HPP
#define SIMLAND_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace simland {

/** Bad configuration or invalid argument. CLI exit code 1. */
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/** Malformed or unusable input data. CLI exit code 2. */
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/** Non-finite value or numeric breakdown. CLI exit code 3. */
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace simland

#endif
