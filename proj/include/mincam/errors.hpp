#pragma once

#include <stdexcept>
#include <string>

namespace mincam {

// Error taxonomy. The CLI maps these to exit codes:
// ConfigError -> 2, DataError -> 3, DivergenceError (trainer.hpp) -> 4.

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Shape or contract violations inside the numeric engine.
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace mincam
