#pragma once

#include <stdexcept>
#include <string>

namespace gia {

// Base for everything this library throws.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// User/input errors. The CLI maps these to exit code 1.
struct ShapeError : Error {
    using Error::Error;
};
struct ArgumentError : Error {
    using Error::Error;
};
struct ValidationError : Error {
    using Error::Error;
};
struct ParseError : Error {
    using Error::Error;
};
struct ConfigError : Error {
    using Error::Error;
};

// Runtime failures. The CLI maps these to exit code 2.
struct IoError : Error {
    using Error::Error;
};
struct TrainingError : Error {
    using Error::Error;
};
struct GenerationError : Error {
    using Error::Error;
};

}  // namespace gia
