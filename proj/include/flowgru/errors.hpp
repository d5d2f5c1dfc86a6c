#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace flowgru {

// Malformed or inconsistent input data: bad CSV cells, unknown labels,
// singleton classes, corrupt model files. The CLI maps this to exit code 2.
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A training run produced a non-finite loss. Carries the epoch where it
// happened. The CLI maps this to exit code 3.
struct TrainingDiverged : std::runtime_error {
    std::size_t epoch;
    TrainingDiverged(std::size_t at_epoch, const std::string& msg)
        : std::runtime_error(msg), epoch(at_epoch) {}
};

}  // namespace flowgru
