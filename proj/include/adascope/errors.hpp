#pragma once

#include <stdexcept>

namespace adascope {

// Invalid configuration or violated precondition, detected before any compute.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Degenerate numeric state: non-PSD covariance, vanishing signal, singular system.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Optimization diverged (non-finite loss or parameters), with step diagnostics in the message.
struct TrainingError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace adascope
