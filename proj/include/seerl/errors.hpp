// SPDX-License-Identifier: Apache-2.0
#ifndef SEERL_ERRORS_HPP
#define SEERL_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace seerl {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DimensionMismatch : Error {
  using Error::Error;
};
struct NonPositiveProbability : Error {
  using Error::Error;
};
struct NonFiniteGradient : Error {
  explicit NonFiniteGradient(std::size_t batch_index)
      : Error("non-finite gradient at batch index " +
              std::to_string(batch_index)),
        index(batch_index) {}
  std::size_t index;
};
struct OutOfRangeStep : Error {
  using Error::Error;
};
struct OutOfBoundsAction : Error {
  using Error::Error;
};
struct StepAfterDone : Error {
  using Error::Error;
};
struct IoFailure : Error {
  using Error::Error;
};
struct BadMagic : Error {
  using Error::Error;
};
struct UnsupportedVersion : Error {
  using Error::Error;
};
struct LengthMismatch : Error {
  using Error::Error;
};
struct ZeroSupportMismatch : Error {
  using Error::Error;
};
struct NonSymmetricInput : Error {
  using Error::Error;
};
struct StrategySpaceMismatch : Error {
  using Error::Error;
};
struct ConfigError : Error {
  using Error::Error;
};

} // namespace seerl

#endif // SEERL_ERRORS_HPP
