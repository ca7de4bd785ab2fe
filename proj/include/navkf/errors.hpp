#pragma once

#include <stdexcept>
#include <string>

namespace navkf {

/// Base class for all errors raised by this library.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct NotAntisymmetric : Error {
  using Error::Error;
};
struct NotRotation : Error {
  using Error::Error;
};
struct DegenerateMean : Error {
  using Error::Error;
};
struct NotPsd : Error {
  using Error::Error;
};
struct SingularInnovation : Error {
  using Error::Error;
};
struct BadCovariance : Error {
  using Error::Error;
};
struct EmptyFeatureSet : Error {
  using Error::Error;
};
struct NonFiniteInput : Error {
  using Error::Error;
};
struct NonMonotoneTime : Error {
  using Error::Error;
};
struct ParseError : Error {
  using Error::Error;
};
struct UnknownFeatureId : Error {
  using Error::Error;
};
struct MisalignedSeries : Error {
  using Error::Error;
};
struct IoError : Error {
  using Error::Error;
};

}  // namespace navkf
