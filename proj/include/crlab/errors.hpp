#pragma once

#include <stdexcept>
#include <string>

namespace crlab {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DomainError : Error {
  using Error::Error;
};
struct RankError : Error {
  using Error::Error;
};
// frame or linear system too ill-conditioned to trust
struct ConditioningError : Error {
  using Error::Error;
};
struct QuadratureError : Error {
  using Error::Error;
};

}  // namespace crlab
