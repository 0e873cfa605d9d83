#pragma once

#include <stdexcept>
#include <string>

namespace vdc {

struct ModelError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct StrokeLimit : ModelError {
  using ModelError::ModelError;
};

struct DegenerateTriangle : ModelError {
  using ModelError::ModelError;
};

struct ClosureSingularity : ModelError {
  using ModelError::ModelError;
};

struct SingularSystem : ModelError {
  using ModelError::ModelError;
};

struct SingularMassMatrix : ModelError {
  using ModelError::ModelError;
};

struct PressureBound : ModelError {
  using ModelError::ModelError;
};

struct InvalidTopology : ModelError {
  using ModelError::ModelError;
};

struct Unreachable : ModelError {
  using ModelError::ModelError;
};

}  // namespace vdc
