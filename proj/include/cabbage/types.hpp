#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace cabbage {

using Real = double;
using Vec3 = Eigen::Vector3d;
using Index = std::int32_t;

inline constexpr Index kInvalid = -1;

/// Per-vertex accumulator for forces and displacements, indexed by vertex slot.
using ForceField = std::vector<Vec3>;

enum class ErrorCode {
  NonManifoldInput,
  InconsistentOrientation,
  DanglingIndex,
  DeadHandle,
  BoundaryEdge,
  IsolatedVertex,
  DegenerateFace,
  MalformedBoundary,
  EmptyBoundary,
  DisconnectedComponentWithoutSource,
  InvalidParams,
  InvalidSchedule,
  InvalidSpec,
  NonFiniteForce,
  ParseError,
  UnknownKey,
  TypeError,
  IoError,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace cabbage
