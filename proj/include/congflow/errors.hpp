#pragma once

#include <stdexcept>
#include <string>

namespace congflow {

// Evaluation on or across a focal point of a line congruence.
struct FocalSingularity : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Evaluation at the point/line source of a canonical flow.
struct SourceSingularity : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A finite-difference stencil would straddle a flow singularity.
struct SingularityTooClose : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Rank-1 parameterization with vanishing denominator (xi'(u)=0 or
// degenerate (u,v) chart).
struct DegenerateParameterization : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Singular pullback metric; raised where the Levi-Civita symbols or a
// metric inverse are requested at a focal radius.
struct DegenerateJacobian : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Caller forced a pressure case inconsistent with sign(lambda^2-|sigma|^2).
struct CaseMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Vandermonde fit with condition estimate above the admissible bound.
struct IllConditioned : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Spec-file parse or validation failure.
struct SpecError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace congflow
