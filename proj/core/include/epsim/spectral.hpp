#pragma once

#include <vector>

#include "epsim/types.hpp"

namespace epsim {

// Eigendecomposition of a general complex matrix with deterministic ordering:
// eigenvalues sorted by (real, imag), unit-norm right eigenvectors with the
// first non-negligible entry rotated real-positive.
struct Eigensystem {
  Vector values;
  Matrix vectors;            // column k pairs with values[k]
  double condition = 0.0;    // condition number of the eigenvector matrix
  bool defective = false;    // condition above the defectiveness threshold
};

inline constexpr double kDefectiveConditionThreshold = 1e6;

Eigensystem eigendecompose(const Matrix& h,
                           double condition_threshold = kDefectiveConditionThreshold);

// Groups eigenvalues by single-linkage agglomeration: two values share a
// cluster when a chain of pairwise gaps below `linkage` connects them.
// Each group is sorted ascending; groups are ordered by smallest member.
std::vector<std::vector<int>> cluster_eigenvalues(const Vector& values,
                                                  double linkage);

enum class PropagatorMethod {
  Auto,        // eigenbasis when well conditioned, else scaling-and-squaring
  Eigenbasis,
  ScalingSquaring,
};

// U(z) = exp(-i z h).  Robust at defective (exceptional) points via the
// scaling-and-squaring branch.
Matrix propagator(const Matrix& h, double z,
                  PropagatorMethod method = PropagatorMethod::Auto);

}  // namespace epsim
