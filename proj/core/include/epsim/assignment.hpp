#pragma once

#include <vector>

#include "epsim/types.hpp"

namespace epsim {

// Minimum-cost perfect matching on a square cost matrix (shortest augmenting
// path, O(n^3)).  Returns perm with perm[row] = assigned column.
std::vector<int> min_cost_assignment(const RealMatrix& cost);

// Distance between two complex multisets under optimal pairing: returns the
// maximum |a_i - b_perm(i)| over the best assignment.  Used to compare
// eigenvalue multisets without relying on sort order.
double matched_multiset_distance(const Vector& a, const Vector& b);

}  // namespace epsim
