#pragma once

#include <vector>

#include "lcamr/estimator.hpp"

namespace lcamr {

struct FlagSet {
  std::vector<bool> flags;
  int count_flagged = 0;
  double fraction = 0.0;
};

/// Flags the ceil(fraction * N) elements with the largest theta values; ties
/// break toward smaller element ids. Hanging-node closure inside refine() may
/// add more elements on top of these.
FlagSet flag_top_fraction(const ElementEstimates& estimates, double fraction);

}  // namespace lcamr
