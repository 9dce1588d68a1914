#include "lcamr/amr.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace lcamr {

FlagSet flag_top_fraction(const ElementEstimates& estimates, double fraction) {
  const int n = static_cast<int>(estimates.theta.size());
  if (n == 0) throw std::invalid_argument("flag_top_fraction: empty estimates");
  if (!(fraction > 0.0 && fraction <= 1.0))
    throw std::invalid_argument("flag_top_fraction: fraction must be in (0, 1]");

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (estimates.theta[a] != estimates.theta[b])
      return estimates.theta[a] > estimates.theta[b];
    return a < b;
  });

  FlagSet fs;
  fs.fraction = fraction;
  fs.count_flagged = static_cast<int>(std::ceil(fraction * n));
  fs.flags.assign(n, false);
  for (int k = 0; k < fs.count_flagged; ++k) fs.flags[order[k]] = true;
  return fs;
}

}  // namespace lcamr
