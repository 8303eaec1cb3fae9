#include "stats.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/distributions/normal.hpp>

#include "errors.hpp"

namespace topdown {

double Interval::half_width() const { return std::max(estimate - lower, upper - estimate); }

Interval wilson_interval(std::uint64_t successes, std::uint64_t trials, double confidence) {
  if (trials == 0) throw DomainError("confidence interval needs at least one trial");
  if (!(confidence > 0.0 && confidence < 1.0)) throw DomainError("confidence level must lie in (0,1)");
  const double z = boost::math::quantile(boost::math::normal(), 0.5 + confidence / 2.0);
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double spread = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  return Interval{p, std::max(0.0, center - spread), std::min(1.0, center + spread)};
}

}  // namespace topdown
