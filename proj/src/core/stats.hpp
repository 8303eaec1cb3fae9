#pragma once

#include <cstdint>

namespace topdown {

/// Wilson score interval for a binomial proportion.
struct Interval {
  double estimate = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  /// Largest distance from the estimate to either bound.
  double half_width() const;
};

/// Throws DomainError for trials == 0 or confidence outside (0, 1).
Interval wilson_interval(std::uint64_t successes, std::uint64_t trials, double confidence = 0.99);

}  // namespace topdown
