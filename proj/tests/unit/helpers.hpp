#pragma once

#include <vector>

#include "boolfn.hpp"
#include "dyadic.hpp"
#include "rng.hpp"

namespace testing {

using topdown::BoolFunc;
using topdown::Dyadic;
using topdown::Restriction;
using topdown::Sign;

inline Dyadic dy(long long num, int exp) { return Dyadic(topdown::BigInt(num), exp); }

inline BoolFunc and2() { return BoolFunc::from_index_predicate(2, [](std::uint32_t k) { return k == 3; }); }
inline BoolFunc parity2() { return BoolFunc::parity(2); }

inline BoolFunc from_code(int n, std::uint64_t code) {
  BoolFunc f(n);
  for (std::uint32_t k = 0; k < f.table_size(); ++k) f.set(k, (code >> k) & 1u);
  return f;
}

/// Random restriction fixing each coordinate with probability 1/2.
inline Restriction random_restriction(int n, topdown::Rng& rng, int keep_free = 0) {
  Restriction r;
  int fixed = 0;
  for (int i = 1; i <= n; ++i) {
    if (fixed >= n - keep_free) break;
    if (rng() & 1u) {
      r.fix(i, (rng() & 1u) ? Sign(1) : Sign(-1));
      ++fixed;
    }
  }
  return r;
}

/// Materialized restriction: the function on the free coordinates only,
/// renumbered in increasing order.
inline BoolFunc materialize(const BoolFunc& f, const Restriction& r, std::vector<int>& free) {
  free.clear();
  for (int i = 1; i <= f.arity(); ++i)
    if (!r.is_fixed(i)) free.push_back(i);
  const int m = static_cast<int>(free.size());
  BoolFunc g(std::max(m, 1));
  for (std::uint32_t k = 0; k < (1u << m); ++k) {
    std::vector<Sign> x(static_cast<std::size_t>(f.arity()));
    for (int i = 1; i <= f.arity(); ++i)
      if (auto v = r.value_of(i)) x[i - 1] = *v;
    for (int j = 0; j < m; ++j) x[free[j] - 1] = (k >> j) & 1u ? 1 : -1;
    g.set(k, f.eval(x));
  }
  if (m == 0) g.set(1, g.at(0));
  return g;
}

}  // namespace testing
