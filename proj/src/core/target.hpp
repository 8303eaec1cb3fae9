#pragma once

#include <vector>

#include "boolfn.hpp"
#include "dyadic.hpp"
#include "restriction.hpp"

namespace topdown {

/// Exact conditional statistics of one subcube: the mean and, for every free
/// coordinate, the child means and the influence.
struct LeafStats {
  Dyadic mean;
  std::vector<int> free_coords;
  std::vector<Dyadic> mean_lo;  // E[f_r | x_i = -1]
  std::vector<Dyadic> mean_hi;  // E[f_r | x_i = +1]
  std::vector<Dyadic> influence;

  Dyadic total_influence() const {
    Dyadic s;
    for (const auto& v : influence) s += v;
    return s;
  }
};

/// A function on {±1}^n under the uniform distribution that answers exact
/// subcube queries. Truth tables and the structured hard instance both
/// implement it, so the growers run unchanged on either.
class ExactTarget {
 public:
  virtual ~ExactTarget() = default;
  virtual int arity() const = 0;
  virtual Dyadic expectation(const Restriction& r) const = 0;
  virtual Dyadic influence(const Restriction& r, int coord) const = 0;
  virtual bool value(std::span<const Sign> x) const = 0;
  virtual LeafStats leaf_stats(const Restriction& r) const;
};

/// Non-owning view of a truth table as an ExactTarget.
class TableTarget final : public ExactTarget {
 public:
  explicit TableTarget(const BoolFunc& f) : f_(&f) {}
  int arity() const override { return f_->arity(); }
  Dyadic expectation(const Restriction& r) const override { return topdown::expectation(*f_, r); }
  Dyadic influence(const Restriction& r, int coord) const override {
    return topdown::influence(*f_, r, coord);
  }
  bool value(std::span<const Sign> x) const override { return f_->eval(x); }
  LeafStats leaf_stats(const Restriction& r) const override;
  const BoolFunc& function() const { return *f_; }

 private:
  const BoolFunc* f_;
};

}  // namespace topdown
