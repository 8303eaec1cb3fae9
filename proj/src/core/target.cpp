#include "target.hpp"

namespace topdown {

LeafStats ExactTarget::leaf_stats(const Restriction& r) const {
  LeafStats s;
  s.mean = expectation(r);
  for (int i = 1; i <= arity(); ++i) {
    if (r.is_fixed(i)) continue;
    s.free_coords.push_back(i);
    s.mean_lo.push_back(expectation(r.with(i, -1)));
    s.mean_hi.push_back(expectation(r.with(i, +1)));
    s.influence.push_back(influence(r, i));
  }
  return s;
}

LeafStats TableTarget::leaf_stats(const Restriction& r) const {
  const SubcubeProfile p = profile(*f_, r);
  LeafStats s;
  s.mean = p.mean();
  for (int i = 1; i <= f_->arity(); ++i) {
    if (!p.free_coord[i - 1]) continue;
    s.free_coords.push_back(i);
    s.mean_lo.push_back(p.mean_given(i, -1));
    s.mean_hi.push_back(p.mean_given(i, +1));
    s.influence.push_back(p.influence(i));
  }
  return s;
}

}  // namespace topdown
