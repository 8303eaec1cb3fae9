#include "hardinstance.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <thread>

#include "errors.hpp"
#include "rng.hpp"
#include "stats.hpp"

namespace topdown {

namespace {

Dyadic power(const Dyadic& base, int e) {
  Dyadic r = Dyadic::one();
  for (int k = 0; k < e; ++k) r *= base;
  return r;
}

Dyadic survival_prob(int w, int terms) {
  return Dyadic::one() - power(Dyadic::one() - Dyadic::ratio(1, w), terms);
}

}  // namespace

TribesParams choose_tribes(int l) {
  if (l < 2) throw DomainError("Tribes needs l >= 2");
  TribesParams p;
  p.l = l;
  Dyadic best_gap;
  for (int w = 1; w <= l; ++w) {
    const int m = l / w;
    const Dyadic pf = survival_prob(w, m);
    const Dyadic gap = abs(pf - Dyadic::half());
    if (p.w == 0 || gap < best_gap) {
      p.w = w;
      p.m = m;
      p.p_full = pf;
      best_gap = gap;
    }
  }
  // |p' - 0.499| compared exactly as |1000 p' - 499|
  const int lo = p.m > 1 ? 1 : 0;
  Dyadic best;
  for (int mp = lo; mp <= std::max(lo, p.m - 1); ++mp) {
    const Dyadic pp = survival_prob(p.w, mp);
    const Dyadic gap = abs(pp * Dyadic::from_int(1000) - Dyadic::from_int(499));
    if (mp == lo || gap < best) {
      p.m_prime = mp;
      p.p_prime = pp;
      best = gap;
    }
  }
  return p;
}

HardInstance choose_params(int l, int k) { return HardInstance(choose_tribes(l), k); }

HardInstance::HardInstance(TribesParams params, int k) : p_(std::move(params)), k_(k) {
  if (p_.l < 2) throw DomainError("hard instance needs l >= 2");
  if (k_ < 1 || k_ % 2 == 0) throw DomainError("majority arity k must be odd and positive");
  if (p_.w < 1 || p_.m < 1 || p_.m * p_.w > p_.l || p_.m_prime < 0 || p_.m_prime > p_.m)
    throw DomainError("inconsistent Tribes parameters");
  binom_.resize(static_cast<std::size_t>(k_) + 1);
  for (int r = 0; r <= k_; ++r) {
    auto& row = binom_[static_cast<std::size_t>(r)];
    row.assign(static_cast<std::size_t>(r) + 1, BigInt(1));
    for (int c = 1; c < r; ++c) row[c] = binom_[r - 1][c - 1] + binom_[r - 1][c];
  }
}

void HardInstance::check(const Restriction& r) const {
  if (r.max_coord() > arity())
    throw DomainError("restriction fixes x" + std::to_string(r.max_coord()) + " but the instance has " +
                      std::to_string(arity()) + " coordinates");
}

std::vector<Dyadic> HardInstance::term_probs(const Restriction& r) const {
  std::vector<int> free(static_cast<std::size_t>(p_.m), p_.w);
  std::vector<char> dead(static_cast<std::size_t>(p_.m), 0);
  for (const auto& lit : r.literals()) {
    if (lit.coord > p_.m * p_.w) break;
    const auto j = static_cast<std::size_t>((lit.coord - 1) / p_.w);
    if (lit.value < 0) dead[j] = 1;
    else --free[j];
  }
  std::vector<Dyadic> q(static_cast<std::size_t>(p_.m));
  for (std::size_t j = 0; j < q.size(); ++j) q[j] = dead[j] ? Dyadic() : Dyadic::ratio(1, free[j]);
  return q;
}

Dyadic HardInstance::prob_tribes_prime(const Restriction& r) const {
  check(r);
  const auto q = term_probs(r);
  Dyadic none = Dyadic::one();
  for (int j = 0; j < p_.m_prime; ++j) none *= Dyadic::one() - q[j];
  return Dyadic::one() - none;
}

Dyadic HardInstance::prob_rest(const Restriction& r) const {
  check(r);
  const auto q = term_probs(r);
  Dyadic none_prime = Dyadic::one();
  Dyadic none_rest = Dyadic::one();
  for (int j = 0; j < p_.m; ++j) (j < p_.m_prime ? none_prime : none_rest) *= Dyadic::one() - q[j];
  return none_prime * (Dyadic::one() - none_rest);
}

// Pr[at least `need` of `free_count` fair coins come up +1].
Dyadic HardInstance::tail(int free_count, int need) const {
  if (need <= 0) return Dyadic::one();
  if (need > free_count) return Dyadic();
  BigInt count = 0;
  for (int j = need; j <= free_count; ++j) count += binom_[free_count][j];
  return Dyadic(count, free_count);
}

Dyadic HardInstance::prob_majority(const Restriction& r) const {
  check(r);
  int plus = 0, fixed = 0;
  for (const auto& lit : r.literals()) {
    if (!is_y(lit.coord)) continue;
    ++fixed;
    if (lit.value > 0) ++plus;
  }
  return tail(k_ - fixed, (k_ + 1) / 2 - plus);
}

Dyadic HardInstance::expectation(const Restriction& r) const {
  check(r);
  const auto q = term_probs(r);
  Dyadic none_prime = Dyadic::one();
  Dyadic none_rest = Dyadic::one();
  for (int j = 0; j < p_.m; ++j) (j < p_.m_prime ? none_prime : none_rest) *= Dyadic::one() - q[j];
  const Dyadic rest = none_prime * (Dyadic::one() - none_rest);
  return (Dyadic::one() - none_prime) + rest * prob_majority(r);
}

Dyadic HardInstance::influence(const Restriction& r, int coord) const {
  check(r);
  if (coord < 1 || coord > arity()) throw DomainError("coordinate " + std::to_string(coord) + " out of range");
  if (r.is_fixed(coord)) throw DomainError("coordinate " + std::to_string(coord) + " is fixed by the restriction");
  if (is_y(coord)) {
    int plus = 0, fixed = 0;
    for (const auto& lit : r.literals()) {
      if (!is_y(lit.coord)) continue;
      ++fixed;
      if (lit.value > 0) ++plus;
    }
    // flipping y_c changes Maj iff the other free y's bring the +1 count to exactly (k+1)/2 - 1
    const int others = k_ - fixed - 1;
    const int exact = (k_ + 1) / 2 - 1 - plus;
    if (exact < 0 || exact > others) return Dyadic();
    return prob_rest(r) * Dyadic(binom_[others][exact], others);
  }
  // f is monotone non-decreasing, so the influence is the gap between the two halves.
  return expectation(r.with(coord, +1)) - expectation(r.with(coord, -1));
}

LeafStats HardInstance::leaf_stats(const Restriction& r) const {
  check(r);
  LeafStats s;
  s.mean = expectation(r);
  for (int i = 1; i <= arity(); ++i) {
    if (r.is_fixed(i)) continue;
    s.free_coords.push_back(i);
    s.mean_lo.push_back(expectation(r.with(i, -1)));
    s.mean_hi.push_back(expectation(r.with(i, +1)));
    s.influence.push_back(is_y(i) ? influence(r, i) : s.mean_hi.back() - s.mean_lo.back());
  }
  return s;
}

bool HardInstance::tribes(std::span<const Sign> x) const {
  for (int j = 0; j < p_.m; ++j) {
    bool all = true;
    for (int c = j * p_.w; c < (j + 1) * p_.w && all; ++c) all = x[c] > 0;
    if (all) return true;
  }
  return false;
}

bool HardInstance::tribes_prime(std::span<const Sign> x) const {
  for (int j = 0; j < p_.m_prime; ++j) {
    bool all = true;
    for (int c = j * p_.w; c < (j + 1) * p_.w && all; ++c) all = x[c] > 0;
    if (all) return true;
  }
  return false;
}

bool HardInstance::majority(std::span<const Sign> x) const {
  int sum = 0;
  for (int c = p_.l; c < p_.l + k_; ++c) sum += x[c];
  return sum >= 0;
}

bool HardInstance::value(std::span<const Sign> x) const {
  if (static_cast<int>(x.size()) != arity()) throw DomainError("input length does not match the instance arity");
  if (tribes_prime(x)) return true;
  return tribes(x) && majority(x);
}

bool HardInstance::satisfies_shape(double c1) const {
  return c1 / std::sqrt(static_cast<double>(k_)) >= std::log2(static_cast<double>(p_.l)) / p_.l;
}

BoolFunc HardInstance::to_function() const {
  if (arity() > BoolFunc::kMaxArity) throw DomainError("instance too large for a truth table");
  return BoolFunc::from_predicate(arity(), [this](std::span<const Sign> x) { return value(x); });
}

DecisionTree HardInstance::tribes_tree() const {
  std::vector<PartialTree::Node> nodes;
  std::vector<std::pair<int, bool>> leaf_labels;
  std::vector<Sign> x(static_cast<std::size_t>(arity()), Sign{-1});
  auto build = [&](auto&& self, int depth) -> int {
    const int id = static_cast<int>(nodes.size());
    nodes.emplace_back();
    if (depth == p_.l) {
      leaf_labels.emplace_back(id, tribes(x));
      return id;
    }
    nodes[id].query = Query::binary(depth + 1);
    x[depth] = -1;
    const int lo = self(self, depth + 1);
    x[depth] = +1;
    const int hi = self(self, depth + 1);
    nodes[id].lo = lo;
    nodes[id].hi = hi;
    return id;
  };
  build(build, 0);
  PartialTree shape = PartialTree::from_nodes(TreeMode::Binary, std::move(nodes));
  std::vector<bool> labels(static_cast<std::size_t>(shape.size()));
  for (const auto& [node, label] : leaf_labels) labels[static_cast<std::size_t>(shape.leaf_id_of_node(node))] = label;
  return DecisionTree(std::move(shape), std::move(labels));
}

std::string LowerBoundReport::to_csv() const {
  std::ostringstream out;
  out.precision(17);
  out << "size,error_estimate,error_ci,xi_fraction,xi_ci,error_mc,error_mc_ci,error_exact\n";
  for (const auto& r : rows)
    out << r.size << ',' << r.error.to_double() << ",0," << r.xi_fraction << ',' << r.xi_ci << ',' << r.error_mc
        << ',' << r.error_mc_ci << ',' << r.error.to_string() << '\n';
  return out.str();
}

LowerBoundReport lower_bound_experiment(const HardInstance& h, const ImpuritySpec& spec, const LowerBoundConfig& cfg) {
  if (cfg.samples == 0) throw DomainError("sample count must be positive");
  GrowthConfig gc;
  gc.impurity = spec;
  gc.budget = cfg.budget;
  GrowthResult res = grow(h, gc);
  const PartialTree& tree = res.tree;
  const int final_size = tree.size();

  LowerBoundReport rep;
  rep.impurity = spec.name();
  rep.tribes_distance = distance(h.tribes_tree(), h);

  // Split j creates nodes 2j-1 and 2j, so an internal node's split iteration
  // is read off its children; leaves never split within the budget.
  const int nodes = tree.node_count();
  std::vector<int> split_iter(static_cast<std::size_t>(nodes), final_size);
  std::vector<char> not_label(static_cast<std::size_t>(nodes));  // complement of the node's completion label
  for (int v = 0; v < nodes; ++v) {
    const auto& nd = tree.node(v);
    if (!nd.is_leaf()) {
      split_iter[v] = (nd.lo + 1) / 2;
      if (h.is_x(nd.query.coord)) ++rep.x_queries;
      else ++rep.y_queries;
    }
    not_label[v] = !round_label(h.expectation(tree.restriction_of(v)));
  }

  // Per-shard difference arrays over sizes 1..final_size.
  constexpr std::uint64_t kShard = 4096;
  const std::uint64_t shards = (cfg.samples + kShard - 1) / kShard;
  struct Counts {
    std::vector<std::int64_t> err, xi;
  };
  std::vector<Counts> per_shard(shards);
  auto run_shard = [&](std::uint64_t s) {
    Counts c{std::vector<std::int64_t>(final_size + 2), std::vector<std::int64_t>(final_size + 2)};
    Rng rng(substream(cfg.seed, "hard-mc", s));
    std::vector<Sign> x(static_cast<std::size_t>(h.arity()));
    const std::uint64_t begin = s * kShard;
    const std::uint64_t end = std::min(cfg.samples, begin + kShard);
    for (std::uint64_t t = begin; t < end; ++t) {
      for (auto& v : x) v = (rng() & 1u) ? Sign{1} : Sign{-1};
      const bool fx = h.value(x);
      int v = 0;
      int from = 1;  // first size at which v is the leaf on this path
      int y_seen = 0;
      bool xi_set = false;
      while (true) {
        const auto& nd = tree.node(v);
        const int until = split_iter[v];  // v is a leaf for sizes from..until
        if (fx == static_cast<bool>(not_label[v])) {
          c.err[from] += 1;
          c.err[until + 1] -= 1;
        }
        if (nd.is_leaf()) break;
        if (!xi_set && h.is_x(nd.query.coord)) {
          xi_set = true;
          if (y_seen < cfg.y_depth) {
            c.xi[until + 1] += 1;
            c.xi[final_size + 1] -= 1;
          }
        } else if (h.is_y(nd.query.coord)) {
          ++y_seen;
        }
        from = until + 1;
        v = x[nd.query.coord - 1] > 0 ? nd.hi : nd.lo;
      }
    }
    per_shard[s] = std::move(c);
  };
  const int threads = std::max(1, cfg.threads);
  if (threads == 1) {
    for (std::uint64_t s = 0; s < shards; ++s) run_shard(s);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < threads; ++w)
      pool.emplace_back([&, w] {
        for (std::uint64_t s = static_cast<std::uint64_t>(w); s < shards; s += static_cast<std::uint64_t>(threads))
          run_shard(s);
      });
    for (auto& t : pool) t.join();
  }
  std::vector<std::int64_t> err(final_size + 2), xi(final_size + 2);
  for (const auto& c : per_shard)
    for (int k = 0; k <= final_size + 1; ++k) {
      err[k] += c.err[k];
      xi[k] += c.xi[k];
    }

  std::int64_t run_err = 0, run_xi = 0;
  rep.stays_above = true;
  for (int size = 1; size <= final_size; ++size) {
    run_err += err[size];
    run_xi += xi[size];
    LowerBoundRow row;
    row.size = size;
    row.error = res.trace.exact_distance_at(static_cast<std::size_t>(size - 1));
    const Interval e = wilson_interval(static_cast<std::uint64_t>(run_err), cfg.samples, cfg.confidence);
    const Interval z = wilson_interval(static_cast<std::uint64_t>(run_xi), cfg.samples, cfg.confidence);
    row.error_mc = e.estimate;
    row.error_mc_ci = e.half_width();
    row.xi_fraction = z.estimate;
    row.xi_ci = z.half_width();
    if (size == 1 || row.error < rep.min_error) rep.min_error = row.error;
    if (!(row.error.to_double() > cfg.threshold)) rep.stays_above = false;
    rep.rows.push_back(std::move(row));
  }
  rep.trace = std::move(res.trace);
  return rep;
}

}  // namespace topdown
