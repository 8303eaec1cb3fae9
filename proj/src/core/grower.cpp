#include "grower.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <sstream>

#include "errors.hpp"

namespace topdown {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

Dyadic bias_of(const Dyadic& mean) { return min(mean, Dyadic::one() - mean); }

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct LeafState {
  Restriction r;
  int depth = 0;
  LeafStats stats;
  double g_value = 0.0;  // G(E[f_leaf]); unused in influence mode
  // best split of this leaf
  int best_coord = 0;
  double best_gain = 0.0;
  Dyadic best_score;
  bool splittable = false;
};

class Grower {
 public:
  Grower(const ExactTarget& f, const GrowthConfig& cfg) : f_(f), cfg_(cfg) {}

  GrowthResult run() {
    if (cfg_.budget < 1) throw DomainError("leaf budget must be at least 1");
    PartialTree tree;
    std::map<int, LeafState> leaves;
    leaves.emplace(0, make_leaf(Restriction{}, 0));

    GrowthTrace trace;
    trace.criterion = cfg_.impurity ? cfg_.impurity->name() : "influence";
    const LeafState& root = leaves.at(0);
    Dyadic dist = bias_of(root.stats.mean);
    Dyadic u_f = root.stats.total_influence();
    trace.initial_g_impurity = cfg_.impurity ? root.g_value : kNaN;
    trace.initial_u_f = u_f;
    trace.initial_distance = dist.to_double();
    trace.initial_exact_distance = dist;

    while (tree.size() < cfg_.budget) {
      int pick_node = -1;
      for (int node : tree.leaf_nodes()) {
        const LeafState& st = leaves.at(node);
        if (!st.splittable) continue;
        if (pick_node < 0 || better(st, leaves.at(pick_node))) pick_node = node;
      }
      if (pick_node < 0) break;
      const LeafState parent = leaves.at(pick_node);
      const bool zero = cfg_.impurity ? parent.best_gain <= kGainTolerance : parent.best_score.is_zero();
      if (cfg_.stop_on_zero_gain && zero) break;

      TraceRecord rec;
      rec.iter = static_cast<int>(trace.records.size()) + 1;
      rec.leaf_id = tree.leaf_id_of_node(pick_node);
      rec.depth = parent.depth;
      rec.query = Query::binary(parent.best_coord);
      rec.path = parent.r;
      rec.gain = cfg_.impurity ? parent.best_gain : parent.best_score.to_double();

      const auto [lo, hi] = tree.split_node(pick_node, rec.query);
      leaves.erase(pick_node);
      auto lo_it = leaves.emplace(lo, make_leaf(parent.r.with(parent.best_coord, -1), parent.depth + 1)).first;
      auto hi_it = leaves.emplace(hi, make_leaf(parent.r.with(parent.best_coord, +1), parent.depth + 1)).first;

      const int d = parent.depth;
      dist -= bias_of(parent.stats.mean).scaled(d);
      dist += (bias_of(lo_it->second.stats.mean) + bias_of(hi_it->second.stats.mean)).scaled(d + 1);
      u_f -= parent.stats.total_influence().scaled(d);
      u_f += (lo_it->second.stats.total_influence() + hi_it->second.stats.total_influence()).scaled(d + 1);

      rec.g_impurity = cfg_.impurity ? potential(tree, leaves) : kNaN;
      rec.u_f = u_f;
      rec.distance = dist.to_double();
      rec.exact_distance = dist;
      trace.records.push_back(std::move(rec));
    }

    std::vector<bool> labels;
    labels.reserve(static_cast<std::size_t>(tree.size()));
    for (int node : tree.leaf_nodes()) labels.push_back(round_label(leaves.at(node).stats.mean));
    DecisionTree completion(tree, std::move(labels));
    return GrowthResult{std::move(tree), std::move(completion), std::move(trace)};
  }

 private:
  // Strictly better than the incumbent, which has the smaller leaf id.
  bool better(const LeafState& a, const LeafState& incumbent) const {
    if (cfg_.impurity) return a.best_gain > incumbent.best_gain + kGainTolerance;
    return a.best_score > incumbent.best_score;
  }

  LeafState make_leaf(Restriction r, int depth) const {
    LeafState st;
    st.stats = f_.leaf_stats(r);
    st.r = std::move(r);
    st.depth = depth;
    const auto& s = st.stats;
    st.splittable = !s.free_coords.empty();
    if (cfg_.impurity) {
      const ImpuritySpec& g = *cfg_.impurity;
      const double p = s.mean.to_double();
      st.g_value = g(p);
      const double w = std::ldexp(1.0, -depth);
      const double wc = std::ldexp(1.0, -depth - 1);
      for (std::size_t k = 0; k < s.free_coords.size(); ++k) {
        const double gain = split_gain(g, w, p, wc, s.mean_lo[k].to_double(), wc, s.mean_hi[k].to_double());
        if (st.best_coord == 0 || gain > st.best_gain + kGainTolerance) {
          st.best_coord = s.free_coords[k];
          st.best_gain = gain;
        }
      }
    } else {
      for (std::size_t k = 0; k < s.free_coords.size(); ++k) {
        if (st.best_coord == 0 || s.influence[k] > st.best_score) {
          st.best_coord = s.free_coords[k];
          st.best_score = s.influence[k];
        }
      }
      st.best_score = st.best_score.scaled(depth);
    }
    return st;
  }

  static double potential(const PartialTree& tree, const std::map<int, LeafState>& leaves) {
    double sum = 0.0;
    for (int node : tree.leaf_nodes()) {
      const LeafState& st = leaves.at(node);
      sum += std::ldexp(st.g_value, -st.depth);
    }
    return sum;
  }

  const ExactTarget& f_;
  const GrowthConfig& cfg_;
};

}  // namespace

Dyadic GrowthTrace::exact_distance_at(std::size_t splits) const {
  const auto& v = splits == 0 ? initial_exact_distance : records.at(splits - 1).exact_distance;
  if (!v) throw DomainError("trace has no exact distances");
  return *v;
}

std::string GrowthTrace::to_csv() const {
  std::ostringstream out;
  out << "iter,leaf_id,coord,theta,gain,g_impurity,u_f,distance\n";
  auto opt_double = [](double v) { return std::isnan(v) ? std::string() : fmt(v); };
  auto opt_dyadic = [](const std::optional<Dyadic>& v) { return v ? fmt(v->to_double()) : std::string(); };
  out << "0,-1,0,,0," << opt_double(initial_g_impurity) << ',' << opt_dyadic(initial_u_f) << ','
      << fmt(initial_distance) << '\n';
  for (const auto& r : records) {
    out << r.iter << ',' << r.leaf_id << ',' << r.query.coord << ','
        << (r.query.has_threshold() ? fmt(r.query.theta) : std::string()) << ',' << fmt(r.gain) << ','
        << opt_double(r.g_impurity) << ',' << opt_dyadic(r.u_f) << ',' << fmt(r.distance) << '\n';
  }
  return out.str();
}

double split_gain(const ImpuritySpec& spec, double w_parent, double p_parent, double w_lo, double p_lo,
                  double w_hi, double p_hi) {
  return w_parent * spec(p_parent) - w_lo * spec(p_lo) - w_hi * spec(p_hi);
}

GrowthResult grow(const ExactTarget& f, const GrowthConfig& cfg) { return Grower(f, cfg).run(); }

GrowthResult grow(const BoolFunc& f, const GrowthConfig& cfg) { return grow(TableTarget(f), cfg); }

double g_impurity(const PartialTree& t, const ExactTarget& f, const ImpuritySpec& spec) {
  if (t.mode() != TreeMode::Binary) throw DomainError("G-impurity over the cube needs a binary tree");
  double sum = 0.0;
  for (int node : t.leaf_nodes())
    sum += std::ldexp(spec(f.expectation(t.restriction_of(node)).to_double()), -t.node(node).depth);
  return sum;
}

double g_impurity(const PartialTree& t, const BoolFunc& f, const ImpuritySpec& spec) {
  return g_impurity(t, TableTarget(f), spec);
}

Dyadic influence_potential(const PartialTree& t, const ExactTarget& f) {
  Dyadic sum;
  for (int node : t.leaf_nodes()) {
    const Restriction r = t.restriction_of(node);
    Dyadic total;
    for (int i = 1; i <= f.arity(); ++i)
      if (!r.is_fixed(i)) total += f.influence(r, i);
    sum += total.scaled(t.node(node).depth);
  }
  return sum;
}

double purity_gain(const PartialTree& t, const ExactTarget& f, const ImpuritySpec& spec, int leaf_id,
                   const Query& q) {
  const int node = t.leaf_node(leaf_id);
  t.check_split(node, q);
  if (q.coord > f.arity()) throw DomainError("query coordinate exceeds the function's arity");
  const Restriction r = t.restriction_of(node);
  const int d = t.node(node).depth;
  return split_gain(spec, std::ldexp(1.0, -d), f.expectation(r).to_double(), std::ldexp(1.0, -d - 1),
                    f.expectation(r.with(q.coord, -1)).to_double(), std::ldexp(1.0, -d - 1),
                    f.expectation(r.with(q.coord, +1)).to_double());
}

double purity_gain(const PartialTree& t, const BoolFunc& f, const ImpuritySpec& spec, int leaf_id,
                   const Query& q) {
  return purity_gain(t, TableTarget(f), spec, leaf_id, q);
}

bool SplitInequalityReport::pass() const {
  if (!claim1 || !initial_claim2) return false;
  for (const auto& it : iterations)
    if (!it.pass()) return false;
  return true;
}

SplitInequalityReport verify_split_inequalities(const GrowthTrace& trace, const BoolFunc& f,
                                                const ImpuritySpec& spec, const Monitor& monitor) {
  if (!is_monotone(f)) throw RefusedError("split inequalities are only guaranteed for monotone targets");
  if (monitor.s < 2) throw RefusedError("monitor needs s >= 2 (log s = 0 makes the bound vacuous)");
  if (trace.criterion == "influence") throw RefusedError("influence-mode traces carry no purity gains");

  const double kappa = spec.kappa();
  const double log_s = std::log2(static_cast<double>(monitor.s));
  const long double threshold = monitor.opt_s.to_long_double() + static_cast<long double>(monitor.eps);

  struct Leaf {
    Restriction r;
    int depth;
    Dyadic mean;
    double g;
  };
  PartialTree tree;
  std::map<int, Leaf> leaves;
  const Dyadic mean0 = expectation(f);
  leaves.emplace(0, Leaf{{}, 0, mean0, spec(mean0.to_double())});
  Dyadic dist = bias_of(mean0);
  double potential = leaves.at(0).g;

  SplitInequalityReport rep;
  rep.claim1 = std::abs(potential - trace.initial_g_impurity) <= kGainTolerance && potential <= 1.0 + kGainTolerance;
  rep.initial_claim2 = dist.to_double() <= potential + kGainTolerance &&
                       (!trace.initial_exact_distance || *trace.initial_exact_distance == dist);

  for (const auto& rec : trace.records) {
    IterationCheck chk;
    chk.iter = rec.iter;
    const int node = tree.leaf_node(rec.leaf_id);
    const Leaf parent = leaves.at(node);
    const int i = rec.query.coord;
    const int d = parent.depth;
    const auto [lo, hi] = tree.split_node(node, rec.query);
    leaves.erase(node);
    const Restriction r_lo = parent.r.with(i, -1);
    const Restriction r_hi = parent.r.with(i, +1);
    const Dyadic m_lo = expectation(f, r_lo);
    const Dyadic m_hi = expectation(f, r_hi);
    leaves.emplace(lo, Leaf{r_lo, d + 1, m_lo, spec(m_lo.to_double())});
    leaves.emplace(hi, Leaf{r_hi, d + 1, m_hi, spec(m_hi.to_double())});

    const double gain = split_gain(spec, std::ldexp(1.0, -d), parent.mean.to_double(), std::ldexp(1.0, -d - 1),
                                   m_lo.to_double(), std::ldexp(1.0, -d - 1), m_hi.to_double());
    chk.gain = gain;
    const Dyadic dist_before = dist;
    dist -= bias_of(parent.mean).scaled(d);
    dist += (bias_of(m_lo) + bias_of(m_hi)).scaled(d + 1);
    double fresh = 0.0;
    for (int leaf : tree.leaf_nodes()) fresh += std::ldexp(leaves.at(leaf).g, -leaves.at(leaf).depth);

    chk.recorded_values_match = rec.path == parent.r && std::abs(rec.gain - gain) <= kGainTolerance &&
                                std::abs(rec.g_impurity - fresh) <= kGainTolerance &&
                                (!rec.exact_distance || *rec.exact_distance == dist);
    chk.telescoping = std::abs((potential - gain) - fresh) <= kGainTolerance;
    chk.distance_non_increasing = dist <= dist_before;
    chk.claim2 = dist.to_double() <= fresh + kGainTolerance;

    const double inf = influence(f, parent.r, i).to_double();
    chk.claim3_bound = std::ldexp(1.0, -d) * (kappa / 32.0) * inf * inf;
    chk.claim3_tight_bound = std::ldexp(1.0, -d) * (kappa / 2.0) * inf * inf;
    chk.claim3 = gain >= chk.claim3_bound - kGainTolerance;

    // rec.iter is the tree size before this split
    const double denom = static_cast<double>(rec.iter) * log_s * log_s;
    chk.score_lb_bound = kappa * monitor.eps * monitor.eps / (32.0 * denom);
    chk.score_lb_tight_bound = kappa * monitor.eps * monitor.eps / (2.0 * denom);
    chk.score_lb_applies = dist_before.to_long_double() > threshold;
    if (chk.score_lb_applies) {
      ++rep.score_lb_checked;
      chk.score_lb = gain > chk.score_lb_bound;
      if (!chk.score_lb) ++rep.score_lb_failed;
    }
    potential = fresh;
    rep.iterations.push_back(chk);
  }
  return rep;
}

ArgmaxReport argmax_agreement(const BoolFunc& f, const PartialTree& t, int leaf_id, const ImpuritySpec& spec) {
  if (!is_monotone(f)) throw RefusedError("argmax agreement is only guaranteed for monotone targets");
  const int node = t.leaf_node(leaf_id);
  const Restriction r = t.restriction_of(node);
  const SubcubeProfile prof = profile(f, r);
  if (prof.ones == 0 || prof.ones == (std::uint64_t{1} << prof.free_count))
    throw RefusedError("restricted function is constant at this leaf");

  const int d = t.node(node).depth;
  const double p = prof.mean().to_double();
  std::vector<int> coords;
  std::vector<double> gains;
  std::vector<Dyadic> corr, inf;
  for (int i = 1; i <= f.arity(); ++i) {
    if (!prof.free_coord[static_cast<std::size_t>(i - 1)]) continue;
    coords.push_back(i);
    gains.push_back(split_gain(spec, std::ldexp(1.0, -d), p, std::ldexp(1.0, -d - 1),
                               prof.mean_given(i, -1).to_double(), std::ldexp(1.0, -d - 1),
                               prof.mean_given(i, +1).to_double()));
    corr.push_back(abs(prof.correlation(i)));
    inf.push_back(prof.influence(i));
  }
  ArgmaxReport rep;
  double best_gain = -std::numeric_limits<double>::infinity();
  for (double g : gains) best_gain = std::max(best_gain, g);
  const Dyadic best_corr = *std::max_element(corr.begin(), corr.end());
  const Dyadic best_inf = *std::max_element(inf.begin(), inf.end());
  for (std::size_t k = 0; k < coords.size(); ++k) {
    if (gains[k] >= best_gain - kGainTolerance) rep.gain_argmax.push_back(coords[k]);
    if (corr[k] == best_corr) rep.correlation_argmax.push_back(coords[k]);
    if (inf[k] == best_inf) rep.influence_argmax.push_back(coords[k]);
  }
  rep.gain_pick = rep.gain_argmax.front();
  rep.correlation_pick = rep.correlation_argmax.front();
  rep.influence_pick = rep.influence_argmax.front();
  rep.agree = rep.gain_pick == rep.correlation_pick && rep.correlation_pick == rep.influence_pick;
  return rep;
}

CommonLeafReport compare_split_variables(const GrowthTrace& a, const GrowthTrace& b) {
  std::map<std::string, int> chosen;
  for (const auto& r : a.records) chosen.emplace(r.path.to_string(), r.query.coord);
  CommonLeafReport rep;
  for (const auto& r : b.records) {
    const auto it = chosen.find(r.path.to_string());
    if (it == chosen.end()) continue;
    ++rep.common_leaves;
    if (it->second != r.query.coord) {
      ++rep.disagreements;
      rep.details.push_back(r.path.to_string() + ": x" + std::to_string(it->second) + " vs x" +
                            std::to_string(r.query.coord));
    }
  }
  return rep;
}

}  // namespace topdown
