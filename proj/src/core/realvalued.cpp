#include "realvalued.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "errors.hpp"

namespace topdown {

Cdf Cdf::uniform01() { return Cdf{}; }

Cdf Cdf::table(std::vector<std::pair<double, double>> points) {
  if (points.size() < 2) throw DomainError("CDF table needs at least two points");
  std::sort(points.begin(), points.end());
  Cdf c;
  c.kind_ = Kind::Table;
  for (std::size_t k = 0; k < points.size(); ++k) {
    const auto [v, f] = points[k];
    if (!std::isfinite(v) || !(f >= 0.0 && f <= 1.0)) throw DomainError("CDF table values must be finite with F in [0,1]");
    if (k > 0 && (v == points[k - 1].first || f < points[k - 1].second))
      throw DomainError("CDF table must have distinct abscissae and non-decreasing F");
    c.xs_.push_back(v);
    c.ys_.push_back(f);
  }
  if (c.ys_.front() != 0.0 || c.ys_.back() != 1.0) throw DomainError("CDF table must run from F = 0 to F = 1");
  return c;
}

Cdf Cdf::empirical(std::vector<double> values) {
  if (values.empty()) throw DomainError("empirical CDF needs at least one value");
  for (double v : values)
    if (!std::isfinite(v)) throw DomainError("empirical CDF values must be finite");
  std::sort(values.begin(), values.end());
  Cdf c;
  c.kind_ = Kind::Empirical;
  c.xs_ = std::move(values);
  return c;
}

double Cdf::operator()(double v) const {
  switch (kind_) {
    case Kind::Uniform:
      return std::clamp(v, 0.0, 1.0);
    case Kind::Table: {
      if (v <= xs_.front()) return ys_.front();
      if (v >= xs_.back()) return ys_.back();
      const auto k = static_cast<std::size_t>(std::upper_bound(xs_.begin(), xs_.end(), v) - xs_.begin());
      const double t = (v - xs_[k - 1]) / (xs_[k] - xs_[k - 1]);
      return ys_[k - 1] + t * (ys_[k] - ys_[k - 1]);
    }
    case Kind::Empirical:
      return static_cast<double>(std::upper_bound(xs_.begin(), xs_.end(), v) - xs_.begin()) /
             static_cast<double>(xs_.size());
  }
  return 0.0;
}

double Cdf::quantile(double u) const {
  if (!(u >= 0.0 && u <= 1.0)) throw DomainError("quantile level outside [0,1]");
  switch (kind_) {
    case Kind::Uniform:
      return u;
    case Kind::Table: {
      const auto k = static_cast<std::size_t>(std::lower_bound(ys_.begin(), ys_.end(), u) - ys_.begin());
      if (k == 0) return xs_.front();
      const double t = (u - ys_[k - 1]) / (ys_[k] - ys_[k - 1]);
      return xs_[k - 1] + t * (xs_[k] - xs_[k - 1]);
    }
    case Kind::Empirical: {
      const auto n = static_cast<double>(xs_.size());
      const auto idx = static_cast<std::size_t>(std::max(0.0, std::ceil(u * n) - 1.0));
      return xs_[std::min(idx, xs_.size() - 1)];
    }
  }
  return 0.0;
}

std::string Cdf::kind() const {
  switch (kind_) {
    case Kind::Uniform: return "uniform01";
    case Kind::Table: return "cdf_table";
    case Kind::Empirical: return "empirical";
  }
  return "";
}

ProductDistribution::ProductDistribution(std::vector<Cdf> coords) : coords_(std::move(coords)) {}

ProductDistribution ProductDistribution::uniform(int n) {
  return ProductDistribution(std::vector<Cdf>(static_cast<std::size_t>(n), Cdf::uniform01()));
}

std::vector<double> ProductDistribution::sample(Rng& rng) const {
  std::vector<double> x(coords_.size());
  for (std::size_t i = 0; i < coords_.size(); ++i) x[i] = coords_[i].quantile(uniform01(rng));
  return x;
}

std::vector<double> cdf_transform(const ProductDistribution& d, std::span<const double> x) {
  if (static_cast<int>(x.size()) != d.dimension()) throw DomainError("point dimension does not match the distribution");
  std::vector<double> u(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) u[i] = d.coord(static_cast<int>(i) + 1)(x[i]);
  return u;
}

std::vector<Sign> encode(double x, int w) {
  if (w < 1 || w > 53) throw DomainError("encoder width must lie in [1,53]");
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError("encoder input outside [0,1]");
  const std::uint64_t top = (std::uint64_t{1} << w) - 1;
  const std::uint64_t v = x == 1.0 ? top : std::min(top, static_cast<std::uint64_t>(std::floor(std::ldexp(x, w))));
  std::vector<Sign> bits(static_cast<std::size_t>(w));
  for (int b = 0; b < w; ++b) bits[b] = ((v >> (w - 1 - b)) & 1u) ? Sign{1} : Sign{-1};
  return bits;
}

std::vector<Sign> encode_point(std::span<const double> x, int w) {
  std::vector<Sign> out;
  out.reserve(x.size() * static_cast<std::size_t>(w));
  for (double v : x) {
    const auto bits = encode(v, w);
    out.insert(out.end(), bits.begin(), bits.end());
  }
  return out;
}

DecisionTree round_thresholds(const DecisionTree& t, int w) {
  if (w < 1 || w > 53) throw DomainError("rounding width must lie in [1,53]");
  auto nodes = t.shape().nodes();
  for (auto& nd : nodes) {
    if (nd.is_leaf()) continue;
    if (!(nd.query.theta >= 0.0 && nd.query.theta <= 1.0)) throw DomainError("threshold outside [0,1]");
    nd.query.theta = std::ldexp(std::nearbyint(std::ldexp(nd.query.theta, w)), -w);
  }
  return DecisionTree(PartialTree::from_nodes(t.mode(), std::move(nodes)), t.labels());
}

Interval estimate_dist(const DecisionTree& t1, const DecisionTree& t2, const ProductDistribution& d,
                       std::uint64_t samples, std::uint64_t seed, double confidence) {
  if (samples == 0) throw DomainError("sample count must be positive");
  Rng rng(substream(seed, "estimate-dist"));
  std::uint64_t disagree = 0;
  for (std::uint64_t k = 0; k < samples; ++k) {
    const auto x = d.sample(rng);
    if (t1.evaluate(std::span<const double>(x)) != t2.evaluate(std::span<const double>(x))) ++disagree;
  }
  return wilson_interval(disagree, samples, confidence);
}

namespace {

class EncodedBuilder {
 public:
  EncodedBuilder(const DecisionTree& t, int n, int w, std::size_t cap)
      : t_(t), w_(w), cap_(cap), known_(static_cast<std::size_t>(n) * static_cast<std::size_t>(w), 0), n_(n) {}

  DecisionTree build() {
    emit(0);
    PartialTree shape = PartialTree::from_nodes(TreeMode::Binary, std::move(nodes_));
    std::vector<bool> labels(static_cast<std::size_t>(shape.size()));
    for (const auto& [node, label] : leaf_labels_)
      labels[static_cast<std::size_t>(shape.leaf_id_of_node(node))] = label;
    return DecisionTree(std::move(shape), std::move(labels));
  }

 private:
  int fresh() {
    if (nodes_.size() >= cap_) throw DomainError("encoded tree exceeds the node cap");
    nodes_.emplace_back();
    return static_cast<int>(nodes_.size()) - 1;
  }

  int emit(int tnode) {
    const auto& nd = t_.shape().node(tnode);
    if (nd.is_leaf()) {
      const int id = fresh();
      leaf_labels_.emplace_back(id, t_.label(t_.shape().leaf_id_of_node(tnode)));
      return id;
    }
    const int i = nd.query.coord;
    if (i > n_) throw DomainError("tree queries a coordinate beyond n");
    const double scaled = std::ldexp(nd.query.theta, w_);
    if (!(nd.query.theta >= 0.0 && nd.query.theta <= 1.0) || scaled != std::floor(scaled))
      throw DomainError("threshold is not a multiple of 2^-w in [0,1]");
    return compare(tnode, i, static_cast<std::uint64_t>(scaled), 1);
  }

  // Subtree deciding floor(x_i 2^w) >= c from bit b on, given that bits
  // 1..b-1 of x_i equal those of c.
  int compare(int tnode, int i, std::uint64_t c, int b) {
    const auto& nd = t_.shape().node(tnode);
    if (c == 0) return emit(nd.hi);
    if (c >> w_) return emit(nd.lo);
    if (b > w_) return emit(nd.hi);
    const bool cb = (c >> (w_ - b)) & 1u;
    const auto coord = static_cast<std::size_t>((i - 1) * w_ + b);
    auto next = [&](bool bit) {
      if (cb && !bit) return emit(nd.lo);
      if (!cb && bit) return emit(nd.hi);
      return compare(tnode, i, c, b + 1);
    };
    if (known_[coord - 1] != 0) return next(known_[coord - 1] > 0);
    const int id = fresh();
    nodes_[id].query = Query::binary(static_cast<int>(coord));
    known_[coord - 1] = -1;
    const int lo = next(false);
    known_[coord - 1] = +1;
    const int hi = next(true);
    known_[coord - 1] = 0;
    nodes_[id].lo = lo;
    nodes_[id].hi = hi;
    return id;
  }

  const DecisionTree& t_;
  int w_;
  std::size_t cap_;
  std::vector<Sign> known_;
  int n_;
  std::vector<PartialTree::Node> nodes_;
  std::vector<std::pair<int, bool>> leaf_labels_;
};

}  // namespace

DecisionTree encoded_tree(const DecisionTree& t, int n, int w, std::size_t node_cap) {
  if (t.mode() != TreeMode::Real) throw DomainError("encoding applies to real-valued trees");
  if (w < 1 || w > 30) throw DomainError("encoded-tree width must lie in [1,30]");
  if (static_cast<long long>(n) * w > 1'000'000) throw DomainError("too many encoded coordinates");
  return EncodedBuilder(t, n, w, node_cap).build();
}

DecisionTree random_balanced_tree(int n, int leaves, int max_depth, Rng& rng) {
  if (n < 1 || leaves < 1) throw DomainError("random tree needs n >= 1 and at least one leaf");
  PartialTree t(TreeMode::Real);
  while (t.size() < leaves) {
    std::vector<int> open;
    for (int node : t.leaf_nodes())
      if (t.node(node).depth < max_depth) open.push_back(node);
    if (open.empty()) break;
    const int node = open[uniform_below(rng, open.size())];
    const int coord = 1 + static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(n)));
    double theta = 0.0;
    while (theta == 0.0) theta = uniform01(rng);
    t.split_node(node, Query::threshold(coord, theta));
  }
  std::vector<bool> labels(static_cast<std::size_t>(t.size()));
  for (std::size_t k = 0; k < labels.size(); ++k) labels[k] = rng() & 1u;
  return DecisionTree(std::move(t), std::move(labels));
}

std::vector<double> RealSample::column(int i) const {
  std::vector<double> c;
  c.reserve(x.size());
  for (const auto& p : x) c.push_back(p.at(static_cast<std::size_t>(i - 1)));
  return c;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  for (auto& s : out) {
    const auto b = s.find_first_not_of(" \t");
    const auto e = s.find_last_not_of(" \t");
    s = b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  }
  return out;
}

double parse_number(const std::string& s, std::size_t line) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v))
    throw FormatError("line " + std::to_string(line) + ": \"" + s + "\" is not a finite number");
  return v;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

RealSample parse_dataset_csv(const std::string& text, const std::string& provenance) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw FormatError("dataset is empty (a header row is required)");
  const auto header = split_csv_line(line);
  if (header.size() < 2) throw FormatError("dataset needs at least one feature column and a label column");
  std::size_t label_col = header.size() - 1;
  for (std::size_t c = 0; c < header.size(); ++c)
    if (header[c] == "label") label_col = c;
  RealSample s;
  s.n = static_cast<int>(header.size()) - 1;
  s.provenance = provenance;
  for (std::size_t c = 0; c < header.size(); ++c)
    if (c != label_col) s.names.push_back(header[c]);
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size())
      throw FormatError("line " + std::to_string(lineno) + ": expected " + std::to_string(header.size()) + " columns");
    std::vector<double> x;
    x.reserve(static_cast<std::size_t>(s.n));
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (c == label_col) continue;
      x.push_back(parse_number(cells[c], lineno));
    }
    const double y = parse_number(cells[label_col], lineno);
    if (y != 0.0 && y != 1.0) throw FormatError("line " + std::to_string(lineno) + ": label must be 0 or 1");
    s.x.push_back(std::move(x));
    s.y.push_back(static_cast<std::uint8_t>(y));
  }
  if (s.y.empty()) throw FormatError("dataset has no rows");
  return s;
}

RealSample load_dataset_csv(const std::string& path) { return parse_dataset_csv(read_file(path), path); }

std::string dataset_csv(const RealSample& s) {
  std::ostringstream out;
  out.precision(17);
  for (int i = 1; i <= s.n; ++i)
    out << (static_cast<std::size_t>(i - 1) < s.names.size() ? s.names[i - 1] : "x" + std::to_string(i)) << ',';
  out << "label\n";
  for (std::size_t k = 0; k < s.size(); ++k) {
    for (double v : s.x[k]) out << v << ',';
    out << static_cast<int>(s.y[k]) << '\n';
  }
  return out.str();
}

ProductDistribution parse_distribution(const std::string& json_text, const RealSample* data) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("distribution spec is not valid JSON: ") + e.what());
  }
  if (!j.is_array() || j.empty()) throw FormatError("distribution spec must be a non-empty list");
  std::vector<Cdf> coords;
  for (const auto& e : j) {
    if ((e.is_string() && e == "uniform01") || (e.is_object() && e.contains("uniform01"))) {
      coords.push_back(Cdf::uniform01());
    } else if (e.is_object() && e.contains("cdf_table")) {
      std::vector<std::pair<double, double>> pts;
      for (const auto& p : e["cdf_table"]) {
        if (!p.is_array() || p.size() != 2) throw FormatError("cdf_table entries must be [v, F(v)] pairs");
        pts.emplace_back(p[0].get<double>(), p[1].get<double>());
      }
      try {
        coords.push_back(Cdf::table(std::move(pts)));
      } catch (const DomainError& err) {
        throw FormatError(err.what());
      }
    } else if (e.is_object() && e.contains("empirical")) {
      if (!data) throw FormatError("empirical CDF needs a dataset");
      const auto name = e["empirical"].get<std::string>();
      const auto it = std::find(data->names.begin(), data->names.end(), name);
      if (it == data->names.end()) throw FormatError("dataset has no column \"" + name + "\"");
      coords.push_back(Cdf::empirical(data->column(static_cast<int>(it - data->names.begin()) + 1)));
    } else {
      throw FormatError("unknown distribution entry " + e.dump());
    }
  }
  return ProductDistribution(std::move(coords));
}

ProductDistribution load_distribution(const std::string& path, const RealSample* data) {
  return parse_distribution(read_file(path), data);
}

RealSample sample_labeled(const std::function<bool(std::span<const double>)>& f, const ProductDistribution& d,
                          std::uint64_t count, std::uint64_t seed) {
  RealSample s;
  s.n = d.dimension();
  s.provenance = "sampled, seed " + std::to_string(seed);
  for (int i = 1; i <= s.n; ++i) s.names.push_back("x" + std::to_string(i));
  Rng rng(substream(seed, "labeled-sample"));
  for (std::uint64_t k = 0; k < count; ++k) {
    auto x = d.sample(rng);
    s.y.push_back(f(x) ? 1 : 0);
    s.x.push_back(std::move(x));
  }
  return s;
}

RealSample binary_sample(const BoolFunc& f) {
  RealSample s;
  s.n = f.arity();
  s.provenance = "cube enumeration";
  for (int i = 1; i <= s.n; ++i) s.names.push_back("x" + std::to_string(i));
  for (std::uint32_t idx = 0; idx < f.table_size(); ++idx) {
    std::vector<double> x(static_cast<std::size_t>(s.n));
    for (int i = 0; i < s.n; ++i) x[i] = (idx >> i) & 1u ? 1.0 : 0.0;
    s.x.push_back(std::move(x));
    s.y.push_back(f.at(idx) ? 1 : 0);
  }
  return s;
}

ThresholdPolicy ThresholdPolicy::parse(const std::string& text) {
  if (text == "midpoints") return midpoints();
  if (text.rfind("grid:", 0) == 0) {
    int w = 0;
    const char* b = text.data() + 5;
    const auto [ptr, ec] = std::from_chars(b, text.data() + text.size(), w);
    if (ec == std::errc() && ptr == text.data() + text.size() && w >= 1 && w <= 20) return grid(w);
  }
  throw FormatError("threshold policy must be \"midpoints\" or \"grid:W\" with 1 <= W <= 20");
}

namespace {

struct RealLeaf {
  std::vector<std::uint32_t> points;
  std::uint64_t ones = 0;
  int depth = 0;
  bool label = false;
  double g_value = 0.0;
  bool splittable = false;
  int best_coord = 0;
  double best_theta = 0.0;
  double best_gain = 0.0;
};

}  // namespace

GrowthResult grow_real(const RealSample& sample, const GrowthConfig& cfg, const ThresholdPolicy& policy,
                       const std::optional<ProductDistribution>& d) {
  if (!cfg.impurity) throw DomainError("real-valued growth needs an impurity (the influence variant is binary-only)");
  if (cfg.budget < 1) throw DomainError("leaf budget must be at least 1");
  if (sample.size() == 0) throw DomainError("sample is empty");
  const ImpuritySpec& spec = *cfg.impurity;
  const int n = sample.n;
  const auto total = static_cast<double>(sample.size());

  // Feature values in the space the tree lives in.
  std::vector<std::vector<double>> values(static_cast<std::size_t>(n));
  for (int i = 1; i <= n; ++i) values[i - 1] = sample.column(i);
  std::vector<std::vector<double>> cands(static_cast<std::size_t>(n));
  if (policy.kind == ThresholdPolicy::Kind::Grid) {
    for (int i = 1; i <= n; ++i) {
      const Cdf cdf = d ? d->coord(i) : Cdf::empirical(values[i - 1]);
      for (auto& v : values[i - 1]) v = cdf(v);
      for (std::uint32_t c = 1; c < (1u << policy.w); ++c) cands[i - 1].push_back(std::ldexp(c, -policy.w));
    }
  } else {
    for (int i = 1; i <= n; ++i) {
      auto u = values[i - 1];
      std::sort(u.begin(), u.end());
      u.erase(std::unique(u.begin(), u.end()), u.end());
      for (std::size_t k = 1; k < u.size(); ++k) cands[i - 1].push_back(u[k - 1] + (u[k] - u[k - 1]) / 2.0);
    }
  }
  // The candidate whose upper mass is closest to 1/2 is the coordinate's median split.
  std::vector<double> median(static_cast<std::size_t>(n), std::numeric_limits<double>::quiet_NaN());
  std::vector<std::map<double, double>> upper(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    auto sorted = values[i];
    std::sort(sorted.begin(), sorted.end());
    double best = 2.0;
    for (double th : cands[i]) {
      const auto above = static_cast<double>(sorted.end() - std::lower_bound(sorted.begin(), sorted.end(), th));
      const double mass = above / total;
      upper[i][th] = mass;
      if (std::abs(mass - 0.5) < best) {
        best = std::abs(mass - 0.5);
        median[i] = th;
      }
    }
  }

  auto evaluate = [&](RealLeaf& leaf) {
    const auto cnt = leaf.points.size();
    leaf.splittable = false;
    leaf.best_coord = 0;
    if (cnt == 0) return;
    const double w = static_cast<double>(cnt) / total;
    const double p = static_cast<double>(leaf.ones) / static_cast<double>(cnt);
    leaf.g_value = spec(p);
    std::vector<std::pair<double, std::uint8_t>> col(cnt);
    for (int i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < cnt; ++k) col[k] = {values[i][leaf.points[k]], sample.y[leaf.points[k]]};
      std::sort(col.begin(), col.end());
      std::size_t below = 0;
      std::uint64_t ones_below = 0;
      for (double th : cands[i]) {
        while (below < cnt && col[below].first < th) ones_below += col[below++].second;
        const std::size_t above = cnt - below;
        if (below == 0 || above == 0) continue;
        const double gain =
            split_gain(spec, w, p, static_cast<double>(below) / total,
                       static_cast<double>(ones_below) / static_cast<double>(below), static_cast<double>(above) / total,
                       static_cast<double>(leaf.ones - ones_below) / static_cast<double>(above));
        if (leaf.best_coord == 0 || gain > leaf.best_gain + kGainTolerance) {
          leaf.best_coord = i + 1;
          leaf.best_theta = th;
          leaf.best_gain = gain;
          leaf.splittable = true;
        }
      }
    }
  };

  PartialTree tree(TreeMode::Real);
  std::map<int, RealLeaf> leaves;
  {
    RealLeaf root;
    root.points.resize(sample.size());
    std::iota(root.points.begin(), root.points.end(), 0u);
    for (auto v : sample.y) root.ones += v;
    root.label = 2 * root.ones >= sample.size();
    evaluate(root);
    leaves.emplace(0, std::move(root));
  }
  auto errors = [&]() {
    std::uint64_t e = 0;
    for (const auto& [node, leaf] : leaves) e += std::min<std::uint64_t>(leaf.ones, leaf.points.size() - leaf.ones);
    return static_cast<double>(e) / total;
  };
  auto potential = [&]() {
    double sum = 0.0;
    for (int node : tree.leaf_nodes()) {
      const RealLeaf& l = leaves.at(node);
      if (!l.points.empty()) sum += static_cast<double>(l.points.size()) / total * l.g_value;
    }
    return sum;
  };

  GrowthTrace trace;
  trace.criterion = spec.name();
  trace.threshold_bits = policy.kind == ThresholdPolicy::Kind::Grid ? policy.w : 0;
  trace.initial_g_impurity = potential();
  trace.initial_distance = errors();

  while (tree.size() < cfg.budget) {
    int pick = -1;
    for (int node : tree.leaf_nodes()) {
      const RealLeaf& l = leaves.at(node);
      if (!l.splittable) continue;
      if (pick < 0 || l.best_gain > leaves.at(pick).best_gain + kGainTolerance) pick = node;
    }
    if (pick < 0) break;
    if (cfg.stop_on_zero_gain && leaves.at(pick).best_gain <= kGainTolerance) break;
    RealLeaf parent = std::move(leaves.at(pick));

    TraceRecord rec;
    rec.iter = static_cast<int>(trace.records.size()) + 1;
    rec.leaf_id = tree.leaf_id_of_node(pick);
    rec.depth = parent.depth;
    rec.query = Query::threshold(parent.best_coord, parent.best_theta);
    rec.gain = parent.best_gain;
    rec.upper_mass = upper[parent.best_coord - 1].at(parent.best_theta);
    rec.is_median = parent.best_theta == median[parent.best_coord - 1];

    const auto [lo, hi] = tree.split_node(pick, rec.query);
    leaves.erase(pick);
    RealLeaf l, h;
    l.depth = h.depth = parent.depth + 1;
    for (auto idx : parent.points) {
      RealLeaf& side = values[parent.best_coord - 1][idx] < parent.best_theta ? l : h;
      side.points.push_back(idx);
      side.ones += sample.y[idx];
    }
    for (RealLeaf* c : {&l, &h}) {
      c->label = c->points.empty() ? parent.label : 2 * c->ones >= c->points.size();
      evaluate(*c);
    }
    leaves.emplace(lo, std::move(l));
    leaves.emplace(hi, std::move(h));

    rec.g_impurity = potential();
    rec.distance = errors();
    trace.records.push_back(std::move(rec));
  }

  std::vector<bool> labels;
  for (int node : tree.leaf_nodes()) labels.push_back(leaves.at(node).label);
  DecisionTree completion(tree, std::move(labels));
  return GrowthResult{std::move(tree), std::move(completion), std::move(trace)};
}

double ks_uniform_statistic(std::vector<double> values) {
  if (values.empty()) throw DomainError("KS statistic needs at least one value");
  std::sort(values.begin(), values.end());
  const auto n = static_cast<double>(values.size());
  double d = 0.0;
  for (std::size_t k = 0; k < values.size(); ++k) {
    const double u = std::clamp(values[k], 0.0, 1.0);
    d = std::max({d, (static_cast<double>(k) + 1.0) / n - u, u - static_cast<double>(k) / n});
  }
  return d;
}

}  // namespace topdown
